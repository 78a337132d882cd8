#pragma once

#include <string>

#include "deleg/state.hpp"

namespace deleg {

// Graphviz digraph in the figure conventions: one edge per authorization,
// labelled "+,b1,b2" (dashed when inactive) or "-,F,F" for negatives. The
// SOA is drawn as a double circle. Output depends only on the state.
std::string export_dot(const AuthorizationState& state);

}  // namespace deleg
