#include "deleg/dot.hpp"

namespace deleg {

namespace {

std::string quoted(const std::string& name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string label(Permission p) {
  auto text = to_string(p);  // e.g. "TF"
  return std::string("+,") + text[0] + "," + text[1];
}

}  // namespace

std::string export_dot(const AuthorizationState& state) {
  std::string out = "digraph authorizations {\n  node [shape=circle];\n";
  for (const auto& p : state.principals()) {
    out += "  " + quoted(p);
    if (p == state.soa()) out += " [shape=doublecircle]";
    out += ";\n";
  }
  for (const auto& a : state.positive()) {
    out += "  " + quoted(a.grantor) + " -> " + quoted(a.grantee) + " [label=\"" +
           label(a.permission) + "\", style=" + (a.active ? "solid" : "dashed") + "];\n";
  }
  for (const auto& n : state.negative()) {
    out += "  " + quoted(n.grantor) + " -> " + quoted(n.grantee) +
           " [label=\"-,F,F\", style=solid];\n";
  }
  return out + "}\n";
}

}  // namespace deleg
