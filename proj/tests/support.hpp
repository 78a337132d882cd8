#pragma once

// Helpers shared by the unit tests and the acceptance runner. The chain
// oracle here walks simple paths directly from the definition and shares no
// code with the fixpoint in semantics.cpp.

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <random>

#include "deleg/oracle.hpp"
#include "deleg/permission.hpp"
#include "deleg/planner.hpp"
#include "deleg/transition.hpp"
#include "deleg/spec_format.hpp"
#include "deleg/state.hpp"

namespace deleg::testing {

inline std::string data_path(const std::string& name) {
  return std::string(DELEG_SOURCE_DIR) + "/data/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline AuthorizationState load(const std::string& name) {
  return parse_spec(read_text(data_path(name)));
}

// Compact edge listing used in failure messages: "AB:TT AC:TF(i) -AB".
inline std::string edges(const AuthorizationState& s) {
  std::string out;
  for (const auto& a : s.positive()) {
    if (!out.empty()) out += ' ';
    out += a.grantor + a.grantee + ":" + std::string(to_string(a.permission));
    if (!a.active) out += "(i)";
  }
  for (const auto& n : s.negative()) {
    if (!out.empty()) out += ' ';
    out += "-" + n.grantor + n.grantee;
  }
  return out;
}

// Permissions each principal holds through a rooted delegation chain: a
// simple path from the SOA whose every edge is licensed by the one before
// (the first by the SOA's implicit TT). Holding pi also means holding every
// permission pi is stronger than.
inline std::map<std::string, std::set<Permission>> brute_holdings(const AuthorizationState& s,
                                                                  bool active_only) {
  std::map<std::string, std::set<Permission>> held;
  for (const auto& p : s.principals()) held[p];
  auto hold = [&](const std::string& p, Permission via) {
    for (Permission q : kAllPermissions) {
      if (q == via || stronger(via, q)) held[p].insert(q);
    }
  };
  hold(s.soa(), Permission::TT);
  std::set<std::string> visited{s.soa()};
  std::function<void(const std::string&, Permission)> dfs = [&](const std::string& at,
                                                                Permission last) {
    for (const auto& a : s.positive()) {
      if (a.grantor != at || visited.count(a.grantee)) continue;
      if (active_only && !a.active) continue;
      if (!r_pos(last, a.permission)) continue;
      hold(a.grantee, a.permission);
      visited.insert(a.grantee);
      dfs(a.grantee, a.permission);
      visited.erase(a.grantee);
    }
  };
  dfs(s.soa(), Permission::TT);
  return held;
}

inline bool brute_can_grant(const std::set<Permission>& held, Permission a) {
  for (Permission h : held) {
    if (r_pos(h, a)) return true;
  }
  return false;
}

inline bool brute_access(const AuthorizationState& s, const std::string& p) {
  auto held = brute_holdings(s, true);
  if (!held[p].empty()) return true;
  for (const auto& a : s.positive()) {
    if (a.grantee == p && a.active && brute_can_grant(held[a.grantor], a.permission)) return true;
  }
  return false;
}

// Cost from its definition, over path-enumerated active holdings.
inline std::size_t brute_cost(const AuthorizationState& pre, const AuthorizationState& post) {
  auto a = brute_holdings(pre, true), b = brute_holdings(post, true);
  std::size_t out = 0;
  for (const auto& p : pre.principals()) {
    for (Permission perm : kAllPermissions) out += a[p].count(perm) != b[p].count(perm);
    out += brute_access(pre, p) != brute_access(post, p);
  }
  return out;
}

inline bool brute_eval(const AuthorizationState& pre, const AuthorizationState& post, const Goal& g) {
  auto held_post = brute_holdings(post, true), held_pre = brute_holdings(pre, true);
  for (const auto& l : g.literals) {
    bool ok = true;
    switch (l.kind) {
      case Literal::Kind::Access: ok = brute_access(post, l.principal); break;
      case Literal::Kind::NotAccess: ok = !brute_access(post, l.principal); break;
      case Literal::Kind::Holds: ok = held_post[l.principal].count(l.permission) > 0; break;
      case Literal::Kind::NotHolds: ok = held_post[l.principal].count(l.permission) == 0; break;
      case Literal::Kind::Unchanged:
        ok = held_pre[l.principal] == held_post[l.principal] &&
             brute_access(pre, l.principal) == brute_access(post, l.principal);
        break;
    }
    if (!ok) return false;
  }
  return true;
}

struct Candidate {
  Action action;
  AuthorizationState post;
  std::size_t cost;
};

inline std::vector<Candidate> brute_plan(const AuthorizationState& s, const std::string& actor, const Goal& g) {
  std::vector<Candidate> out;
  for (Scheme sc : kAllSchemes) {
    for (const auto& target : s.principals()) {
      Action a{sc, actor, target};
      if (validate_action(s, a)) continue;
      auto post = oracle_apply(s, a);
      if (brute_eval(s, post, g)) out.push_back({a, post, brute_cost(s, post)});
    }
  }
  return out;
}

inline Goal random_goal(std::mt19937_64& rng, const AuthorizationState& s) {
  const auto& names = s.principals();
  std::uniform_int_distribution<std::size_t> who(0, names.size() - 1), kind(0, 4), perm(0, 3),
      len(1, 2);
  Goal g;
  for (std::size_t k = len(rng); k > 0; --k) {
    Literal l;
    l.kind = static_cast<Literal::Kind>(kind(rng));
    l.principal = names[who(rng)];
    l.permission = kAllPermissions[perm(rng)];
    g.literals.push_back(l);
  }
  return g;
}

}  // namespace deleg::testing
