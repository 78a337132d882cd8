#include "deleg/oracle.hpp"

#include <array>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "deleg/transition.hpp"

namespace deleg {

namespace {

using Key = std::tuple<std::string, std::string, Permission>;
// Value is the activity flag.
using Auths = std::map<Key, bool>;
using Held = std::array<bool, 4>;
using Holdings = std::map<std::string, Held>;

thread_local std::size_t last_passes = 0;

bool has(const Held& h, Permission p) { return h[index_of(p)]; }

// Holding `via` lets you hold every weaker permission too.
void hold_down(Held& h, Permission via) {
  for (Permission q : kAllPermissions) {
    if (q == via || stronger(via, q)) h[index_of(q)] = true;
  }
}

bool may_grant(const Held& h, Permission a) {
  for (Permission rho : kAllPermissions) {
    if (has(h, rho) && r_pos(rho, a)) return true;
  }
  return false;
}

struct Graph {
  std::vector<std::string> names;
  std::string soa;
  Auths auths;
};

// Walk every simple path out of the SOA. A path extends along (u, v, a) when
// u, by what the path gave it, may grant a.
void walk(const Graph& g, bool active_only, const std::string& at, Permission last,
          std::set<std::string>& on_path, Holdings& out,
          std::set<std::tuple<std::string, std::set<std::string>, Permission>>& seen) {
  if (!seen.emplace(at, on_path, last).second) return;
  Held here{};
  hold_down(here, last);
  for (const auto& [key, active] : g.auths) {
    const auto& [from, to, a] = key;
    if (from != at || on_path.count(to)) continue;
    if (active_only && !active) continue;
    if (!may_grant(here, a)) continue;
    hold_down(out[to], a);
    on_path.insert(to);
    walk(g, active_only, to, a, on_path, out, seen);
    on_path.erase(to);
  }
}

Holdings holdings(const Graph& g, bool active_only) {
  Holdings out;
  for (const auto& p : g.names) out[p] = Held{};
  hold_down(out[g.soa], Permission::TT);
  std::set<std::string> on_path{g.soa};
  std::set<std::tuple<std::string, std::set<std::string>, Permission>> seen;
  walk(g, active_only, g.soa, Permission::TT, on_path, out, seen);
  return out;
}

// Permissions a with a path SOA -> ... -> z of TT/TF edges avoiding i, each
// edge R-related to the previous one, whose last edge carries some a1 with
// R(a1, a). The SOA qualifies for everything when it is not i.
std::map<std::string, Held> independent_rights(const Graph& g, const std::string& i) {
  std::map<std::string, Held> out;
  for (const auto& p : g.names) out[p] = Held{};
  if (g.soa == i) return out;
  out[g.soa].fill(true);

  struct Frame {
    std::string at;
    std::optional<Permission> last;  // nullopt at the SOA
    std::set<std::string> visited;
  };
  std::vector<Frame> stack{{g.soa, std::nullopt, {g.soa}}};
  std::set<std::tuple<std::string, std::set<std::string>, int>> seen;
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    int tag = f.last ? static_cast<int>(index_of(*f.last)) : -1;
    if (!seen.emplace(f.at, f.visited, tag).second) continue;
    for (const auto& [key, active] : g.auths) {
      (void)active;
      const auto& [from, to, a] = key;
      if (from != f.at || to == i || f.visited.count(to)) continue;
      if (a != Permission::TT && a != Permission::TF) continue;
      if (f.last && !r_pos(*f.last, a)) continue;
      for (Permission b : kAllPermissions) {
        if (r_pos(a, b)) out[to][index_of(b)] = true;
      }
      Frame next{to, a, f.visited};
      next.visited.insert(to);
      stack.push_back(std::move(next));
    }
  }
  return out;
}

std::optional<Permission> strongest_in(const Held& candidates) {
  for (Permission p : kAllPermissions) {
    if (!has(candidates, p)) continue;
    bool beaten = false;
    for (Permission q : kAllPermissions) {
      if (has(candidates, q) && stronger(q, p)) beaten = true;
    }
    if (!beaten) return p;
  }
  return std::nullopt;
}

// Strongest permission weaker than `a` that `h` allows granting.
std::optional<Permission> downgrade(const Held& h, Permission a) {
  Held cand{};
  for (Permission b : kAllPermissions) {
    if (stronger(a, b) && may_grant(h, b)) cand[index_of(b)] = true;
  }
  return strongest_in(cand);
}

Graph graph_of(const AuthorizationState& s) {
  Graph g{s.principals(), s.soa(), {}};
  for (const auto& a : s.positive()) g.auths[{a.grantor, a.grantee, a.permission}] = a.active;
  return g;
}

}  // namespace

std::size_t oracle_last_pass_count() { return last_passes; }

AuthorizationState oracle_apply(const AuthorizationState& state, const Action& action) {
  last_passes = 0;
  if (auto error = validate_action(state, action)) throw ActionError(*error, action);

  const Graph g0 = graph_of(state);
  const std::string& i = action.actor;
  const std::string& j = action.target;
  const Scheme scheme = action.scheme;
  const auto active0 = holdings(g0, true);

  auto finish = [&](const Auths& auths, bool add_negative) {
    std::vector<Authorization> pos;
    for (const auto& [key, active] : auths) {
      pos.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), active});
    }
    auto neg = state.negative();
    if (add_negative && !state.has_negative(i, j)) neg.push_back({i, j});
    return AuthorizationState(state.soa(), state.principals(), std::move(pos), std::move(neg));
  };

  if (is_grant(scheme)) {
    // Strongest compatible permission the actor may actively grant.
    Held cand{};
    for (Permission a : kAllPermissions) {
      if (grant_compat(a, scheme) && may_grant(active0.at(i), a)) cand[index_of(a)] = true;
    }
    Auths out = g0.auths;
    out.emplace(Key{i, j, *strongest_in(cand)}, true);
    return finish(out, false);
  }

  const bool negative = is_negative(scheme);
  const bool strong = is_strong(scheme);
  const bool global = is_global(scheme);
  std::map<std::string, Held> ind;
  if (strong) ind = independent_rights(g0, i);
  auto dominated = [&](const std::string& z, Permission a) { return strong && !ind[z][index_of(a)]; };

  std::set<Key> removed;      // deleted
  std::set<Key> inactivated;  // newly or already inactive
  std::set<Key> issued;       // forwarding and local replacements
  std::set<Key> settled;      // target edges the local steps took care of
  for (const auto& [key, active] : g0.auths) {
    if (!active) inactivated.insert(key);
  }

  // Step 1: the revoked authorization itself; the strong local variants also
  // drop authorizations into j from grantors not independent of i.
  for (const auto& [key, active] : g0.auths) {
    (void)active;
    const auto& [from, to, a] = key;
    const bool revoked = from == i && to == j;
    const bool strong_here = to == j && dominated(from, a) &&
                             (scheme == Scheme::SLD || scheme == Scheme::SLN || scheme == Scheme::SGN);
    if (!revoked && !strong_here) continue;
    if (negative) {
      inactivated.insert(key);
    } else if (revoked || scheme == Scheme::SLD) {
      removed.insert(key);
    }
  }

  auto current = [&](const std::set<Key>& extra) {
    Graph g{g0.names, g0.soa, {}};
    for (const auto& [key, active] : g0.auths) {
      if (!removed.count(key)) g.auths[key] = true;
    }
    for (const auto& key : issued) g.auths[key] = true;
    for (const auto& key : extra) g.auths[key] = true;
    for (auto& [key, active] : g.auths) active = !inactivated.count(key);
    return g;
  };

  if (!global) {
    // Steps 2-4 of the local procedures, judged right after step 1.
    const Graph mid = current({});
    const auto all_mid = holdings(mid, false);
    const auto act_mid = holdings(mid, true);
    for (const auto& [key, active] : g0.auths) {
      (void)active;
      const auto& [from, k, a] = key;
      if (from != j) continue;
      const bool lost = !negative && !may_grant(all_mid.at(j), a);
      const bool lost_active = !may_grant(act_mid.at(j), a);
      if (!lost && !lost_active) continue;
      settled.insert(key);
      if (lost) {
        removed.insert(key);
        if (auto b = downgrade(all_mid.at(j), a)) issued.insert({j, k, *b});
      } else {
        inactivated.insert(key);
        if (negative && may_grant(active0.at(j), a)) {
          if (auto b = downgrade(act_mid.at(j), a)) issued.insert({j, k, *b});
        }
      }
      if (may_grant(active0.at(j), a) && k != i) issued.insert({i, k, a});
    }
  }

  // Remaining propagation: every grantor that can no longer grant what it
  // issued loses it, with the strongest weaker replacement. The global strong
  // variants additionally cut non-independent grantors into anyone who lost
  // something. Each pass judges losses afresh on the graph left by the
  // previous one, since a replacement further up can restore a right that
  // looked lost. Runs for local schemes too, where forwarding normally leaves
  // nothing for it to do.
  const std::set<Key> base_removed = removed;
  const std::set<Key> base_inactive = inactivated;
  const std::size_t bound = g0.auths.size() + g0.names.size() * g0.names.size();
  std::set<Key> replacements;
  while (true) {
    ++last_passes;
    if (last_passes > bound + 1) throw std::logic_error("oracle exceeded its pass bound");
    const Graph g = current(replacements);
    const auto all_now = holdings(g, false);
    const auto act_now = holdings(g, true);

    std::set<Key> next_removed = base_removed;
    std::set<Key> next_inactive = base_inactive;
    std::set<Key> next_replacements;
    for (const auto& [key, active] : g0.auths) {
      (void)active;
      const auto& [x, k, a] = key;
      if (!may_grant(all_now.at(x), a)) {
        next_removed.insert(key);
        if (!settled.count(key)) {
          if (auto b = downgrade(all_now.at(x), a)) next_replacements.insert({x, k, *b});
        }
      }
      if (negative && !settled.count(key) && may_grant(active0.at(x), a) &&
          !may_grant(act_now.at(x), a)) {
        if (auto b = downgrade(act_now.at(x), a)) next_replacements.insert({x, k, *b});
      }
    }
    for (const auto& [key, active] : g.auths) {
      (void)active;
      const auto& [x, k, a] = key;
      if (!may_grant(act_now.at(x), a)) next_inactive.insert(key);
      if (negative && x == i && k == j) next_inactive.insert(key);
    }
    if (scheme == Scheme::SGD || scheme == Scheme::SGN) {
      for (const auto& w : g0.names) {
        bool lost_into_w = false;
        for (const auto& key : scheme == Scheme::SGD ? next_removed : next_inactive) {
          if (std::get<1>(key) != w) continue;
          auto before = g0.auths.find(key);
          const bool was_inactive = before != g0.auths.end() && !before->second;
          if (scheme == Scheme::SGD || !was_inactive) lost_into_w = true;
        }
        if (!lost_into_w) continue;
        for (const auto& [key, active] : g0.auths) {
          (void)active;
          if (std::get<1>(key) == w && dominated(std::get<0>(key), std::get<2>(key))) {
            (scheme == Scheme::SGD ? next_removed : next_inactive).insert(key);
          }
        }
      }
    }
    if (next_removed == removed && next_inactive == inactivated && next_replacements == replacements) {
      break;
    }
    removed = std::move(next_removed);
    inactivated = std::move(next_inactive);
    replacements = std::move(next_replacements);
  }

  const Graph final_graph = current(replacements);
  return finish(final_graph.auths, negative);
}

AuthorizationState empty_state(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) {
    names.push_back(k < 26 ? std::string(1, static_cast<char>('A' + k)) : "P" + std::to_string(k));
  }
  return AuthorizationState(names.empty() ? "" : names.front(), names, {}, {});
}

ReachableSample random_reachable_state(std::uint64_t seed, std::size_t n, std::size_t depth) {
  std::mt19937_64 rng(seed);
  ReachableSample out{empty_state(n), {}};
  for (std::size_t step = 0; step < depth; ++step) {
    auto actions = valid_actions(out.state);
    if (actions.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
    const Action& action = actions[pick(rng)];
    out.state = apply_action(out.state, action).state;
    out.trace.push_back(action);
  }
  return out;
}

}  // namespace deleg
