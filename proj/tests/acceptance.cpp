// Acceptance runner: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails, except those listed as documented findings (see README).

#include <chrono>
#include <iostream>
#include <set>
#include <sstream>

#include "../tools/cli.hpp"
#include "deleg/oracle.hpp"
#include "deleg/planner.hpp"
#include "deleg/semantics.hpp"
#include "deleg/spec_format.hpp"
#include "deleg/transition.hpp"
#include "deleg/verifier.hpp"
#include "support.hpp"

using namespace deleg;
using deleg::testing::data_path;
using deleg::testing::edges;
using deleg::testing::load;
using P = Permission;
using Clock = std::chrono::steady_clock;

namespace {

int hard_failures = 0;
std::size_t non_total = 0;

void report(bool ok, const std::string& name, const std::string& detail, bool finding = false) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail;
  if (!ok && finding) std::cout << " [documented finding]";
  std::cout << std::endl;
  if (!ok && !finding) ++hard_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string secs(double s) {
  std::ostringstream out;
  out.precision(2);
  out << std::fixed << s << "s";
  return out.str();
}

// apply_action with non-total models counted rather than thrown.
std::optional<AuthorizationState> step(const AuthorizationState& s, const Action& a) {
  try {
    return apply_action(s, a).state;
  } catch (const NonTotalModel&) {
    ++non_total;
    return std::nullopt;
  }
}

// All states reachable from the empty state within `depth` actions.
std::vector<AuthorizationState> reachable(std::size_t n, std::size_t depth) {
  std::set<std::string> seen{serialize_spec(empty_state(n))};
  std::vector<AuthorizationState> frontier{empty_state(n)}, all{empty_state(n)};
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<AuthorizationState> next;
    for (const auto& s : frontier) {
      for (const auto& a : valid_actions(s)) {
        auto post = step(s, a);
        if (post && seen.insert(serialize_spec(*post)).second) {
          next.push_back(*post);
          all.push_back(*post);
        }
      }
    }
    frontier = std::move(next);
  }
  return all;
}

bool clean(const AuthorizationState& s) {
  if (!s.negative().empty()) return false;
  for (const auto& a : s.positive()) {
    if (!a.active) return false;
  }
  return true;
}

void golden_figures() {
  auto start = Clock::now();
  const auto fig2 = load("fig2.spec");
  const std::pair<Scheme, const char*> cases[] = {{Scheme::WLD, "fig3_wld.spec"},
                                                  {Scheme::WGD, "fig4_wgd.spec"},
                                                  {Scheme::SLD, "fig5_sld.spec"},
                                                  {Scheme::SGD, "fig6_sgd.spec"},
                                                  {Scheme::WLN, "fig7_wln.spec"}};
  std::string bad;
  for (const auto& [scheme, file] : cases) {
    if (apply_action(fig2, {scheme, "A", "B"}).state != load(file)) bad += " " + std::string(to_string(scheme));
  }
  const auto fig1 = load("fig1.spec");
  bool fig1_ok = query_holders(fig1, P::TT, ChainMode::All) == std::vector<std::string>{"A", "B", "D"} &&
                 holds_chain(fig1, "C", P::TF, ChainMode::All) &&
                 !holds_chain(fig1, "C", P::TT, ChainMode::All) &&
                 !holds_chain(fig1, "C", P::FT, ChainMode::All);
  if (!fig1_ok) bad += " fig1";
  double t = seconds_since(start);
  report(bad.empty() && t < 1.0, "golden-figures",
         (bad.empty() ? std::string("fig3..fig7 reproduced from fig2; fig1 holders TT = A B D, C strongest TF")
                      : "mismatch:" + bad) +
             " in " + secs(t));
}

void differential(const std::vector<AuthorizationState>& exhaustive3) {
  auto start = Clock::now();
  std::size_t steps = 0, divergences = 0;
  std::string first;
  auto compare = [&](const AuthorizationState& s, const Action& a) {
    ++steps;
    auto engine = step(s, a);
    if (!engine) return;
    if (*engine != oracle_apply(s, a)) {
      if (!divergences++) first = edges(s) + " / " + to_string(a);
    }
  };
  for (const auto& s : exhaustive3) {
    for (const auto& a : valid_actions(s)) compare(s, a);
  }
  const std::size_t exhaustive_steps = steps;
  const std::size_t samples = 10000;
  for (std::uint64_t seed = 0; seed < samples; ++seed) {
    auto s = random_reachable_state(seed, 3 + seed % 3, 1 + seed % 10).state;
    for (const auto& a : valid_actions(s)) compare(s, a);
  }
  std::ostringstream detail;
  detail << divergences << " divergences; n=3 exhaustive depth<=3: " << exhaustive3.size() << " states, "
         << exhaustive_steps << " steps; random n=3..5: " << samples << " states, " << steps - exhaustive_steps
         << " steps; " << secs(seconds_since(start));
  if (divergences) detail << "; first: " << first;
  report(divergences == 0, "differential-equivalence", detail.str());
}

VerifyParams params(Invariant inv, VerifyMode mode, std::size_t n, std::size_t depth, std::size_t samples) {
  VerifyParams p;
  p.invariant = inv;
  p.mode = mode;
  p.n = n;
  p.depth = depth;
  p.samples = samples;
  p.seed = 1;
  return p;
}

// A witness must reproduce from scratch: trace, then action, then violation.
bool replays(const InvariantReport& r) {
  const auto& w = *r.witness;
  if (simulate(empty_state(r.params.n), w.trace).final_state() != w.state) return false;
  if (!check_invariant(r.params.invariant, w.state).empty()) return false;
  auto post = apply_action(w.state, w.action).state;
  auto v = check_invariant(r.params.invariant, post);
  return std::find(v.begin(), v.end(), w.violation) != v.end();
}

void invariants(const std::vector<AuthorizationState>& exhaustive3) {
  for (Invariant inv : {Invariant::Connectivity, Invariant::ActiveConnectivity}) {
    auto start = Clock::now();
    std::ostringstream detail;
    bool holds = true, witness_ok = true;
    try {
      for (auto mode : {VerifyMode::Exhaustive, VerifyMode::Random}) {
        auto p = mode == VerifyMode::Exhaustive ? params(inv, mode, 3, 3, 0) : params(inv, mode, 6, 8, 10000);
        auto r = verify_step_invariant(p);
        detail << to_string(mode) << " n=" << p.n << ": " << (r.holds ? "HOLDS" : "COUNTEREXAMPLE") << " ("
               << r.states_checked << " states, " << r.steps_checked << " steps)";
        if (r.witness) {
          bool ok = replays(r);
          witness_ok = witness_ok && ok;
          detail << " witness: trace [";
          for (std::size_t k = 0; k < r.witness->trace.size(); ++k) {
            detail << (k ? "; " : "") << to_string(r.witness->trace[k]);
          }
          detail << "] then " << to_string(r.witness->action) << " leaves " << to_string(r.witness->violation)
                 << (ok ? ", replays" : ", DOES NOT REPLAY");
        }
        detail << "; ";
        holds = holds && r.holds;
      }
    } catch (const NonTotalModel& e) {
      ++non_total;
      holds = false;
      detail << "non-total model: " << e.what() << "; ";
    }
    detail << secs(seconds_since(start));
    // Connectivity over negative authorizations is the one documented finding,
    // and only while its witnesses replay.
    const bool finding = inv == Invariant::Connectivity && witness_ok;
    report(holds, "invariant-preservation (" + std::string(to_string(inv)) + ")", detail.str(), finding);
  }

  // Context for the finding: the same sweep restricted to positive authorizations.
  auto start = Clock::now();
  std::size_t steps = 0, positive_violations = 0;
  auto sweep = [&](const AuthorizationState& s) {
    for (const auto& a : valid_actions(s)) {
      ++steps;
      auto post = step(s, a);
      if (!post) continue;
      for (const auto& v : check_connectivity(*post)) positive_violations += v.permission.has_value();
    }
  };
  for (const auto& s : exhaustive3) sweep(s);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) sweep(random_reachable_state(seed, 6, 1 + seed % 8).state);
  report(positive_violations == 0, "connectivity restricted to positive authorizations",
         std::to_string(positive_violations) + " violations over " + std::to_string(steps) +
             " steps (n=3 exhaustive + 10^4 random n=6); " + secs(seconds_since(start)));
}

void duality() {
  auto start = Clock::now();
  std::size_t states = 0, compared = 0, violations = 0;
  std::string first;
  for (std::uint64_t seed = 0; states < 1000; ++seed) {
    auto s = random_reachable_state(seed, 3 + seed % 3, 1 + seed % 8).state;
    if (!clean(s)) continue;
    ++states;
    for (Scheme neg : {Scheme::WLN, Scheme::WGN, Scheme::SLN, Scheme::SGN}) {
      for (const auto& actor : s.principals()) {
        for (const auto& target : s.principals()) {
          Action n{neg, actor, target}, d{delete_counterpart(neg), actor, target};
          if (validate_action(s, n) || validate_action(s, d)) continue;
          auto a = step(s, n), b = step(s, d);
          if (!a || !b) continue;
          ++compared;
          if (query_access(*a) != query_access(*b) && !violations++) first = edges(s) + " / " + to_string(n);
        }
      }
    }
  }
  report(violations == 0, "delete/negative duality",
         std::to_string(violations) + " violations over " + std::to_string(states) + " clean states, " +
             std::to_string(compared) + " scheme pairs; " + secs(seconds_since(start)) +
             (violations ? "; first: " + first : ""));
}

void planner() {
  auto start = Clock::now();
  std::mt19937_64 rng(7);
  std::size_t states = 0, nonempty = 0, mismatches = 0;
  std::string first;
  for (std::uint64_t seed = 0; states < 150; ++seed, ++states) {
    auto s = random_reachable_state(seed, 3 + seed % 3, 1 + seed % 8).state;
    const auto& actor = s.principals()[seed % s.principals().size()];
    // Alternate an arbitrary goal with one built to be satisfiable, so empty
    // result sets do not dominate the comparison.
    Goal goal = deleg::testing::random_goal(rng, s);
    if (seed % 2) {
      goal = parse_goal("access(" + s.soa() + ")");
      goal.literals.push_back(deleg::testing::random_goal(rng, s).literals.front());
    }
    auto got = plan(s, actor, goal);
    auto want = deleg::testing::brute_plan(s, actor, goal);
    bool same = got.size() == want.size();
    for (const auto& w : want) {
      auto it = std::find_if(got.begin(), got.end(), [&](const PlanResult& r) { return r.action == w.action; });
      same = same && it != got.end() && it->post_state == w.post && it->cost == w.cost;
    }
    auto best = plan_min_cost(s, actor, goal);
    if (want.empty()) {
      same = same && !best;
    } else {
      std::size_t min_cost = want.front().cost;
      for (const auto& w : want) min_cost = std::min(min_cost, w.cost);
      same = same && best && best->cost == min_cost &&
             std::any_of(want.begin(), want.end(), [&](const auto& w) { return w.action == best->action; });
    }
    nonempty += !want.empty();
    if (!same && !mismatches++) first = edges(s) + " / " + actor + " / " + to_string(goal);
  }
  report(mismatches == 0, "planner vs brute force",
         std::to_string(mismatches) + " mismatches over " + std::to_string(states) + " states (n=3..5, " +
             std::to_string(nonempty) + " with non-empty plans); " + secs(seconds_since(start)) +
             (mismatches ? "; first: " + first : ""));
}

void positive_precedence() {
  AuthorizationState s("A", {"A", "B", "C", "D"},
                       {{"A", "B", P::TT, true}, {"B", "C", P::TF, true}, {"A", "D", P::TT, true}},
                       {{"D", "C"}, {"A", "C"}});
  report(access_right(s, "C"), "positive-takes-precedence",
         "active chain A->B->C with negatives D->C and A->C: access_right(C) = " +
             std::string(access_right(s, "C") ? "true" : "false"));
}

void static_tables() {
  std::size_t r = 0, neg = 0, str = 0, compat = 0;
  std::set<std::string> r_pairs, str_pairs, compat_pairs, neg_set;
  for (P a : kAllPermissions) {
    neg += can_issue_negative(a);
    if (can_issue_negative(a)) neg_set.insert(std::string(to_string(a)));
    for (P b : kAllPermissions) {
      const std::string key = std::string(to_string(a)) + ">" + std::string(to_string(b));
      if (r_pos(a, b)) ++r, r_pairs.insert(key);
      if (stronger(a, b)) ++str, str_pairs.insert(key);
    }
    for (Scheme s : kAllSchemes) {
      if (grant_compat(a, s)) ++compat, compat_pairs.insert(std::string(to_string(a)) + ":" + std::string(to_string(s)));
    }
  }
  const std::set<std::string> r_want{"TT>TT", "TT>TF", "TT>FT", "TT>FF", "TF>TF", "TF>FF"};
  const std::set<std::string> str_want{"TT>TF", "TT>FT", "TT>FF", "TF>FF", "FT>FF"};
  const std::set<std::string> compat_want{"TT:grantTT", "TF:grantTT", "FT:grantTT", "FF:grantTT",
                                          "TF:grantTF", "FF:grantTF", "FT:grantFT", "FF:grantFF"};
  const std::set<std::string> neg_want{"TT", "FT"};
  bool ok = r_pairs == r_want && str_pairs == str_want && compat_pairs == compat_want && neg_set == neg_want;
  report(ok, "static tables",
         "r_pos " + std::to_string(r) + " pairs, can_issue_negative " + std::to_string(neg) + " values, stronger " +
             std::to_string(str) + " pairs, grant_compat " + std::to_string(compat) + " pairs");
}

void round_trip_and_determinism() {
  std::size_t failures = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto s = seed % 2 ? random_arbitrary_state(seed, 2 + seed % 7)
                      : random_reachable_state(seed, 2 + seed % 7, seed % 12).state;
    auto text = serialize_spec(s);
    if (parse_spec(text) != s || serialize_spec(parse_spec(text)) != text) ++failures;
  }
  const std::string fig2 = data_path("fig2.spec");
  const std::vector<std::vector<std::string>> commands = {
      {"step", fig2, "--do", "SGD", "A", "B"},
      {"query", fig2, "holders", "TF"},
      {"query", fig2, "access"},
      {"plan", fig2, "--actor", "A", "--goal", "!access(F)"},
      {"export", data_path("fig7_wln.spec"), "--dot"},
      {"verify", "--n", "4", "--invariant", "active-connectivity", "--random", "200", "--seed", "5"},
      {"verify", "--n", "3", "--invariant", "connectivity", "--exhaustive", "2"},
  };
  std::size_t runs = 0, differing = 0;
  for (auto args : commands) {
    for (bool structured : {false, true}) {
      if (structured) args.insert(args.end(), {"--output", "structured"});
      std::string first;
      for (int k = 0; k < 3; ++k) {
        std::istringstream in;
        std::ostringstream out, err;
        run_cli(args, in, out, err);
        ++runs;
        if (k == 0) first = out.str() + err.str();
        differing += out.str() + err.str() != first;
      }
    }
  }
  report(failures == 0 && differing == 0, "round-trip and determinism",
         std::to_string(failures) + " round-trip failures over 1000 states; " + std::to_string(differing) +
             " differing outputs over " + std::to_string(runs) + " CLI runs");
}

}  // namespace

int main() {
  auto start = Clock::now();
  golden_figures();
  const auto exhaustive3 = reachable(3, 3);
  differential(exhaustive3);
  invariants(exhaustive3);
  duality();
  planner();
  positive_precedence();
  static_tables();
  round_trip_and_determinism();
  // Every apply_action above went through `step` or the verifier.
  report(non_total == 0, "well-founded totality",
         std::to_string(non_total) + " non-total models across all steps exercised above");
  std::cout << "total " << secs(seconds_since(start)) << ", " << hard_failures << " failing criteria"
            << std::endl;
  return hard_failures == 0 ? 0 : 1;
}
