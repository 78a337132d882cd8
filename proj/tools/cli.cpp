#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "deleg/dot.hpp"
#include "deleg/semantics.hpp"
#include "deleg/spec_format.hpp"
#include "deleg/structured.hpp"

namespace deleg {

namespace {

// Thrown for bad input files or flags; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Domain failure already rendered; maps to exit code 1.
struct DomainFailure : std::runtime_error {
  DomainFailure(std::string code, const std::string& message)
      : std::runtime_error(message), code(std::move(code)) {}
  std::string code;
};

std::string read_file(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  return buf.str();
}

std::string describe(const Triple& t) {
  return "auth " + t.grantor + " " + t.grantee + " " + std::string(to_string(t.permission));
}

// Delta as `#`-prefixed lines: "-" deleted, "+" added, "~" inactivated.
std::string delta_text(const StepDelta& d, const std::string& prefix) {
  std::string out;
  for (const auto& t : d.deleted) out += prefix + "- " + describe(t) + "\n";
  for (const auto& t : d.added) out += prefix + "+ " + describe(t) + "\n";
  for (const auto& t : d.inactivated) out += prefix + "~ " + describe(t) + "\n";
  for (const auto& n : d.neg_added) out += prefix + "+ neg " + n.grantor + " " + n.grantee + "\n";
  return out;
}

std::string names_line(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : " ") + n;
  return out + "\n";
}

Action make_action(const std::vector<std::string>& parts) {
  auto scheme = parse_scheme(parts.at(0));
  if (!scheme) throw UsageError("unknown scheme '" + parts.at(0) + "'");
  return {*scheme, parts.at(1), parts.at(2)};
}

StepResult step_or_fail(const AuthorizationState& state, const Action& action) {
  if (auto code = validate_action(state, action)) {
    throw DomainFailure(std::string(to_string(*code)), std::string(to_string(*code)) + ": " + to_string(action));
  }
  try {
    return apply_action(state, action);
  } catch (const NonTotalModel& e) {
    throw DomainFailure("non-total-model", e.what());
  }
}

struct Options {
  std::string output = "text";
  bool structured() const { return output == "structured"; }
};

void emit(std::ostream& out, const Options& opt, const Json& doc, const std::string& text) {
  if (opt.structured()) {
    out << render(doc);
  } else {
    out << text;
  }
}

int repl(const AuthorizationState& start, std::istream& in, std::ostream& out, const Options& opt) {
  std::vector<AuthorizationState> history{start};
  auto show = [&] {
    emit(out, opt, document("state", {{"index", history.size() - 1}, {"state", to_json(history.back())}}),
         "# state " + std::to_string(history.size() - 1) + "\n" + serialize_spec(history.back()));
  };
  show();
  std::string line;
  while (true) {
    if (!opt.structured()) out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    std::istringstream words(line);
    std::vector<std::string> t;
    for (std::string w; words >> w;) t.push_back(w);
    if (t.empty()) continue;
    if (t[0] == "quit" || t[0] == "exit") break;
    if (t[0] == "help") {
      if (!opt.structured()) {
        out << "do <scheme> <actor> <target> | undo | state | access | holders <perm> | dot | quit\n";
      }
      continue;
    }
    try {
      if (t[0] == "undo") {
        if (history.size() > 1) history.pop_back();
        show();
      } else if (t[0] == "state") {
        show();
      } else if (t[0] == "access") {
        auto names = query_access(history.back());
        emit(out, opt, document("query", {{"query", "access"}, {"principals", names}}), names_line(names));
      } else if (t[0] == "holders" && t.size() == 2) {
        auto perm = parse_permission(t[1]);
        if (!perm) throw UsageError("bad permission '" + t[1] + "'");
        auto names = query_holders(history.back(), *perm, ChainMode::All);
        emit(out, opt,
             document("query", {{"query", "holders"}, {"permission", t[1]}, {"principals", names}}),
             names_line(names));
      } else if (t[0] == "dot") {
        auto dot = export_dot(history.back());
        emit(out, opt, document("dot", {{"dot", dot}}), dot);
      } else {
        if (t[0] == "do") t.erase(t.begin());
        if (t.size() != 3) throw UsageError("expected: do <scheme> <actor> <target>");
        Action action = make_action(t);
        auto step = step_or_fail(history.back(), action);
        history.push_back(step.state);
        emit(out, opt,
             document("step", {{"index", history.size() - 1},
                               {"action", to_json(action)},
                               {"delta", to_json(step.delta)},
                               {"state", to_json(step.state)}}),
             delta_text(step.delta, "# ") + "# state " + std::to_string(history.size() - 1) + "\n" +
                 serialize_spec(step.state));
      }
    } catch (const UsageError& e) {
      emit(out, opt, error_document("usage", e.what()), std::string("error: ") + e.what() + "\n");
    } catch (const DomainFailure& e) {
      emit(out, opt, error_document(e.code, e.what()), std::string("error: ") + e.what() + "\n");
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Delegation and revocation engine for ownership-based access control"};
  app.require_subcommand(1);
  // Lets global options such as --output follow the subcommand.
  app.fallthrough();
  Options opt;
  app.add_option("--output", opt.output, "Output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();

  std::string spec_path, script_path, query_kind, query_perm, query_mode = "all";
  std::vector<std::string> do_parts;

  auto* step = app.add_subcommand("step", "Apply one action and print the new spec");
  step->add_option("spec", spec_path, "Spec file, or - for stdin")->required();
  step->add_option("--do", do_parts, "<scheme> <actor> <target>")->expected(3)->required();

  auto* sim = app.add_subcommand("simulate", "Apply a script of actions and print every state");
  sim->add_option("spec", spec_path)->required();
  sim->add_option("script", script_path)->required();

  auto* rpl = app.add_subcommand("repl", "Interactive stepping");
  rpl->add_option("spec", spec_path)->required();

  auto* query = app.add_subcommand("query", "access | holders <perm>");
  query->add_option("spec", spec_path)->required();
  query->add_option("kind", query_kind)->required()->check(CLI::IsMember({"access", "holders"}));
  query->add_option("permission", query_perm);
  query->add_option("--mode", query_mode, "Chains counted for holders")
      ->check(CLI::IsMember({"all", "active"}))
      ->capture_default_str();

  VerifyParams vp;
  std::string invariant_name;
  std::size_t exhaustive_depth = 0, random_samples = 0;
  bool arbitrary = false, serial = false;
  auto* verify = app.add_subcommand("verify", "Check that every valid step preserves an invariant");
  verify->add_option("spec", spec_path, "Explore from this state (exhaustive only)");
  verify->add_option("--n", vp.n, "Principal count")->capture_default_str();
  verify->add_option("--invariant", invariant_name)
      ->required()
      ->check(CLI::IsMember({"connectivity", "active-connectivity"}));
  auto* ex = verify->add_option("--exhaustive", exhaustive_depth, "Depth bound");
  auto* rnd = verify->add_option("--random", random_samples, "Sample count");
  ex->excludes(rnd);
  verify->add_option("--seed", vp.seed)->capture_default_str();
  verify->add_option("--depth", vp.depth, "Longest random trace")->capture_default_str();
  verify->add_flag("--arbitrary", arbitrary, "Sample arbitrary states instead of reachable ones");
  verify->add_option("--cap", vp.state_cap, "State-count cap")->capture_default_str();
  verify->add_flag("--serial", serial, "Use the serial reference");

  std::string actor, goal_text;
  auto* pln = app.add_subcommand("plan", "Actions of one actor that reach a goal, cheapest first");
  pln->add_option("spec", spec_path)->required();
  pln->add_option("--actor", actor)->required();
  pln->add_option("--goal", goal_text)->required();

  bool dot = false;
  auto* exp = app.add_subcommand("export", "Render a spec");
  exp->add_option("spec", spec_path)->required();
  exp->add_flag("--dot", dot, "Graphviz DOT")->required();

  std::vector<std::string> argv_store{"deleg"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    auto load = [&] { return parse_spec(read_file(spec_path, in)); };

    if (*step) {
      auto state = load();
      Action action = make_action(do_parts);
      auto result = step_or_fail(state, action);
      if (opt.structured()) {
        out << render(document("step", {{"action", to_json(action)},
                                        {"delta", to_json(result.delta)},
                                        {"state", to_json(result.state)}}));
      } else {
        out << serialize_spec(result.state);
        err << delta_text(result.delta, "");
      }
      return kExitOk;
    }

    if (*sim) {
      auto state = load();
      auto script = parse_script(read_file(script_path, in));
      Json states = Json::array({to_json(state)});
      Json steps = Json::array();
      std::string text = "# state 0\n" + serialize_spec(state);
      for (std::size_t k = 0; k < script.size(); ++k) {
        StepResult result;
        try {
          result = step_or_fail(state, script[k]);
        } catch (const DomainFailure& e) {
          throw DomainFailure(e.code, "step " + std::to_string(k) + ": " + e.what());
        }
        state = result.state;
        states.push_back(to_json(state));
        steps.push_back({{"index", k + 1}, {"action", to_json(script[k])}, {"delta", to_json(result.delta)}});
        text += "# step " + std::to_string(k + 1) + ": do " + to_string(script[k]) + "\n" +
                delta_text(result.delta, "# ") + "# state " + std::to_string(k + 1) + "\n" +
                serialize_spec(state);
      }
      emit(out, opt, document("trace", {{"states", states}, {"steps", steps}}), text);
      return kExitOk;
    }

    if (*rpl) return repl(load(), in, out, opt);

    if (*query) {
      auto state = load();
      if (query_kind == "access") {
        auto names = query_access(state);
        emit(out, opt, document("query", {{"query", "access"}, {"principals", names}}), names_line(names));
        return kExitOk;
      }
      auto perm = parse_permission(query_perm);
      if (!perm) throw UsageError("holders needs a permission (TT, TF, FT or FF)");
      auto names = query_holders(state, *perm, query_mode == "all" ? ChainMode::All : ChainMode::ActiveOnly);
      emit(out, opt,
           document("query", {{"query", "holders"}, {"permission", to_string(*perm)},
                              {"mode", query_mode}, {"principals", names}}),
           names_line(names));
      return kExitOk;
    }

    if (*verify) {
      vp.invariant = *parse_invariant(invariant_name);
      if (*ex) {
        vp.mode = VerifyMode::Exhaustive;
        vp.depth = exhaustive_depth;
      } else if (*rnd) {
        vp.mode = arbitrary ? VerifyMode::RandomArbitrary : VerifyMode::Random;
        vp.samples = random_samples;
      } else {
        throw UsageError("verify needs --exhaustive <depth> or --random <samples>");
      }
      if (!spec_path.empty()) {
        if (vp.mode != VerifyMode::Exhaustive) throw UsageError("a start spec needs --exhaustive");
        vp.start = load();
        vp.n = vp.start->principals().size();
      }
      if (vp.n == 0) throw UsageError("--n must be at least 1");
      InvariantReport report;
      try {
        report = serial ? verify_step_invariant_serial(vp) : verify_step_invariant(vp);
      } catch (const ResourceBoundExceeded& e) {
        throw DomainFailure("resource-bound-exceeded", e.what());
      } catch (const NonTotalModel& e) {
        throw DomainFailure("non-total-model", e.what());
      }
      std::ostringstream text;
      text << (report.holds ? "HOLDS" : "COUNTEREXAMPLE") << " " << to_string(vp.invariant) << " "
           << to_string(vp.mode) << " n=" << vp.n;
      if (vp.mode == VerifyMode::Exhaustive) {
        text << " depth=" << vp.depth;
      } else {
        text << " samples=" << vp.samples << " seed=" << vp.seed << " depth=" << vp.depth;
      }
      text << " states=" << report.states_checked << " steps=" << report.steps_checked;
      if (vp.mode == VerifyMode::RandomArbitrary) {
        text << " rejected=" << report.states_rejected << " non_total=" << report.non_total_steps;
      }
      text << "\n";
      if (report.witness) {
        const auto& w = *report.witness;
        text << "# violation: " << to_string(w.violation) << "\n# after: do " << to_string(w.action)
             << "\n# trace:\n" << serialize_script(w.trace) << "# state:\n" << serialize_spec(w.state);
      }
      emit(out, opt, document("report", to_json(report)), text.str());
      return report.holds ? kExitOk : kExitDomain;
    }

    if (*pln) {
      auto state = load();
      Goal goal = parse_goal(goal_text);
      if (!state.has_principal(actor)) throw DomainFailure("unknown-principal", "unknown principal " + actor);
      std::vector<PlanResult> results;
      try {
        results = plan(state, actor, goal);
      } catch (const GoalError& e) {
        throw DomainFailure("unknown-principal-in-goal", e.what());
      }
      Json list = Json::array();
      std::string text;
      for (const auto& r : results) {
        list.push_back(to_json(r));
        text += std::to_string(r.cost) + " do " + to_string(r.action) + "\n";
      }
      emit(out, opt, document("plan", {{"actor", actor}, {"goal", to_string(goal)}, {"results", list}}), text);
      return kExitOk;
    }

    if (*exp) {
      auto text = export_dot(load());
      emit(out, opt, document("dot", {{"dot", text}}), text);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    emit(err, opt, error_document("usage", e.what()), std::string("error: ") + e.what() + "\n");
    return kExitUsage;
  } catch (const ParseError& e) {
    emit(err, opt, error_document(to_string(e.kind()), e.what()), std::string("error: ") + e.what() + "\n");
    return kExitUsage;
  } catch (const DomainFailure& e) {
    emit(err, opt, error_document(e.code, e.what()), std::string("error: ") + e.what() + "\n");
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace deleg
