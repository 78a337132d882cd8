#include "deleg/spec_format.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

namespace deleg {

ParseError::ParseError(Kind kind, std::size_t line, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) +
                         (line ? " (line " + std::to_string(line) + ")" : std::string()) + ": " +
                         detail),
      kind_(kind),
      line_(line) {}

std::string_view to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Syntax: return "syntax-error";
    case ParseError::Kind::UnknownPrincipal: return "unknown-principal";
    case ParseError::Kind::DuplicateSoa: return "duplicate-soa";
    case ParseError::Kind::Structural: return "structural-error";
  }
  return "parse-error";
}

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    pos = end + 1;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::istringstream in{std::string(raw)};
    Line line{number, {}};
    for (std::string tok; in >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
    if (end == text.size()) break;
  }
  return out;
}

[[noreturn]] void syntax(std::size_t line, const std::string& detail) {
  throw ParseError(ParseError::Kind::Syntax, line, detail);
}

}  // namespace

AuthorizationState parse_spec(std::string_view text) {
  std::optional<std::string> soa;
  std::vector<std::string> principals;
  std::vector<Authorization> positive;
  std::vector<NegativeAuthorization> negative;
  // Line of each reference, for unknown-principal reporting.
  std::vector<std::pair<std::string, std::size_t>> references;

  for (const auto& line : tokenize(text)) {
    const auto& t = line.tokens;
    const std::string& head = t[0];
    if (head == "soa") {
      if (t.size() != 2) syntax(line.number, "expected: soa <name>");
      if (soa) throw ParseError(ParseError::Kind::DuplicateSoa, line.number, t[1]);
      soa = t[1];
    } else if (head == "principal") {
      if (t.size() != 2) syntax(line.number, "expected: principal <name>");
      principals.push_back(t[1]);
    } else if (head == "auth") {
      if (t.size() != 4 && t.size() != 5) {
        syntax(line.number, "expected: auth <grantor> <grantee> <perm> [inactive]");
      }
      auto perm = parse_permission(t[3]);
      if (!perm) syntax(line.number, "bad permission '" + t[3] + "'");
      if (t.size() == 5 && t[4] != "inactive") syntax(line.number, "unexpected '" + t[4] + "'");
      positive.push_back({t[1], t[2], *perm, t.size() == 4});
      references.emplace_back(t[1], line.number);
      references.emplace_back(t[2], line.number);
    } else if (head == "neg") {
      if (t.size() != 3) syntax(line.number, "expected: neg <grantor> <grantee>");
      negative.push_back({t[1], t[2]});
      references.emplace_back(t[1], line.number);
      references.emplace_back(t[2], line.number);
    } else {
      syntax(line.number, "unknown directive '" + head + "'");
    }
  }

  if (!soa) throw ParseError(ParseError::Kind::Structural, 0, "missing soa line");
  // The soa is a principal whether or not it is also declared.
  principals.erase(std::remove(principals.begin(), principals.end(), *soa), principals.end());
  principals.push_back(*soa);
  std::vector<std::string> known = principals;
  std::sort(known.begin(), known.end());
  for (const auto& [name, number] : references) {
    if (!std::binary_search(known.begin(), known.end(), name)) {
      throw ParseError(ParseError::Kind::UnknownPrincipal, number, name);
    }
  }

  AuthorizationState state(*soa, std::move(principals), std::move(positive), std::move(negative));
  auto errors = validate_state(state);
  if (!errors.empty()) {
    const auto& e = errors.front();
    throw ParseError(ParseError::Kind::Structural, 0,
                     std::string(to_string(e.kind)) + ": " + e.detail);
  }
  return state;
}

std::string serialize_spec(const AuthorizationState& state) {
  std::string out = "soa " + state.soa() + "\n";
  for (const auto& p : state.principals()) {
    if (p != state.soa()) out += "principal " + p + "\n";
  }
  for (const auto& a : state.positive()) {
    out += "auth " + a.grantor + " " + a.grantee + " " + std::string(to_string(a.permission));
    out += a.active ? "\n" : " inactive\n";
  }
  for (const auto& n : state.negative()) out += "neg " + n.grantor + " " + n.grantee + "\n";
  return out;
}

std::vector<Action> parse_script(std::string_view text) {
  std::vector<Action> out;
  for (const auto& line : tokenize(text)) {
    const auto& t = line.tokens;
    if (t[0] != "do" || t.size() != 4) syntax(line.number, "expected: do <scheme> <actor> <target>");
    auto scheme = parse_scheme(t[1]);
    if (!scheme) syntax(line.number, "unknown scheme '" + t[1] + "'");
    out.push_back({*scheme, t[2], t[3]});
  }
  return out;
}

std::string serialize_script(const std::vector<Action>& actions) {
  std::string out;
  for (const auto& a : actions) out += "do " + to_string(a) + "\n";
  return out;
}

namespace {

class GoalReader {
 public:
  explicit GoalReader(std::string_view text) : text_(text) {}

  Goal read() {
    Goal goal;
    skip();
    if (done()) fail("empty goal");
    while (true) {
      goal.literals.push_back(literal());
      skip();
      if (done()) break;
      expect('&');
    }
    return goal;
  }

 private:
  Literal literal() {
    skip();
    bool negated = false;
    if (peek() == '!') {
      negated = true;
      ++pos_;
    }
    std::string name = word();
    if (name == "not_access" || name == "not_holds") {
      if (negated) fail("double negation");
      negated = true;
      name = name.substr(4);
    }
    expect('(');
    Literal lit;
    lit.principal = word();
    if (lit.principal.empty()) fail("missing principal");
    if (name == "holds") {
      expect(',');
      std::string perm = word();
      auto p = parse_permission(perm);
      if (!p) fail("bad permission '" + perm + "'");
      lit.permission = *p;
      lit.kind = negated ? Literal::Kind::NotHolds : Literal::Kind::Holds;
    } else if (name == "access") {
      lit.kind = negated ? Literal::Kind::NotAccess : Literal::Kind::Access;
    } else if (name == "unchanged" && !negated) {
      lit.kind = Literal::Kind::Unchanged;
    } else {
      fail("unknown literal '" + std::string(negated ? "!" : "") + name + "'");
    }
    expect(')');
    return lit;
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (!done()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' ||
          c == '&' || c == '!') {
        break;
      }
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void skip() {
    while (!done() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(ParseError::Kind::Syntax, 0,
                     "goal column " + std::to_string(pos_ + 1) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Goal parse_goal(std::string_view text) { return GoalReader(text).read(); }

}  // namespace deleg
