#include "oracle.hpp"

#include <cctype>
#include <map>

#include "martta/lang.hpp"

namespace oracle {

namespace {

struct BinInfo {
  int prec;
  bool right;
};

const std::map<std::string, BinInfo>& binaries() {
  static const std::map<std::string, BinInfo> table{
      {"=", {2, true}},   {"+=", {2, true}},  {"-=", {2, true}},  {"||", {4, false}}, {"&&", {5, false}},
      {"==", {9, false}}, {"!=", {9, false}}, {"<", {10, false}}, {"<=", {10, false}}, {">", {10, false}},
      {">=", {10, false}}, {"+", {12, false}}, {"-", {12, false}}, {"*", {13, false}}, {"/", {13, false}},
      {"%", {13, false}},
  };
  return table;
}

bool is_prefix(const std::string& t) { return t == "++" || t == "--" || t == "-" || t == "!"; }
bool is_postfix(const std::string& t) { return t == "++" || t == "--"; }
bool is_word(const std::string& t) { return !t.empty() && (std::isalnum(static_cast<unsigned char>(t[0])) || t[0] == '_'); }

struct Parser {
  const std::vector<std::string>& toks;
  std::size_t pos = 0;
  bool bad = false;

  const std::string& peek() const {
    static const std::string end;
    return pos < toks.size() ? toks[pos] : end;
  }

  Expr fail() {
    bad = true;
    return {};
  }

  Expr primary() {
    const auto t = peek();
    if (t.empty()) return fail();
    if (t == "(") {
      ++pos;
      auto e = expr(0);
      if (peek() != ")") return fail();
      ++pos;
      return e;
    }
    if (!is_word(t)) return fail();
    ++pos;
    const bool digits = std::isdigit(static_cast<unsigned char>(t[0])) != 0;
    return Expr{digits ? Expr::Kind::Int : Expr::Kind::Name, t, {}};
  }

  Expr postfix() {
    auto e = primary();
    while (!bad) {
      if (is_postfix(peek())) {
        e = Expr{Expr::Kind::Postfix, toks[pos++], {std::move(e)}};
      } else if (peek() == "(" && e.kind == Expr::Kind::Name) {
        ++pos;
        Expr c{Expr::Kind::Call, e.text, {}};
        if (peek() != ")") {
          for (;;) {
            c.kids.push_back(expr(0));
            if (bad) return {};
            if (peek() == ",") {
              ++pos;
              continue;
            }
            break;
          }
        }
        if (peek() != ")") return fail();
        ++pos;
        e = std::move(c);
      } else {
        break;
      }
    }
    return e;
  }

  Expr unary() {
    if (is_prefix(peek())) {
      auto op = toks[pos++];
      auto operand = unary();
      return Expr{Expr::Kind::Prefix, op, {std::move(operand)}};
    }
    return postfix();
  }

  Expr expr(int min_prec) {
    auto lhs = unary();
    while (!bad) {
      auto it = binaries().find(peek());
      if (it == binaries().end() || it->second.prec < min_prec) break;
      auto op = toks[pos++];
      auto rhs = expr(it->second.right ? it->second.prec : it->second.prec + 1);
      lhs = Expr{Expr::Kind::Binary, op, {std::move(lhs), std::move(rhs)}};
    }
    return lhs;
  }
};

}  // namespace

std::string Expr::str() const {
  switch (kind) {
    case Kind::Int:
    case Kind::Name:
      return text;
    case Kind::Call: {
      std::string out = text + "(";
      for (std::size_t i = 0; i < kids.size(); ++i) out += (i ? ", " : "") + kids[i].str();
      return out + ")";
    }
    case Kind::Prefix:
      return "(" + text + " " + kids[0].str() + ")";
    case Kind::Postfix:
      return "(" + kids[0].str() + " " + text + "post)";
    case Kind::Binary:
      return "(" + kids[0].str() + " " + text + " " + kids[1].str() + ")";
  }
  return "?";
}

std::vector<std::string> tokenize(const std::string& text) {
  static const char* const two[] = {"<=", ">=", "==", "!=", "&&", "||", "++", "--", "+=", "-="};
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = text[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (std::isalnum(c) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back(text.substr(i, j - i));
      i = j;
      continue;
    }
    std::string tok(1, static_cast<char>(c));
    for (const char* t : two)
      if (text.compare(i, 2, t) == 0) tok = t;
    out.push_back(tok);
    i += tok.size();
  }
  return out;
}

std::optional<Expr> parse_tokens(const std::vector<std::string>& tokens) {
  Parser p{tokens};
  auto e = p.expr(0);
  if (p.bad || p.pos != tokens.size()) return std::nullopt;
  return e;
}

std::optional<Expr> parse(const std::string& text) { return parse_tokens(tokenize(text)); }

Expr from_model(const martta::Model& m, const martta::NodePath& raw) {
  namespace ids = martta::cpp::ids;
  auto p = m.resolve(raw);
  const auto& c = m.concept_at(p);
  if (c == ids::IntegerLiteral) return Expr{Expr::Kind::Int, std::to_string(std::get<std::int64_t>(*m.property(p, "value"))), {}};
  if (c == ids::VariableReference) {
    auto target = std::get<martta::NodePath>(*m.property(p, "target"));
    return Expr{Expr::Kind::Name, martta::cpp::declaration_name(m, target), {}};
  }
  if (c == ids::BinaryOperation)
    return Expr{Expr::Kind::Binary, m.text_property(p, "operator"),
                {from_model(m, p.child("Left")), from_model(m, p.child("Right"))}};
  if (c == ids::UnaryOperation) {
    bool prefix = std::get<bool>(*m.property(p, "prefix"));
    return Expr{prefix ? Expr::Kind::Prefix : Expr::Kind::Postfix, m.text_property(p, "operator"),
                {from_model(m, p.child("Operand"))}};
  }
  if (c == ids::Invocation) {
    auto callee = from_model(m, p.child("Callee"));
    Expr e{Expr::Kind::Call, callee.text, {}};
    for (std::size_t i = 0; i < m.cardinal_count(p); ++i) e.kids.push_back(from_model(m, p.child(i)));
    return e;
  }
  return Expr{Expr::Kind::Name, "<" + c.str() + ">", {}};
}

std::vector<std::pair<std::size_t, std::size_t>> grouping_pairs(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::vector<std::pair<std::size_t, bool>> open;
  char last = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '(') {
      bool is_call = std::isalnum(static_cast<unsigned char>(last)) || last == '_' || last == ')';
      open.emplace_back(i, !is_call);
    } else if (c == ')' && !open.empty()) {
      auto [at, grouping] = open.back();
      open.pop_back();
      if (grouping) out.emplace_back(at, i);
    }
    if (!std::isspace(static_cast<unsigned char>(c))) last = c;
  }
  return out;
}

std::string without(const std::string& text, std::pair<std::size_t, std::size_t> pair) {
  std::string out = text;
  out.erase(pair.second, 1);
  out.erase(pair.first, 1);
  return out;
}

const std::vector<std::string> kNames{"x", "y", "z", "n"};
const std::vector<std::string> kBinary{"=", "+=", "-=", "||", "&&", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/", "%"};

namespace {

template <typename T>
const T& pick(std::mt19937& rng, const std::vector<T>& from) {
  return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(rng)];
}

Expr leaf(std::mt19937& rng) {
  if (std::uniform_int_distribution<int>(0, 1)(rng)) return Expr{Expr::Kind::Int, std::to_string(rng() % 100), {}};
  return Expr{Expr::Kind::Name, pick(rng, kNames), {}};
}

}  // namespace

Expr random_tree(std::mt19937& rng, int depth) {
  if (depth <= 0 || std::uniform_int_distribution<int>(0, 9)(rng) < 2) return leaf(rng);
  int roll = std::uniform_int_distribution<int>(0, 99)(rng);
  if (roll < 65) return Expr{Expr::Kind::Binary, pick(rng, kBinary), {random_tree(rng, depth - 1), random_tree(rng, depth - 1)}};
  if (roll < 80) {
    static const std::vector<std::string> prefix{"++", "--", "-", "!"};
    return Expr{Expr::Kind::Prefix, pick(rng, prefix), {random_tree(rng, depth - 1)}};
  }
  if (roll < 90) {
    static const std::vector<std::string> postfix{"++", "--"};
    return Expr{Expr::Kind::Postfix, pick(rng, postfix), {random_tree(rng, depth - 1)}};
  }
  if (roll < 95) return Expr{Expr::Kind::Call, "g", {random_tree(rng, depth - 1)}};
  return Expr{Expr::Kind::Call, "f", {random_tree(rng, depth - 1), random_tree(rng, depth - 1)}};
}

int depth_of(const Expr& e) {
  int d = 0;
  for (const auto& k : e.kids) d = std::max(d, depth_of(k));
  return e.kids.empty() ? 0 : d + 1;
}

std::vector<std::string> random_flat(std::mt19937& rng, int max_ops) {
  std::vector<std::string> out{leaf(rng).text};
  int ops = std::uniform_int_distribution<int>(1, max_ops)(rng);
  for (int i = 0; i < ops; ++i) {
    out.push_back(pick(rng, kBinary));
    out.push_back(leaf(rng).text);
  }
  return out;
}

}  // namespace oracle
