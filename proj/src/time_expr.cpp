#include "qwalk/time_expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace qwalk {

struct TimeExpr::Node {
  enum class Kind { Number, Variable, Unary, Binary, Call } kind;
  double value = 0.0;
  std::string name;  // variable or function name
  char op = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const TimeExpr::Node>;
using Kind = TimeExpr::Node::Kind;

NodePtr make_number(double v) {
  auto n = std::make_shared<TimeExpr::Node>();
  n->kind = Kind::Number;
  n->value = v;
  return n;
}

NodePtr make_op(Kind kind, char op, std::vector<NodePtr> args, std::string name = {}) {
  auto n = std::make_shared<TimeExpr::Node>();
  n->kind = kind;
  n->op = op;
  n->name = std::move(name);
  n->args = std::move(args);
  return n;
}

bool is_function(std::string_view name) {
  return name == "sqrt" || name == "sin" || name == "cos" || name == "abs";
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExprError("expression '" + std::string(s_) + "': " + what + " at offset " +
                    std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool starts_atom() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' ||
           std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      lhs = make_op(Kind::Binary, c, {lhs, term()});
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      const char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        lhs = make_op(Kind::Binary, c, {lhs, unary()});
      } else if (starts_atom()) {
        lhs = make_op(Kind::Binary, '*', {lhs, power()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (peek() == '-') {
      ++pos_;
      return make_op(Kind::Unary, '-', {unary()});
    }
    if (peek() == '+') {
      ++pos_;
      return unary();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (peek() == '^') {
      ++pos_;
      return make_op(Kind::Binary, '^', {base, unary()});
    }
    return base;
  }

  NodePtr atom() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (peek() != ')') fail("missing ')'");
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (is_function(name)) {
        if (peek() != '(') fail(name + " needs '('");
        ++pos_;
        NodePtr arg = expr();
        if (peek() != ')') fail("missing ')'");
        ++pos_;
        return make_op(Kind::Call, 0, {arg}, name);
      }
      if (pos_ < s_.size() && s_[pos_] == '(') fail("unknown function '" + name + "'");
      if (name == "pi") return make_number(std::numbers::pi);
      auto n = std::make_shared<TimeExpr::Node>();
      n->kind = Kind::Variable;
      n->name = std::move(name);
      return n;
    }
    if (c == '\0') fail("unexpected end");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    const std::string text(s_.substr(start, pos_ - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      fail("bad number '" + text + "'");
    }
    if (used != text.size()) fail("bad number '" + text + "'");
    return make_number(v);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval(const TimeExpr::Node& n, const std::map<std::string, double, std::less<>>& vars) {
  switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::Variable: {
      auto it = vars.find(n.name);
      if (it == vars.end()) throw ExprError("unknown variable '" + n.name + "'");
      return it->second;
    }
    case Kind::Unary: return -eval(*n.args[0], vars);
    case Kind::Binary: {
      const double a = eval(*n.args[0], vars);
      const double b = eval(*n.args[1], vars);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return std::pow(a, b);
      }
    }
    case Kind::Call: {
      const double a = eval(*n.args[0], vars);
      if (n.name == "sqrt") return std::sqrt(a);
      if (n.name == "sin") return std::sin(a);
      if (n.name == "cos") return std::cos(a);
      return std::abs(a);
    }
  }
  return 0.0;
}

}  // namespace

TimeExpr::TimeExpr(std::string_view text) : text_(text), root_(Parser(text).parse()) {}
TimeExpr::~TimeExpr() = default;
TimeExpr::TimeExpr(const TimeExpr&) = default;
TimeExpr& TimeExpr::operator=(const TimeExpr&) = default;
TimeExpr::TimeExpr(TimeExpr&&) noexcept = default;
TimeExpr& TimeExpr::operator=(TimeExpr&&) noexcept = default;

double TimeExpr::evaluate(const std::map<std::string, double, std::less<>>& vars) const {
  return eval(*root_, vars);
}

}  // namespace qwalk
