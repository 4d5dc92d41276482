#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qwalk {

class ExprError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Arithmetic expression over named variables, e.g. "pi/(2q)" or
/// "pi/(q*sqrt(2))". Supports + - * / ^, unary minus, parentheses, numeric
/// literals, the constant pi, sqrt/sin/cos/abs, and implicit multiplication
/// ("2q", "3pi").
class TimeExpr {
 public:
  explicit TimeExpr(std::string_view text);
  ~TimeExpr();
  TimeExpr(const TimeExpr&);
  TimeExpr& operator=(const TimeExpr&);
  TimeExpr(TimeExpr&&) noexcept;
  TimeExpr& operator=(TimeExpr&&) noexcept;

  const std::string& text() const noexcept { return text_; }

  /// Throws ExprError for unknown variables.
  double evaluate(const std::map<std::string, double, std::less<>>& vars) const;
  double operator()(double q) const { return evaluate({{"q", q}}); }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace qwalk
