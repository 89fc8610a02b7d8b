#pragma once

// Arithmetic expressions for config values: numbers, "pi", the variable "x",
// + - * / ^, parentheses, and the functions cbrt, sqrt, cos, sin, abs.
// Lengths like "cbrt(2)" and profiles like "x*(1-x)" parse through here.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace qgc {

class Expr {
 public:
  enum class Kind { Number, Pi, Var, Add, Sub, Mul, Div, Pow, Neg, Call };

  Kind kind;
  long double value = 0;           // Number
  std::string func;                // Call: cbrt | sqrt | cos | sin | abs
  std::vector<Expr> args;          // operands

  long double eval(long double x) const;
  bool depends_on_x() const;
};

// Parses the full string; throws qgc::Error with position info on bad input.
Expr parse_expression(std::string_view text);

// Convenience for constant-valued config entries ("pi/2", "cbrt(5)", "1e-3").
// Throws if the expression references x.
double eval_constant(std::string_view text);

}  // namespace qgc
