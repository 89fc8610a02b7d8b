#include "qgc/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "qgc/core.hpp"

namespace qgc {

long double Expr::eval(long double x) const {
  switch (kind) {
    case Kind::Number: return value;
    case Kind::Pi: return kPiL;
    case Kind::Var: return x;
    case Kind::Add: return args[0].eval(x) + args[1].eval(x);
    case Kind::Sub: return args[0].eval(x) - args[1].eval(x);
    case Kind::Mul: return args[0].eval(x) * args[1].eval(x);
    case Kind::Div: return args[0].eval(x) / args[1].eval(x);
    case Kind::Pow: return std::pow(args[0].eval(x), args[1].eval(x));
    case Kind::Neg: return -args[0].eval(x);
    case Kind::Call: {
      const long double v = args[0].eval(x);
      if (func == "cbrt") return std::cbrt(v);
      if (func == "sqrt") return std::sqrt(v);
      if (func == "cos") return std::cos(v);
      if (func == "sin") return std::sin(v);
      if (func == "abs") return std::fabs(v);
      throw Error("unknown function: " + func);
    }
  }
  throw Error("corrupt expression node");
}

bool Expr::depends_on_x() const {
  if (kind == Kind::Var) return true;
  for (const Expr& a : args)
    if (a.depends_on_x()) return true;
  return false;
}

namespace {

// Recursive-descent parser with the usual precedence climbing:
//   expr := term (('+'|'-') term)*
//   term := factor (('*'|'/') factor)*
//   factor := '-' factor | power           (minus binds looser than power)
//   power := primary ('^' factor)?          (right-associative power)
//   primary := number | pi | x | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error("expression error at offset " + std::to_string(pos_) + " in \"" +
                std::string(s_) + "\": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  static Expr binary(Expr::Kind k, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = k;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = binary(Expr::Kind::Add, std::move(lhs), term());
      else if (eat('-'))
        lhs = binary(Expr::Kind::Sub, std::move(lhs), term());
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (eat('*'))
        lhs = binary(Expr::Kind::Mul, std::move(lhs), factor());
      else if (eat('/'))
        lhs = binary(Expr::Kind::Div, std::move(lhs), factor());
      else
        return lhs;
    }
  }

  Expr factor() {
    if (eat('-')) {
      Expr e;
      e.kind = Expr::Kind::Neg;
      e.args.push_back(factor());
      return e;
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (eat('^')) return binary(Expr::Kind::Pow, std::move(base), factor());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (eat('(')) {
      Expr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr number() {
    const char* begin = s_.data() + pos_;
    char* end = nullptr;
    const long double v = std::strtold(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<size_t>(end - begin);
    Expr e;
    e.kind = Expr::Kind::Number;
    e.value = v;
    return e;
  }

  Expr identifier() {
    const size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name(s_.substr(start, pos_ - start));
    if (name == "pi") {
      Expr e;
      e.kind = Expr::Kind::Pi;
      return e;
    }
    if (name == "x") {
      Expr e;
      e.kind = Expr::Kind::Var;
      return e;
    }
    if (name == "cbrt" || name == "sqrt" || name == "cos" || name == "sin" || name == "abs") {
      if (!eat('(')) fail("expected '(' after " + name);
      Expr e;
      e.kind = Expr::Kind::Call;
      e.func = name;
      e.args.push_back(expr());
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail("unknown identifier: " + name);
  }
};

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

double eval_constant(std::string_view text) {
  const Expr e = parse_expression(text);
  if (e.depends_on_x()) throw Error("expected a constant, got an x-dependent expression: " + std::string(text));
  return static_cast<double>(e.eval(0));
}

}  // namespace qgc
