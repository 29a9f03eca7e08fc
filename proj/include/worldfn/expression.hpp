#pragma once

// Small arithmetic expression language used by geometry and metric configs:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: sin cos tan asin acos atan exp log sqrt abs cosh sinh tanh
// (one argument), pow atan2 min max (two). Constants: pi, e.

#include "worldfn/core.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace worldfn {

class Expression {
 public:
  // Throws ValidationError on syntax errors and unknown names.
  static Expression parse(std::string_view text, std::vector<std::string> variables);

  // `values` is aligned with the variable list given to parse().
  Real operator()(std::span<const Real> values) const;

  const std::string& text() const { return text_; }
  const std::vector<std::string>& variables() const { return variables_; }
  // True when the expression mentions variable `index`.
  bool uses(std::size_t index) const;

  enum class Op : unsigned char {
    constant, variable, neg, add, sub, mul, div, pow,
    sin, cos, tan, asin, acos, atan, exp, log, sqrt, abs, cosh, sinh, tanh,
    pow2, atan2, min, max
  };
  struct Instr {
    Op op;
    Real value = 0;       // constant
    std::size_t index = 0;  // variable
  };

 private:
  std::string text_;
  std::vector<std::string> variables_;
  std::vector<Instr> program_;  // postfix
  std::size_t max_stack_ = 0;

  friend class ExpressionParser;
};

}  // namespace worldfn
