#include "worldfn/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace worldfn {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  std::vector<Expression::Instr> run() {
    skip_space();
    if (pos_ == text_.size()) fail("empty expression");
    expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return std::move(out_);
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("expression \"" + std::string(text_) + "\": " + what + " at offset " +
                          std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Op op) { out_.push_back({op, 0, 0}); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::add);
      } else if (accept('-')) {
        term();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Op::mul);
      } else if (accept('/')) {
        unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (accept('^')) {
      unary();
      emit(Op::pow);
    }
  }

  void primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      name();
      return;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  void number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    std::size_t used = 0;
    long double v = 0;
    try {
      v = std::stold(token, &used);
    } catch (const std::exception&) {
      fail("bad number '" + token + "'");
    }
    if (used != token.size()) fail("bad number '" + token + "'");
    out_.push_back({Op::constant, v, 0});
  }

  void name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string id(text_.substr(start, pos_ - start));

    static const std::unordered_map<std::string, Op> unary_fns = {
        {"sin", Op::sin},   {"cos", Op::cos},   {"tan", Op::tan},   {"asin", Op::asin},
        {"acos", Op::acos}, {"atan", Op::atan}, {"exp", Op::exp},   {"log", Op::log},
        {"sqrt", Op::sqrt}, {"abs", Op::abs},   {"cosh", Op::cosh}, {"sinh", Op::sinh},
        {"tanh", Op::tanh}};
    static const std::unordered_map<std::string, Op> binary_fns = {
        {"pow", Op::pow2}, {"atan2", Op::atan2}, {"min", Op::min}, {"max", Op::max}};

    skip_space();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (call) {
      if (auto it = unary_fns.find(id); it != unary_fns.end()) {
        accept('(');
        expr();
        if (!accept(')')) fail(id + "() takes one argument");
        emit(it->second);
        return;
      }
      if (auto it = binary_fns.find(id); it != binary_fns.end()) {
        accept('(');
        expr();
        if (!accept(',')) fail(id + "() takes two arguments");
        expr();
        if (!accept(')')) fail("expected ')'");
        emit(it->second);
        return;
      }
      fail("unknown function '" + id + "'");
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == id) {
        out_.push_back({Op::variable, 0, i});
        return;
      }
    }
    if (id == "pi") {
      out_.push_back({Op::constant, std::numbers::pi_v<long double>, 0});
      return;
    }
    if (id == "e") {
      out_.push_back({Op::constant, std::numbers::e_v<long double>, 0});
      return;
    }
    fail("unknown name '" + id + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
  std::vector<Expression::Instr> out_;
};

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
  Expression e;
  e.text_ = std::string(text);
  e.variables_ = std::move(variables);
  e.program_ = ExpressionParser(e.text_, e.variables_).run();

  std::size_t depth = 0;
  for (const auto& in : e.program_) {
    switch (in.op) {
      case Op::constant:
      case Op::variable:
        ++depth;
        break;
      case Op::add: case Op::sub: case Op::mul: case Op::div: case Op::pow:
      case Op::pow2: case Op::atan2: case Op::min: case Op::max:
        --depth;
        break;
      default:
        break;
    }
    e.max_stack_ = std::max(e.max_stack_, depth);
  }
  return e;
}

bool Expression::uses(std::size_t index) const {
  for (const auto& in : program_)
    if (in.op == Op::variable && in.index == index) return true;
  return false;
}

Real Expression::operator()(std::span<const Real> values) const {
  if (values.size() < variables_.size())
    throw DomainError("expression \"" + text_ + "\" needs " + std::to_string(variables_.size()) +
                      " values");
  constexpr std::size_t kInline = 32;
  Real inline_stack[kInline] = {};
  std::vector<Real> heap;
  Real* stack = inline_stack;
  if (max_stack_ > kInline) {
    heap.resize(max_stack_);
    stack = heap.data();
  }
  std::size_t top = 0;
  for (const auto& in : program_) {
    switch (in.op) {
      case Op::constant: stack[top++] = in.value; break;
      case Op::variable: stack[top++] = values[in.index]; break;
      case Op::neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::add: --top; stack[top - 1] += stack[top]; break;
      case Op::sub: --top; stack[top - 1] -= stack[top]; break;
      case Op::mul: --top; stack[top - 1] *= stack[top]; break;
      case Op::div: --top; stack[top - 1] /= stack[top]; break;
      case Op::pow:
      case Op::pow2: {
        --top;
        const Real b = stack[top];
        Real& a = stack[top - 1];
        // Small integer powers by multiplication keep full precision.
        if (b == 2) a = a * a;
        else if (b == 3) a = a * a * a;
        else a = std::pow(a, b);
        break;
      }
      case Op::atan2: --top; stack[top - 1] = std::atan2(stack[top - 1], stack[top]); break;
      case Op::min: --top; stack[top - 1] = std::min(stack[top - 1], stack[top]); break;
      case Op::max: --top; stack[top - 1] = std::max(stack[top - 1], stack[top]); break;
      case Op::sin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case Op::cos: stack[top - 1] = std::cos(stack[top - 1]); break;
      case Op::tan: stack[top - 1] = std::tan(stack[top - 1]); break;
      case Op::asin: stack[top - 1] = std::asin(stack[top - 1]); break;
      case Op::acos: stack[top - 1] = std::acos(stack[top - 1]); break;
      case Op::atan: stack[top - 1] = std::atan(stack[top - 1]); break;
      case Op::exp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case Op::log: stack[top - 1] = std::log(stack[top - 1]); break;
      case Op::sqrt: stack[top - 1] = std::sqrt(stack[top - 1]); break;
      case Op::abs: stack[top - 1] = std::fabs(stack[top - 1]); break;
      case Op::cosh: stack[top - 1] = std::cosh(stack[top - 1]); break;
      case Op::sinh: stack[top - 1] = std::sinh(stack[top - 1]); break;
      case Op::tanh: stack[top - 1] = std::tanh(stack[top - 1]); break;
    }
  }
  return stack[0];
}

}  // namespace worldfn
