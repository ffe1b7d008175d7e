#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stefanopt {

/// Error produced while parsing an expression; position() is the 0-based
/// offset into the source text where parsing failed.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        pos_(pos) {}
  std::size_t position() const noexcept { return pos_; }

private:
  std::size_t pos_;
};

/// Error produced while evaluating an expression outside its domain
/// (division by zero, log of a nonpositive value, ...).
class EvalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parsed scalar function of `x` (arity 1) or of `x` and `t` (arity 2).
///
/// The grammar covers numeric literals, the variables, `+ - * / ^` with
/// conventional precedence (`^` right-associative), unary minus,
/// parentheses, and the functions sin, cos, exp, log, sqrt, abs.
/// Instances are immutable after parse and evaluation is deterministic:
/// the same arguments always yield the bit-identical result.
class FunctionSpec {
public:
  /// Defaults to the constant zero of arity 1.
  FunctionSpec() : source_("0"), code_{{Op::push_const, 0.0}} {}

  static FunctionSpec parse(std::string_view text, int arity);

  double operator()(double x) const;
  double operator()(double x, double t) const;

  int arity() const noexcept { return arity_; }
  const std::string& source() const noexcept { return source_; }

  /// Fully parenthesized rendering; reparsing it yields an evaluation
  /// program identical to this one.
  std::string canonical() const;

private:
  enum class Op : std::uint8_t {
    push_const,
    push_x,
    push_t,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    fn_sin,
    fn_cos,
    fn_exp,
    fn_log,
    fn_sqrt,
    fn_abs,
  };

  struct Instr {
    Op op;
    double value = 0.0;
  };

  FunctionSpec(std::string source, int arity, std::vector<Instr> code)
      : source_(std::move(source)), arity_(arity), code_(std::move(code)) {}

  double run(double x, double t) const;

  std::string source_;
  int arity_ = 1;
  std::vector<Instr> code_;

  friend struct ExprParser;
};

}  // namespace stefanopt
