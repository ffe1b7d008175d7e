#include "stefanopt/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

namespace stefanopt {

namespace {

constexpr int kMaxStack = 128;

std::string format17(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace

struct ExprParser {
  std::string_view text;
  int arity;
  std::size_t pos = 0;
  std::vector<FunctionSpec::Instr> code;
  char single_var = '\0';  // arity 1: the variable may be named x or t, not both

  using Op = FunctionSpec::Op;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos); }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool eat(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void emit(Op op, double v = 0.0) { code.push_back({op, v}); }

  // sum := product (('+'|'-') product)*
  void parse_sum() {
    parse_product();
    for (;;) {
      if (eat('+')) {
        parse_product();
        emit(Op::add);
      } else if (eat('-')) {
        parse_product();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }

  // product := factor (('*'|'/') factor)*
  void parse_product() {
    parse_factor();
    for (;;) {
      if (eat('*')) {
        parse_factor();
        emit(Op::mul);
      } else if (eat('/')) {
        parse_factor();
        emit(Op::div);
      } else {
        return;
      }
    }
  }

  // factor := '-' factor | power        (unary minus binds looser than '^',
  // power  := primary ('^' factor)?      so -x^2 means -(x^2) and 2^-3 works)
  void parse_factor() {
    if (eat('-')) {
      parse_factor();
      emit(Op::neg);
      return;
    }
    parse_power();
  }

  void parse_power() {
    parse_primary();
    if (eat('^')) {
      parse_factor();
      emit(Op::pow);
    }
  }

  void parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of expression");
    char c = text[pos];
    if (c == '(') {
      ++pos;
      parse_sum();
      if (!eat(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      parse_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      parse_identifier();
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  void parse_number() {
    double value = 0.0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail("malformed numeric literal");
    pos += static_cast<std::size_t>(ptr - begin);
    emit(Op::push_const, value);
  }

  void parse_identifier() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string name(text.substr(start, pos - start));

    static const std::array<std::pair<const char*, Op>, 6> kFunctions{{
        {"sin", Op::fn_sin},
        {"cos", Op::fn_cos},
        {"exp", Op::fn_exp},
        {"log", Op::fn_log},
        {"sqrt", Op::fn_sqrt},
        {"abs", Op::fn_abs},
    }};

    if (peek() == '(') {
      for (const auto& [fname, op] : kFunctions) {
        if (name == fname) {
          ++pos;  // '('
          parse_sum();
          if (!eat(')')) fail("expected ')' after function argument");
          emit(op);
          return;
        }
      }
      pos = start;
      fail("unknown function '" + name + "'");
    }

    if (name == "x" || name == "t") {
      if (arity >= 2) {
        emit(name == "x" ? Op::push_x : Op::push_t);
        return;
      }
      if (single_var != '\0' && single_var != name[0]) {
        pos = start;
        fail("arity-1 expression mixes the variable names x and t");
      }
      single_var = name[0];
      emit(Op::push_x);
      return;
    }
    pos = start;
    fail("unknown identifier '" + name + "'");
  }

  // Static stack-depth check so run() can use a fixed-size stack.
  void check_depth() const {
    int depth = 0;
    int max_depth = 0;
    for (const auto& in : code) {
      switch (in.op) {
        case Op::push_const:
        case Op::push_x:
        case Op::push_t:
          ++depth;
          break;
        case Op::add:
        case Op::sub:
        case Op::mul:
        case Op::div:
        case Op::pow:
          --depth;
          break;
        default:
          break;  // unary ops keep depth unchanged
      }
      max_depth = std::max(max_depth, depth);
    }
    if (max_depth > kMaxStack) throw ParseError("expression too deeply nested", 0);
  }
};

FunctionSpec FunctionSpec::parse(std::string_view text, int arity) {
  if (arity != 1 && arity != 2) throw std::invalid_argument("arity must be 1 or 2");
  ExprParser p{text, arity, 0, {}, '\0'};
  p.parse_sum();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("unexpected trailing input");
  if (p.code.empty()) p.fail("empty expression");
  p.check_depth();
  return FunctionSpec(std::string(text), arity, std::move(p.code));
}

double FunctionSpec::run(double x, double t) const {
  double stack[kMaxStack];
  int sp = 0;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::push_const:
        stack[sp++] = in.value;
        break;
      case Op::push_x:
        stack[sp++] = x;
        break;
      case Op::push_t:
        stack[sp++] = t;
        break;
      case Op::add:
        --sp;
        stack[sp - 1] += stack[sp];
        break;
      case Op::sub:
        --sp;
        stack[sp - 1] -= stack[sp];
        break;
      case Op::mul:
        --sp;
        stack[sp - 1] *= stack[sp];
        break;
      case Op::div:
        --sp;
        if (stack[sp] == 0.0) throw EvalError("division by zero in '" + source_ + "'");
        stack[sp - 1] /= stack[sp];
        break;
      case Op::pow: {
        --sp;
        double base = stack[sp - 1];
        double expo = stack[sp];
        if (base == 0.0 && expo < 0.0)
          throw EvalError("zero raised to a negative power in '" + source_ + "'");
        if (base < 0.0 && expo != std::floor(expo))
          throw EvalError("fractional power of a negative base in '" + source_ + "'");
        stack[sp - 1] = std::pow(base, expo);
        break;
      }
      case Op::neg:
        stack[sp - 1] = -stack[sp - 1];
        break;
      case Op::fn_sin:
        stack[sp - 1] = std::sin(stack[sp - 1]);
        break;
      case Op::fn_cos:
        stack[sp - 1] = std::cos(stack[sp - 1]);
        break;
      case Op::fn_exp:
        stack[sp - 1] = std::exp(stack[sp - 1]);
        break;
      case Op::fn_log:
        if (stack[sp - 1] <= 0.0)
          throw EvalError("log of a nonpositive value in '" + source_ + "'");
        stack[sp - 1] = std::log(stack[sp - 1]);
        break;
      case Op::fn_sqrt:
        if (stack[sp - 1] < 0.0)
          throw EvalError("sqrt of a negative value in '" + source_ + "'");
        stack[sp - 1] = std::sqrt(stack[sp - 1]);
        break;
      case Op::fn_abs:
        stack[sp - 1] = std::fabs(stack[sp - 1]);
        break;
    }
  }
  double result = stack[0];
  if (!std::isfinite(result)) throw EvalError("non-finite result of '" + source_ + "'");
  return result;
}

double FunctionSpec::operator()(double x) const {
  if (arity_ != 1) throw std::invalid_argument("arity mismatch: expected 2 arguments");
  return run(x, 0.0);
}

double FunctionSpec::operator()(double x, double t) const {
  if (arity_ != 2) throw std::invalid_argument("arity mismatch: expected 1 argument");
  return run(x, t);
}

std::string FunctionSpec::canonical() const {
  std::vector<std::string> st;
  auto pop = [&st]() {
    std::string s = std::move(st.back());
    st.pop_back();
    return s;
  };
  auto binary = [&](const char* sym) {
    std::string rhs = pop();
    std::string lhs = pop();
    st.push_back("(" + lhs + " " + sym + " " + rhs + ")");
  };
  auto call = [&](const char* fn) { st.back() = std::string(fn) + "(" + st.back() + ")"; };

  for (const auto& in : code_) {
    switch (in.op) {
      case Op::push_const:
        st.push_back(format17(in.value));
        break;
      case Op::push_x:
        st.push_back("x");
        break;
      case Op::push_t:
        st.push_back("t");
        break;
      case Op::add:
        binary("+");
        break;
      case Op::sub:
        binary("-");
        break;
      case Op::mul:
        binary("*");
        break;
      case Op::div:
        binary("/");
        break;
      case Op::pow:
        binary("^");
        break;
      case Op::neg:
        st.back() = "(-" + st.back() + ")";
        break;
      case Op::fn_sin:
        call("sin");
        break;
      case Op::fn_cos:
        call("cos");
        break;
      case Op::fn_exp:
        call("exp");
        break;
      case Op::fn_log:
        call("log");
        break;
      case Op::fn_sqrt:
        call("sqrt");
        break;
      case Op::fn_abs:
        call("abs");
        break;
    }
  }
  return st.back();
}

}  // namespace stefanopt
