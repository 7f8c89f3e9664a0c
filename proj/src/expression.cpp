#include "hqc/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hqc/errors.hpp"

namespace hqc {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  std::vector<Expression::Instr> run() {
    expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return std::move(out_);
  }

 private:
  using Op = Expression::Op;

  void fail(const char* what) const {
    std::ostringstream os;
    os << "expression '" << text_ << "': " << what << " at column " << pos_ + 1;
    throw InvalidArgument(os.str());
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

  void emit(Op op, double value = 0.0) { out_.push_back({op, value}); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::kAdd);
      } else if (accept('-')) {
        term();
        emit(Op::kSub);
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
        emit(Op::kMul);
      } else if (accept('/')) {
        unary();
        emit(Op::kDiv);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::kNeg);
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
      emit(Op::kPow);
    }
  }

  void primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "R") return emit(Op::kR);
      if (name == "P") return emit(Op::kP);
      if (name == "pi") return emit(Op::kConst, std::numbers::pi);
      Op fn;
      if (name == "sin") fn = Op::kSin;
      else if (name == "cos") fn = Op::kCos;
      else if (name == "atan") fn = Op::kAtan;
      else if (name == "exp") fn = Op::kExp;
      else {
        pos_ = start;
        fail("unknown identifier");
      }
      if (!accept('(')) fail("expected '('");
      expr();
      if (!accept(')')) fail("expected ')'");
      emit(fn);
      return;
    }
    if (accept('(')) {
      expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    fail("unexpected character");
  }

  void number() {
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    emit(Op::kConst, v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Expression::Instr> out_;
};

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.source_ = std::string(text);
  e.program_ = ExpressionParser(text).run();
  int depth = 0;
  int max_depth = 0;
  for (const Instr& in : e.program_) {
    switch (in.op) {
      case Op::kConst:
      case Op::kR:
      case Op::kP: ++depth; break;
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul:
      case Op::kDiv:
      case Op::kPow: --depth; break;
      default: break;
    }
    max_depth = std::max(max_depth, depth);
  }
  if (max_depth > 64) throw InvalidArgument("expression '" + e.source_ + "' is nested too deeply");
  return e;
}

double Expression::operator()(double R, double P) const {
  double stack[64];
  int top = -1;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::kConst: stack[++top] = in.value; break;
      case Op::kR: stack[++top] = R; break;
      case Op::kP: stack[++top] = P; break;
      case Op::kNeg: stack[top] = -stack[top]; break;
      case Op::kSin: stack[top] = std::sin(stack[top]); break;
      case Op::kCos: stack[top] = std::cos(stack[top]); break;
      case Op::kAtan: stack[top] = std::atan(stack[top]); break;
      case Op::kExp: stack[top] = std::exp(stack[top]); break;
      case Op::kAdd: --top; stack[top] += stack[top + 1]; break;
      case Op::kSub: --top; stack[top] -= stack[top + 1]; break;
      case Op::kMul: --top; stack[top] *= stack[top + 1]; break;
      case Op::kDiv: --top; stack[top] /= stack[top + 1]; break;
      case Op::kPow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
    }
  }
  return stack[top];
}

}  // namespace hqc
