#pragma once

// Arithmetic expressions in the classical coordinates R and P.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'R' | 'P' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := 'sin' | 'cos' | 'atan' | 'exp'

#include <string>
#include <string_view>
#include <vector>

namespace hqc {

class Expression {
 public:
  // Throws InvalidArgument with the offending column on a syntax error.
  static Expression parse(std::string_view text);

  double operator()(double R, double P) const;
  const std::string& source() const { return source_; }

 private:
  enum class Op { kConst, kR, kP, kAdd, kSub, kMul, kDiv, kPow, kNeg, kSin, kCos, kAtan, kExp };
  struct Instr {
    Op op;
    double value = 0.0;
  };
  friend class ExpressionParser;

  std::string source_;
  std::vector<Instr> program_;  // postfix
};

}  // namespace hqc
