#pragma once

// A small expression language for Finsler functions and projective factors.
//
//   expr     := term { ("+"|"-") term }
//   term     := unary { ("*"|"/") unary }
//   unary    := "-" unary | power
//   power    := atom [ "^" exponent ]
//   exponent := [ "-" ] integer [ "^" exponent ]
//   atom     := number | "x"k | "y"k | "F" | "sqrt" "(" expr ")" | "(" expr ")"
//
// Exponents are integers; a chained exponent folds to the right. "F" names
// the active metric's Finsler function and is only legal in candidate
// expressions.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "funk/field.hpp"

namespace funk::expr {

enum class Op { Number, VarX, VarY, Metric, Add, Sub, Mul, Div, Neg, Pow, Sqrt };

struct Node;
using Ast = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Number;
  double number = 0.0;  // Number
  int index = 0;        // VarX / VarY, zero-based
  int exponent = 0;     // Pow
  Ast lhs;              // unary operand, or left operand
  Ast rhs;
};

Ast number(double v);
Ast var_x(int index);
Ast var_y(int index);
Ast metric();
Ast binary(Op op, Ast lhs, Ast rhs);
Ast negate(Ast operand);
Ast power(Ast base, int exponent);
Ast sqrt(Ast operand);

/// Parses `source` for dimension n. Throws ParseError carrying the byte
/// offset of the offending token.
Ast parse(std::string_view source, int n, bool allow_metric);

/// Infix form with minimal parentheses; parse(to_string(a)) reproduces a.
std::string to_string(const Ast& ast);
/// Fully parenthesized prefix form, e.g. "(+ (^ y1 2) (* x1 y2))".
std::string to_sexpr(const Ast& ast);

bool mentions_metric(const Ast& ast);
bool structurally_equal(const Ast& a, const Ast& b);

/// Plain floating-point evaluation. `metric_value` supplies F when the
/// expression mentions it.
double evaluate(const Ast& ast, std::span<const double> x, std::span<const double> y,
                std::optional<double> metric_value = std::nullopt);

/// Builds a jet-evaluable field. Throws CompileError if the expression uses F
/// and no binding is given.
ScalarField compile(const Ast& ast, const std::optional<ScalarField>& metric_binding = std::nullopt,
                    std::optional<int> degree = std::nullopt);

}  // namespace funk::expr
