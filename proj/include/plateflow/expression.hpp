#pragma once

#include <memory>
#include <string>

#include "plateflow/spectral_field.hpp"

namespace plateflow {

/// Closed-form real expression over t, x1, x2, x3 with + - * / ^, unary minus,
/// sin, cos, exp and the constant pi.
///
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?
///   atom   := number | name | name '(' expr ')' | '(' expr ')'
class Expression {
 public:
  struct Node;

  /// Throws Error(parse) with "column N" of the offending token.
  static Expression parse(const std::string& text);

  double operator()(double t, double x1, double x2, double x3) const;
  const std::string& text() const { return text_; }
  bool is_zero() const;
  bool uses_x3() const;
  bool is_constant() const;

  /// Throws Error(periodicity) naming the first non-periodic sub-term (innermost
  /// function call, else the whole expression) when the value changes under
  /// t -> t + T or x_i -> x_i + L.
  void check_periodic(double period_t, double period_x) const;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

/// Constant expression (no variables), e.g. "2*pi".
double evaluate_constant(const std::string& text);

/// Samples on the grid and transforms; scalar expressions per component.
SpectralField sample_expression(const TorusGrid& grid, const Expression& e);
PlateField sample_plate_expression(const TorusGrid& grid, const Expression& e);

}  // namespace plateflow
