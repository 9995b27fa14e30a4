#pragma once

// Closed-form coefficient functions on the moment polytope: a small expression
// tree with exact symbolic differentiation.
//
// Grammar (whitespace insignificant):
//
//   expr     := term (('+' | '-') term)*
//   term     := unary ('*' unary)*
//   unary    := '-' unary | power
//   power    := primary ('^' exponent)?
//   exponent := rational | '-' rational | '(' '-'? rational ')'
//   primary  := rational | ident | func '(' expr ')' | '(' expr ')'
//   rational := digits ('/' digits)?
//   ident    := 'x' index | 'lF' index        (1-based)
//   func     := 'sin' | 'cos' | 'exp' | 'cutoff'
//
// `lFj` is the affine form l_F(x) = <x, nu_F> + lambda_F of facet j. Exponents
// that are not integers are only accepted on `lFj` bases, which are positive
// on the interior. cutoff(u) = exp(-1/u) for u > 0 and 0 otherwise.

#include "btq/rational.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace btq {

class ToricPolytope;

/// Raised when a coefficient is evaluated outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class Expression {
 public:
  enum class Kind { kConstant, kAffine, kAdd, kSub, kMul, kNeg, kPow, kSin, kCos, kExp, kCutoff };
  struct Node;

  /// The zero constant.
  Expression();

  static Expression constant(double value);
  /// sum_i coeffs[i] x^i + shift; `label` is used when printing.
  static Expression affine(std::vector<double> coeffs, double shift, std::string label = {});
  static Expression variable(std::size_t dim, std::size_t index);

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  static Expression pow(const Expression& base, const Rational& exponent);
  static Expression sin(const Expression& arg);
  static Expression cos(const Expression& arg);
  static Expression exp(const Expression& arg);
  /// j-th derivative of the smooth cutoff exp(-1/u), composed with `arg`.
  static Expression cutoff(const Expression& arg, int order = 0);

  Kind kind() const;
  bool is_zero() const;
  /// Value of a constant node; throws otherwise.
  double constant_value() const;

  /// Throws DomainError for negative bases under fractional powers and zero
  /// bases under negative powers.
  double eval(std::span<const double> x) const;

  /// Partial derivative in x^{var}.
  Expression diff(std::size_t var) const;
  /// Mixed partial for the multi-index `orders` (orders[i] derivatives in x^i).
  Expression diff(std::span<const int> orders) const;

  std::string to_string() const;
  std::size_t node_count() const;

 private:
  explicit Expression(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Parses an expression in the grammar above against the facets of `polytope`.
/// Throws std::invalid_argument with the offending position.
Expression parse_expression(std::string_view text, const ToricPolytope& polytope);

}  // namespace btq
