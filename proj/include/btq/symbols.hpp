#pragma once

// Functions on X stored by their fibrewise Fourier modes p -> f_p(x), each a
// closed-form Expression on the moment polytope.

#include "btq/expression.hpp"
#include "btq/toric_geometry.hpp"

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace btq {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;

struct Mode {
  IntVec p;
  Expression coef;
};

class Symbol {
 public:
  /// Modes must have length polytope->dim(); repeated p are rejected.
  Symbol(PolytopePtr polytope, std::vector<Mode> modes);

  const ToricPolytope& polytope() const { return *polytope_; }
  const PolytopePtr& polytope_ptr() const { return polytope_; }
  std::size_t dim() const { return polytope_->dim(); }
  /// max_p max_i |p_i| over stored modes (0 for the empty symbol).
  long long band() const { return band_; }
  const std::map<IntVec, Expression>& modes() const { return modes_; }
  std::vector<IntVec> mode_indices() const;
  const Expression* find(std::span<const long long> p) const;

  /// d^I f_p / dx^I, built once and cached (thread-safe).
  const Expression& derivative(const IntVec& p, const MultiIndex& orders) const;

  /// Pointwise value sum_p f_p(x) e^{i p.theta} at an interior point.
  Complex value(std::span<const double> x, std::span<const double> theta) const;

 private:
  struct DerivativeCache;
  PolytopePtr polytope_;
  std::map<IntVec, Expression> modes_;
  long long band_ = 0;
  std::shared_ptr<DerivativeCache> cache_;
};

/// f_p(x); zero for modes that are not stored. Throws DomainError outside P_X.
Complex eval_coef(const Symbol& sym, std::span<const long long> p, std::span<const double> x);

/// d^I f_p / dx^I at an interior point, by symbolic differentiation.
/// Throws DomainError unless x is strictly interior.
Complex eval_coef_deriv(const Symbol& sym, std::span<const long long> p,
                        std::span<const int> orders, std::span<const double> x);

using Sampler = std::function<Complex(std::span<const double> x, std::span<const double> theta)>;

/// Discrete fibrewise Fourier transform over a uniform G^n angle grid,
/// normalized by 1/G^n, returning every mode with max_i |p_i| <= band.
/// Rejects G <= 2*band.
std::map<IntVec, Complex> fft_ingest(const Sampler& sampler, long long band, int grid,
                                     std::span<const double> x, std::size_t dim);

/// Mixed partial d^I/dx^I of a scalar function by tensor-product central
/// differences with two Richardson extrapolation steps (error O(h^6)).
double richardson_derivative(const std::function<double(std::span<const double>)>& fn,
                             std::span<const double> x, std::span<const int> orders, double step);

/// Coefficient obtained by fft_ingest, with derivative access through
/// richardson_derivative only.
class SampledSymbol {
 public:
  SampledSymbol(Sampler sampler, long long band, int grid, std::size_t dim);
  Complex coef(std::span<const long long> p, std::span<const double> x) const;
  Complex coef_deriv(std::span<const long long> p, std::span<const int> orders,
                     std::span<const double> x, double step = 1e-2) const;

 private:
  Sampler sampler_;
  long long band_;
  int grid_;
  std::size_t dim_;
};

struct SmoothnessViolation {
  IntVec p;
  std::size_t facet = 0;
  std::vector<double> point;
  double value = 0.0;
};

struct SmoothnessReport {
  bool ok = true;
  std::vector<SmoothnessViolation> violations;
  /// |f_p| sampled at l_F = 1e-2, 1e-4, 1e-6, 1e-8 (diagnostic only), per checked
  /// (mode, facet) pair in check order.
  std::vector<std::vector<double>> approach;
};

/// For every stored mode p and facet F with <p, nu_F> != 0, evaluates f_p at
/// points of the facet's relative interior and flags |f_p| > tolerance.
SmoothnessReport smoothness_check(const Symbol& sym, double tolerance = 1e-6);

/// [m] = prod_{m_i != 0} 2 pi |m_i|.
double mode_weight(std::span<const long long> m);

/// prod_{F : <p,nu_F> != 0} l_F^{|<p,nu_F>|/2}: the vanishing profile that makes
/// e^{i p.theta} times it smooth on X.
Expression smooth_profile(const ToricPolytope& polytope, std::span<const long long> p);

/// Pointwise product via mode convolution.
Symbol multiply(const Symbol& f, const Symbol& g);

/// Symbol from (p, expression text) pairs.
Symbol parse_symbol(const PolytopePtr& polytope,
                    const std::vector<std::pair<IntVec, std::string>>& modes);

/// All multi-indices of total order r in n variables, lexicographic.
std::vector<MultiIndex> multi_indices(std::size_t n, int r);
/// I! as an exact integer (|I| <= 20).
long long multi_factorial(std::span<const int> orders);
/// q^I.
double multi_power(std::span<const long long> q, std::span<const int> orders);

}  // namespace btq
