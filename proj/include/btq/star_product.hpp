#pragma once

// Bidifferential operators of the toric star product
//
//   C_r(f, g) = (1 / i^r) sum_{|I| = r} (1 / I!) d^I_x f  d^I_theta g,
//
// evaluated two independent ways: by mode convolution and pointwise in
// action-angle coordinates. Both are defined on the open dense orbit only.

#include "btq/symbols.hpp"

#include <span>
#include <vector>

namespace btq {

/// Largest supported order; factorials stay exact and the formal series is
/// meaningless far beyond this at desk scale anyway.
inline constexpr int kMaxStarOrder = 12;

/// Mode `mode` of C_r(f, g) at x:
///   sum_{|I|=r} (1/I!) sum_q q^I  f_{mode-q}^{(I)}(x)  g_q(x).
Complex c_r_mode(const Symbol& f, const Symbol& g, int r, std::span<const long long> mode,
                 std::span<const double> x);

/// C_r(f, g)(x, theta) computed directly from pointwise derivatives.
Complex c_r_pointwise(const Symbol& f, const Symbol& g, int r, std::span<const double> x,
                      std::span<const double> theta);

/// {f, g} = sum_i (df/dx^i dg/dtheta^i - df/dtheta^i dg/dx^i).
Complex poisson_bracket(const Symbol& f, const Symbol& g, std::span<const double> x,
                        std::span<const double> theta);

/// f *_N g = sum_{r <= N} hbar^r C_r(f, g) with hbar kept formal: term r is a
/// Symbol whose coefficients are closed-form expressions, so it can be
/// differentiated and fed back into C_r.
struct StarTruncation {
  int order = 0;
  std::vector<Symbol> terms;

  /// sum_r hbar^r (term r)_mode(x).
  Complex coefficient(std::span<const long long> mode, std::span<const double> x,
                      double hbar) const;
};

/// Term C_r(f, g) as a Symbol.
Symbol star_term(const Symbol& f, const Symbol& g, int r);

StarTruncation star_truncate(const Symbol& f, const Symbol& g, int order);

}  // namespace btq
