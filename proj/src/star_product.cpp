#include "btq/star_product.hpp"

#include <cmath>
#include <stdexcept>

namespace btq {

namespace {

void check_order(int r) {
  if (r < 0 || r > kMaxStarOrder) {
    throw std::invalid_argument("star product order must lie in 0.." +
                                std::to_string(kMaxStarOrder));
  }
}

void check_interior(const Symbol& f, std::span<const double> x) {
  if (!f.polytope().interior(x)) {
    throw DomainError("the star product is only defined over the interior of the polytope");
  }
}

Complex phase(std::span<const long long> p, std::span<const double> theta) {
  double angle = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) angle += static_cast<double>(p[i]) * theta[i];
  return std::polar(1.0, angle);
}

// d^I_x f at (x, theta).
Complex x_derivative(const Symbol& f, const MultiIndex& orders, std::span<const double> x,
                     std::span<const double> theta) {
  Complex total = 0.0;
  for (const auto& [p, coef] : f.modes()) {
    total += f.derivative(p, orders).eval(x) * phase(p, theta);
  }
  return total;
}

// d^I_theta g at (x, theta).
Complex theta_derivative(const Symbol& g, const MultiIndex& orders, std::span<const double> x,
                         std::span<const double> theta) {
  Complex total = 0.0;
  for (const auto& [q, coef] : g.modes()) {
    Complex factor = 1.0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      for (int j = 0; j < orders[i]; ++j) factor *= Complex(0.0, static_cast<double>(q[i]));
    }
    if (factor == Complex(0.0)) continue;
    total += factor * coef.eval(x) * phase(q, theta);
  }
  return total;
}

}  // namespace

Complex c_r_mode(const Symbol& f, const Symbol& g, int r, std::span<const long long> mode,
                 std::span<const double> x) {
  check_order(r);
  check_interior(f, x);
  const std::size_t n = f.dim();
  if (mode.size() != n) throw std::invalid_argument("mode has wrong dimension");
  double total = 0.0;
  IntVec shifted(n);
  for (const auto& orders : multi_indices(n, r)) {
    const double inv_fact = 1.0 / static_cast<double>(multi_factorial(orders));
    for (const auto& [q, gq] : g.modes()) {
      const double weight = multi_power(q, orders);
      if (weight == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) shifted[i] = mode[i] - q[i];
      if (f.find(shifted) == nullptr) continue;
      total += inv_fact * weight * f.derivative(shifted, orders).eval(x) * gq.eval(x);
    }
  }
  return total;
}

Complex c_r_pointwise(const Symbol& f, const Symbol& g, int r, std::span<const double> x,
                      std::span<const double> theta) {
  check_order(r);
  check_interior(f, x);
  Complex total = 0.0;
  for (const auto& orders : multi_indices(f.dim(), r)) {
    total += x_derivative(f, orders, x, theta) * theta_derivative(g, orders, x, theta) /
             static_cast<double>(multi_factorial(orders));
  }
  // 1 / i^r
  Complex unit = 1.0;
  for (int j = 0; j < r; ++j) unit *= Complex(0.0, -1.0);
  return unit * total;
}

Complex poisson_bracket(const Symbol& f, const Symbol& g, std::span<const double> x,
                        std::span<const double> theta) {
  check_interior(f, x);
  const std::size_t n = f.dim();
  Complex total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    MultiIndex e(n, 0);
    e[i] = 1;
    total += x_derivative(f, e, x, theta) * theta_derivative(g, e, x, theta) -
             theta_derivative(f, e, x, theta) * x_derivative(g, e, x, theta);
  }
  return total;
}

Symbol star_term(const Symbol& f, const Symbol& g, int r) {
  check_order(r);
  const std::size_t n = f.dim();
  std::map<IntVec, Expression> acc;
  for (const auto& orders : multi_indices(n, r)) {
    const double inv_fact = 1.0 / static_cast<double>(multi_factorial(orders));
    for (const auto& [q, gq] : g.modes()) {
      const double weight = multi_power(q, orders);
      if (weight == 0.0) continue;
      for (const auto& [p, fp] : f.modes()) {
        IntVec mode(n);
        for (std::size_t i = 0; i < n; ++i) mode[i] = p[i] + q[i];
        Expression term =
            Expression::constant(inv_fact * weight) * f.derivative(p, orders) * gq;
        if (term.is_zero()) continue;
        auto [it, inserted] = acc.try_emplace(mode, term);
        if (!inserted) it->second = it->second + term;
      }
    }
  }
  std::vector<Mode> modes;
  for (auto& [p, e] : acc) modes.push_back({p, std::move(e)});
  return Symbol(f.polytope_ptr(), std::move(modes));
}

StarTruncation star_truncate(const Symbol& f, const Symbol& g, int order) {
  check_order(order);
  StarTruncation out;
  out.order = order;
  for (int r = 0; r <= order; ++r) out.terms.push_back(star_term(f, g, r));
  return out;
}

Complex StarTruncation::coefficient(std::span<const long long> mode, std::span<const double> x,
                                    double hbar) const {
  Complex total = 0.0;
  double scale = 1.0;
  for (const auto& term : terms) {
    total += scale * eval_coef(term, mode, x);
    scale *= hbar;
  }
  return total;
}

}  // namespace btq
