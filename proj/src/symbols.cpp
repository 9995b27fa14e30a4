#include "btq/symbols.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>

namespace btq {

struct Symbol::DerivativeCache {
  std::shared_mutex mutex;
  std::map<std::pair<IntVec, MultiIndex>, Expression> entries;
};

Symbol::Symbol(PolytopePtr polytope, std::vector<Mode> modes)
    : polytope_(std::move(polytope)), cache_(std::make_shared<DerivativeCache>()) {
  if (!polytope_) throw std::invalid_argument("symbol needs a polytope");
  for (auto& mode : modes) {
    if (mode.p.size() != polytope_->dim()) {
      throw std::invalid_argument("mode index has wrong dimension");
    }
    for (long long v : mode.p) band_ = std::max(band_, std::llabs(v));
    if (!modes_.emplace(mode.p, std::move(mode.coef)).second) {
      throw std::invalid_argument("mode listed twice");
    }
  }
}

std::vector<IntVec> Symbol::mode_indices() const {
  std::vector<IntVec> out;
  for (const auto& [p, coef] : modes_) out.push_back(p);
  return out;
}

const Expression* Symbol::find(std::span<const long long> p) const {
  auto it = modes_.find(IntVec(p.begin(), p.end()));
  return it == modes_.end() ? nullptr : &it->second;
}

const Expression& Symbol::derivative(const IntVec& p, const MultiIndex& orders) const {
  const auto key = std::make_pair(p, orders);
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->entries.find(key);
    if (it != cache_->entries.end()) return it->second;
  }
  auto base = modes_.find(p);
  if (base == modes_.end()) throw std::invalid_argument("derivative of a mode that is not stored");
  Expression d = base->second.diff(orders);
  std::unique_lock lock(cache_->mutex);
  return cache_->entries.emplace(key, std::move(d)).first->second;
}

Complex Symbol::value(std::span<const double> x, std::span<const double> theta) const {
  if (!polytope_->contains(x)) throw DomainError("point outside the moment polytope");
  Complex total = 0.0;
  for (const auto& [p, coef] : modes_) {
    double phase = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) phase += static_cast<double>(p[i]) * theta[i];
    total += coef.eval(x) * std::polar(1.0, phase);
  }
  return total;
}

Complex eval_coef(const Symbol& sym, std::span<const long long> p, std::span<const double> x) {
  if (!sym.polytope().contains(x)) throw DomainError("point outside the moment polytope");
  const Expression* coef = sym.find(p);
  if (coef == nullptr) return 0.0;
  return coef->eval(x);
}

Complex eval_coef_deriv(const Symbol& sym, std::span<const long long> p,
                        std::span<const int> orders, std::span<const double> x) {
  if (!sym.polytope().interior(x)) {
    throw DomainError("coefficient derivatives exist only at interior points");
  }
  if (sym.find(p) == nullptr) return 0.0;
  return sym.derivative(IntVec(p.begin(), p.end()), MultiIndex(orders.begin(), orders.end()))
      .eval(x);
}

// ---------------------------------------------------------------------------

namespace {

std::mutex fftw_planner_mutex;

std::vector<IntVec> box_modes(std::size_t dim, long long band) {
  std::vector<IntVec> out;
  IntVec p(dim, -band);
  while (true) {
    out.push_back(p);
    std::size_t i = dim;
    while (true) {
      if (i == 0) return out;
      --i;
      if (p[i] < band) {
        ++p[i];
        break;
      }
      p[i] = -band;
    }
  }
}

}  // namespace

std::map<IntVec, Complex> fft_ingest(const Sampler& sampler, long long band, int grid,
                                     std::span<const double> x, std::size_t dim) {
  if (band < 0) throw std::invalid_argument("band must be nonnegative");
  if (grid <= 2 * band) {
    throw std::invalid_argument("grid size G must exceed 2*band (G=" + std::to_string(grid) +
                                ", band=" + std::to_string(band) + ")");
  }
  if (dim == 0 || x.size() != dim) throw std::invalid_argument("point has wrong dimension");

  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= static_cast<std::size_t>(grid);

  // Row-major sample array over theta_j = 2 pi idx_j / G.
  std::vector<fftw_complex> data(total);
  std::vector<double> theta(dim, 0.0);
  std::vector<int> idx(dim, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t j = dim; j-- > 0;) {
      idx[j] = static_cast<int>(rem % static_cast<std::size_t>(grid));
      rem /= static_cast<std::size_t>(grid);
      theta[j] = 2.0 * std::numbers::pi * idx[j] / grid;
    }
    const Complex v = sampler(x, theta);
    data[flat][0] = v.real();
    data[flat][1] = v.imag();
  }

  std::vector<int> dims(dim, grid);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex);
    plan = fftw_plan_dft(static_cast<int>(dim), dims.data(), data.data(), data.data(),
                         FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex);
    fftw_destroy_plan(plan);
  }

  const double norm = 1.0 / static_cast<double>(total);
  std::map<IntVec, Complex> out;
  for (const auto& p : box_modes(dim, band)) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < dim; ++j) {
      const long long wrapped = ((p[j] % grid) + grid) % grid;
      flat = flat * static_cast<std::size_t>(grid) + static_cast<std::size_t>(wrapped);
    }
    out.emplace(p, Complex(data[flat][0], data[flat][1]) * norm);
  }
  return out;
}

namespace {

// Central-difference stencils for d^a/dx^a with O(h^2) error.
std::vector<std::pair<int, double>> stencil(int order) {
  switch (order) {
    case 0:
      return {{0, 1.0}};
    case 1:
      return {{-1, -0.5}, {1, 0.5}};
    case 2:
      return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    case 3:
      return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    case 4:
      return {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}};
    default:
      throw std::invalid_argument("finite differences support per-axis order <= 4");
  }
}

double central_difference(const std::function<double(std::span<const double>)>& fn,
                          std::span<const double> x, std::span<const int> orders, double h) {
  const std::size_t n = x.size();
  std::vector<std::vector<std::pair<int, double>>> axes;
  int total_order = 0;
  for (std::size_t i = 0; i < n; ++i) {
    axes.push_back(stencil(orders[i]));
    total_order += orders[i];
  }
  std::vector<std::size_t> pos(n, 0);
  std::vector<double> point(x.begin(), x.end());
  double sum = 0.0;
  while (true) {
    double weight = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& [offset, w] = axes[i][pos[i]];
      point[i] = x[i] + offset * h;
      weight *= w;
    }
    sum += weight * fn(point);
    std::size_t i = n;
    while (true) {
      if (i == 0) return sum / std::pow(h, total_order);
      --i;
      if (++pos[i] < axes[i].size()) break;
      pos[i] = 0;
    }
  }
}

}  // namespace

double richardson_derivative(const std::function<double(std::span<const double>)>& fn,
                             std::span<const double> x, std::span<const int> orders,
                             double step) {
  if (orders.size() != x.size()) throw std::invalid_argument("multi-index has wrong dimension");
  const double d1 = central_difference(fn, x, orders, step);
  const double d2 = central_difference(fn, x, orders, 0.5 * step);
  const double d4 = central_difference(fn, x, orders, 0.25 * step);
  const double r1 = (4.0 * d2 - d1) / 3.0;
  const double r2 = (4.0 * d4 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

SampledSymbol::SampledSymbol(Sampler sampler, long long band, int grid, std::size_t dim)
    : sampler_(std::move(sampler)), band_(band), grid_(grid), dim_(dim) {
  if (grid_ <= 2 * band_) throw std::invalid_argument("grid size G must exceed 2*band");
}

Complex SampledSymbol::coef(std::span<const long long> p, std::span<const double> x) const {
  for (long long v : p) {
    if (std::llabs(v) > band_) return 0.0;
  }
  const auto modes = fft_ingest(sampler_, band_, grid_, x, dim_);
  return modes.at(IntVec(p.begin(), p.end()));
}

Complex SampledSymbol::coef_deriv(std::span<const long long> p, std::span<const int> orders,
                                  std::span<const double> x, double step) const {
  auto part = [&](bool imag) {
    return richardson_derivative(
        [&](std::span<const double> y) {
          const Complex c = coef(p, y);
          return imag ? c.imag() : c.real();
        },
        x, orders, step);
  };
  return {part(false), part(true)};
}

// ---------------------------------------------------------------------------

SmoothnessReport smoothness_check(const Symbol& sym, double tolerance) {
  const ToricPolytope& polytope = sym.polytope();
  const auto& facets = polytope.facets();
  const std::size_t n = polytope.dim();

  std::vector<double> centre(n, 0.0);
  for (const auto& chart : polytope.charts()) {
    for (std::size_t i = 0; i < n; ++i) centre[i] += to_double(chart.vertex[i]);
  }
  for (double& c : centre) c /= static_cast<double>(polytope.charts().size());

  SmoothnessReport report;
  for (const auto& [p, coef] : sym.modes()) {
    for (std::size_t f = 0; f < facets.size(); ++f) {
      if (facets[f].pairing(p) == 0) continue;

      // Facet centroid and midpoints towards its vertices: relative interior points.
      std::vector<std::vector<double>> facet_vertices;
      for (const auto& chart : polytope.charts()) {
        if (!std::binary_search(chart.facets.begin(), chart.facets.end(), f)) continue;
        std::vector<double> v;
        for (const auto& c : chart.vertex) v.push_back(to_double(c));
        facet_vertices.push_back(std::move(v));
      }
      std::vector<double> centroid(n, 0.0);
      for (const auto& v : facet_vertices)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += v[i];
      for (double& c : centroid) c /= static_cast<double>(facet_vertices.size());
      std::vector<std::vector<double>> samples{centroid};
      if (facet_vertices.size() > 1) {
        for (const auto& v : facet_vertices) {
          std::vector<double> mid(n);
          for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (centroid[i] + v[i]);
          samples.push_back(std::move(mid));
        }
      }

      for (const auto& point : samples) {
        double value = 0.0;
        try {
          value = std::abs(coef.eval(point));
        } catch (const DomainError&) {
          value = std::numeric_limits<double>::infinity();
        }
        if (!(value <= tolerance)) {
          report.ok = false;
          report.violations.push_back({p, f, point, value});
        }
      }

      // Approach along the segment to the polytope centre.
      const double l_centre = facets[f].eval(centre);
      std::vector<double> trail;
      for (double target : {1e-2, 1e-4, 1e-6, 1e-8}) {
        const double t = target / l_centre;
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = centroid[i] + t * (centre[i] - centroid[i]);
        try {
          trail.push_back(std::abs(coef.eval(y)));
        } catch (const DomainError&) {
          trail.push_back(std::numeric_limits<double>::infinity());
        }
      }
      report.approach.push_back(std::move(trail));
    }
  }
  return report;
}

double mode_weight(std::span<const long long> m) {
  double w = 1.0;
  for (long long v : m) {
    if (v != 0) w *= 2.0 * std::numbers::pi * static_cast<double>(std::llabs(v));
  }
  return w;
}

Expression smooth_profile(const ToricPolytope& polytope, std::span<const long long> p) {
  Expression out = Expression::constant(1.0);
  const auto& facets = polytope.facets();
  for (std::size_t f = 0; f < facets.size(); ++f) {
    const long long pairing = std::llabs(facets[f].pairing(p));
    if (pairing == 0) continue;
    std::vector<double> c;
    for (long long v : facets[f].normal) c.push_back(static_cast<double>(v));
    const Expression l = Expression::affine(std::move(c), to_double(facets[f].offset()),
                                            "lF" + std::to_string(f + 1));
    out = out * Expression::pow(l, Rational(pairing, 2));
  }
  return out;
}

Symbol multiply(const Symbol& f, const Symbol& g) {
  std::map<IntVec, Expression> acc;
  for (const auto& [p, fp] : f.modes()) {
    for (const auto& [q, gq] : g.modes()) {
      IntVec s(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) s[i] = p[i] + q[i];
      auto [it, inserted] = acc.try_emplace(s, fp * gq);
      if (!inserted) it->second = it->second + fp * gq;
    }
  }
  std::vector<Mode> modes;
  for (auto& [p, e] : acc) modes.push_back({p, std::move(e)});
  return Symbol(f.polytope_ptr(), std::move(modes));
}

Symbol parse_symbol(const PolytopePtr& polytope,
                    const std::vector<std::pair<IntVec, std::string>>& modes) {
  std::vector<Mode> out;
  for (const auto& [p, text] : modes) out.push_back({p, parse_expression(text, *polytope)});
  return Symbol(polytope, std::move(out));
}

std::vector<MultiIndex> multi_indices(std::size_t n, int r) {
  std::vector<MultiIndex> out;
  MultiIndex current(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n) {
      current[i] = left;
      out.push_back(current);
      return;
    }
    for (int a = 0; a <= left; ++a) {
      current[i] = a;
      rec(i + 1, left - a);
    }
  };
  if (n == 0) return out;
  rec(0, r);
  return out;
}

long long multi_factorial(std::span<const int> orders) {
  long long out = 1;
  for (int a : orders) {
    if (a < 0 || a > 20) throw std::invalid_argument("multi-index entry out of range");
    for (int j = 2; j <= a; ++j) out *= j;
  }
  return out;
}

double multi_power(std::span<const long long> q, std::span<const int> orders) {
  double out = 1.0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    for (int j = 0; j < orders[i]; ++j) out *= static_cast<double>(q[i]);
  }
  return out;
}

}  // namespace btq
