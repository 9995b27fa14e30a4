#include "btq/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

namespace btq {

namespace {

IntVec add(const IntVec& a, const IntVec& b) {
  IntVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

IntVec sub(const IntVec& a, const IntVec& b) {
  IntVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

void check_same_polytope(const Symbol& f, const LatticeBasis& basis) {
  if (f.dim() != basis.polytope().dim()) {
    throw std::invalid_argument("symbol and basis live on different polytopes");
  }
}

void check_columns(const LatticeBasis& basis, std::span<const std::size_t> cols) {
  for (std::size_t c : cols) {
    if (c >= basis.size()) throw std::out_of_range("column index outside the basis");
  }
}

void check_order(int order) {
  if (order < 0 || order > kMaxStarOrder) {
    throw std::invalid_argument("truncation order must lie in 0.." +
                                std::to_string(kMaxStarOrder));
  }
}

// Distinct p + q over stored modes.
std::vector<IntVec> product_offsets(const Symbol& f, const Symbol& g) {
  std::set<IntVec> out;
  for (const auto& [p, fp] : f.modes()) {
    for (const auto& [q, gq] : g.modes()) out.insert(add(p, q));
  }
  return {out.begin(), out.end()};
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace

Matrix toeplitz_columns(const Symbol& f, const LatticeBasis& basis,
                        std::span<const std::size_t> cols) {
  check_same_polytope(f, basis);
  check_columns(basis, cols);
  const auto ncols = static_cast<std::ptrdiff_t>(cols.size());
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(basis.size()), ncols);
  const auto modes = f.mode_indices();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < ncols; ++j) {
    const IntVec& mj = basis.point(cols[j]);
    const auto x = basis.scaled_point(cols[j]);
    for (const auto& p : modes) {
      const auto row = basis.find(add(mj, p));
      if (!row) continue;
      out(static_cast<Eigen::Index>(*row), j) = f.find(p)->eval(x);
    }
  }
  return out;
}

ToeplitzMatrix build_toeplitz(const Symbol& f, const LatticeBasis& basis) {
  std::vector<std::size_t> all(basis.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return {basis.level(), toeplitz_columns(f, basis, all)};
}

Matrix projector_columns(const Matrix& q, std::span<const std::size_t> cols) {
  Matrix out(q.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (static_cast<Eigen::Index>(cols[j]) >= q.cols()) {
      throw std::out_of_range("column index outside the matrix");
    }
    out.col(static_cast<Eigen::Index>(j)) = q.col(static_cast<Eigen::Index>(cols[j]));
  }
  return out;
}

Matrix composite_columns(const Symbol& f, const Symbol& g, const LatticeBasis& basis,
                         std::span<const std::size_t> cols) {
  check_same_polytope(f, basis);
  check_same_polytope(g, basis);
  check_columns(basis, cols);
  const auto gmodes = g.mode_indices();

  // Rows of Q_g that are nonzero somewhere on `cols`.
  std::set<std::size_t> reach;
  for (std::size_t c : cols) {
    for (const auto& q : gmodes) {
      if (auto row = basis.find(add(basis.point(c), q))) reach.insert(*row);
    }
  }
  const std::vector<std::size_t> w(reach.begin(), reach.end());

  const auto ncols = static_cast<std::ptrdiff_t>(cols.size());
  Matrix qg = Matrix::Zero(static_cast<Eigen::Index>(w.size()), ncols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < ncols; ++j) {
    const IntVec& r = basis.point(cols[j]);
    const auto x = basis.scaled_point(cols[j]);
    for (const auto& q : gmodes) {
      const auto row = basis.find(add(r, q));
      if (!row) continue;
      const auto pos = std::lower_bound(w.begin(), w.end(), *row) - w.begin();
      qg(static_cast<Eigen::Index>(pos), j) = g.find(q)->eval(x);
    }
  }
  const Matrix qf = toeplitz_columns(f, basis, w);
  return qf * qg;
}

Matrix star_order_columns(const Symbol& f, const Symbol& g, int order, const LatticeBasis& basis,
                          std::span<const std::size_t> cols) {
  check_order(order);
  check_same_polytope(f, basis);
  check_columns(basis, cols);
  const auto offsets = product_offsets(f, g);
  const auto ncols = static_cast<std::ptrdiff_t>(cols.size());
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(basis.size()), ncols);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < ncols; ++j) {
    const IntVec& r = basis.point(cols[j]);
    const auto x = basis.scaled_point(cols[j]);
    for (const auto& d : offsets) {
      const auto row = basis.find(add(r, d));
      if (!row) continue;
      out(static_cast<Eigen::Index>(*row), j) = c_r_mode(f, g, order, d, x);
    }
  }
  return out;
}

Rational shift_guard(const Symbol& g, const Region& region) {
  const auto shifts = g.mode_indices();
  return shift_safety_threshold(g.polytope(), region, shifts);
}

void check_shift_guard(const Symbol& g, const LatticeBasis& basis, const Region& region) {
  const Rational delta = shift_guard(g, region);
  if (!(Rational(1, basis.level()) < delta)) {
    throw GuardError("level k=" + std::to_string(basis.level()) +
                     " violates the shift guard 1/k < " + format_rational(delta));
  }
}

std::vector<ErrorOperator> error_operators(const Symbol& f, const Symbol& g,
                                           std::span<const int> orders,
                                           const LatticeBasis& basis, const Region& region) {
  if (region.margins().size() != basis.polytope().facets().size()) {
    throw std::invalid_argument("region needs one margin per facet");
  }
  int max_order = 0;
  for (int n : orders) {
    check_order(n);
    max_order = std::max(max_order, n);
  }
  check_shift_guard(g, basis, region);

  const auto cols = region_lattice(basis, region);
  const Matrix composite = composite_columns(f, g, basis, cols);
  std::vector<Matrix> terms;
  for (int r = 0; r <= max_order; ++r) terms.push_back(star_order_columns(f, g, r, basis, cols));

  std::vector<ErrorOperator> out;
  const double hbar = basis.hbar();
  for (int n : orders) {
    ErrorOperator e{n, basis.level(), cols, composite};
    double scale = 1.0;
    for (int r = 0; r <= n; ++r) {
      e.matrix -= scale * terms[static_cast<std::size_t>(r)];
      scale *= hbar;
    }
    out.push_back(std::move(e));
  }
  return out;
}

ErrorOperator error_operator(const Symbol& f, const Symbol& g, int order,
                             const LatticeBasis& basis, const Region& region) {
  const int orders[] = {order};
  return std::move(error_operators(f, g, orders, basis, region).front());
}

Quadrature gauss_legendre(int points) {
  if (points < 1) throw std::invalid_argument("quadrature needs at least one point");
  Quadrature out;
  out.nodes.resize(static_cast<std::size_t>(points));
  out.weights.resize(static_cast<std::size_t>(points));
  const int n = points;
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // map [-1, 1] -> [0, 1]
    out.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
    out.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return out;
}

Matrix taylor_remainder(const Symbol& f, const Symbol& g, int order, const LatticeBasis& basis,
                        const Region& region, int quadrature_points) {
  check_order(order);
  check_shift_guard(g, basis, region);
  const auto cols = region_lattice(basis, region);
  const auto quad = gauss_legendre(quadrature_points);
  const auto fmodes = f.mode_indices();
  const auto gmodes = g.mode_indices();
  const auto indices = multi_indices(f.dim(), order + 1);
  const double hbar = basis.hbar();
  const double lead = (order + 1) * std::pow(hbar, order + 1);
  const std::size_t n = f.dim();

  const auto ncols = static_cast<std::ptrdiff_t>(cols.size());
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(basis.size()), ncols);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < ncols; ++j) {
    const IntVec& r = basis.point(cols[j]);
    const auto xr = basis.scaled_point(cols[j]);
    std::vector<double> y(n);
    for (const auto& q : gmodes) {
      const double gq = g.find(q)->eval(xr);
      for (const auto& p : fmodes) {
        const auto row = basis.find(add(add(r, q), p));
        if (!row) continue;
        double total = 0.0;
        for (const auto& orders : indices) {
          const double weight = multi_power(q, orders);
          if (weight == 0.0) continue;
          const Expression& d = f.derivative(p, orders);
          double integral = 0.0;
          for (std::size_t s = 0; s < quad.nodes.size(); ++s) {
            const double t = quad.nodes[s];
            for (std::size_t i = 0; i < n; ++i) {
              y[i] = hbar * (static_cast<double>(r[i]) + t * static_cast<double>(q[i]));
            }
            integral += quad.weights[s] * std::pow(1.0 - t, order) * d.eval(y);
          }
          total += weight / static_cast<double>(multi_factorial(orders)) * integral;
        }
        out(static_cast<Eigen::Index>(*row), j) += lead * total * gq;
      }
    }
  }
  return out;
}

RemainderCheck taylor_remainder_check(const Symbol& f, const Symbol& g, int order,
                                      const LatticeBasis& basis, const Region& region,
                                      int quadrature_points) {
  const auto e = error_operator(f, g, order, basis, region);
  const auto r = taylor_remainder(f, g, order, basis, region, quadrature_points);
  return {max_abs(e.matrix - r), max_abs(e.matrix)};
}

namespace {

// Vertices plus a dense grid over the bounding box of
// { <x, nu_F> + b_F >= 0 }, kept inside the set.
std::vector<std::vector<double>> grid_samples(const ToricPolytope& polytope,
                                              std::span<const Rational> offsets) {
  const auto& facets = polytope.facets();
  const auto verts = enumerate_vertices(polytope.dim(), facets, offsets);
  std::vector<std::vector<double>> out;
  if (verts.empty()) return out;
  const std::size_t n = polytope.dim();
  std::vector<double> lo(n, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
  for (const auto& v : verts) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = to_double(v.point[i]);
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
    out.push_back(std::move(p));
  }
  const auto inside = [&](const std::vector<double>& x) {
    for (std::size_t f = 0; f < facets.size(); ++f) {
      double value = to_double(offsets[f]);
      for (std::size_t i = 0; i < n; ++i) value += static_cast<double>(facets[f].normal[i]) * x[i];
      if (value < 0.0) return false;
    }
    return true;
  };
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (kRegionGrid - 1);
    }
    if (inside(x)) out.push_back(x);
    std::size_t a = 0;
    while (a < n && ++idx[a] == kRegionGrid) idx[a++] = 0;
    if (a == n) break;
  }
  return out;
}

std::vector<std::vector<double>> region_samples(const ToricPolytope& polytope,
                                                const Region& region) {
  const auto& facets = polytope.facets();
  RatVec offsets(facets.size());
  for (std::size_t i = 0; i < facets.size(); ++i) {
    offsets[i] = facets[i].offset() - region.margins()[i];
  }
  return grid_samples(polytope, offsets);
}

}  // namespace

double coefficient_sup_estimate(const Symbol& f, std::span<const long long> levels) {
  const auto& facets = f.polytope().facets();
  RatVec offsets(facets.size());
  for (std::size_t i = 0; i < facets.size(); ++i) offsets[i] = facets[i].offset();
  auto samples = grid_samples(f.polytope(), offsets);
  for (long long k : levels) {
    const auto basis = lattice_points(f.polytope_ptr(), k);
    for (std::size_t i = 0; i < basis.size(); ++i) samples.push_back(basis.scaled_point(i));
  }
  double total = 0.0;
  for (const auto& [p, coef] : f.modes()) {
    double sup = 0.0;
    for (const auto& x : samples) sup = std::max(sup, std::abs(coef.eval(x)));
    total += sup;
  }
  return total;
}

LocalityReport locality_check(const Symbol& f, const Region& region,
                              std::span<const long long> levels) {
  if (region.margins().size() != f.polytope().facets().size()) {
    throw std::invalid_argument("region needs one margin per facet");
  }
  LocalityReport report;
  auto samples = region_samples(f.polytope(), region);
  std::vector<LatticeBasis> bases;
  for (long long k : levels) {
    bases.push_back(lattice_points(f.polytope_ptr(), k));
    const auto& basis = bases.back();
    for (std::size_t i : region_lattice(basis, region)) samples.push_back(basis.scaled_point(i));
  }
  for (const auto& [p, coef] : f.modes()) {
    for (const auto& x : samples) {
      report.max_on_region = std::max(report.max_on_region, std::abs(coef.eval(x)));
    }
  }
  report.vanishes_on_region = report.max_on_region < kLocalityZero;

  for (const auto& basis : bases) {
    const auto cols = region_lattice(basis, region);
    const Matrix q = toeplitz_columns(f, basis, cols);
    LocalityLevel lv{basis.level(), cols.size(), 0.0};
    if (q.size() > 0) {
      Eigen::Index i = 0;
      Eigen::Index j = 0;
      lv.max_restricted = q.cwiseAbs().maxCoeff(&i, &j);
      if (lv.max_restricted >= kLocalityZero && !report.witness) {
        report.witness = LocalityWitness{basis.level(), basis.point(static_cast<std::size_t>(i)),
                                         basis.point(cols[static_cast<std::size_t>(j)]),
                                         lv.max_restricted};
      }
    }
    if (report.vanishes_on_region && lv.max_restricted >= kLocalityZero) {
      report.consistent = false;
    }
    report.levels.push_back(lv);
  }
  return report;
}

void write_matrix(std::ostream& out, const Matrix& a, std::size_t dim, long long level) {
  out << "toeplitz n=" << dim << " k=" << level << " size=" << a.rows() << 'x' << a.cols()
      << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ' ';
      out << a(i, j).real() << ' ' << a(i, j).imag();
    }
    out << '\n';
  }
}

MatrixDump read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("empty matrix dump");
  MatrixDump dump;
  long long rows = 0;
  long long cols = 0;
  unsigned long long dim = 0;
  if (std::sscanf(header.c_str(), "toeplitz n=%llu k=%lld size=%lldx%lld", &dim, &dump.level,
                  &rows, &cols) != 4 ||
      rows < 0 || cols < 0) {
    throw std::invalid_argument("bad matrix dump header: " + header);
  }
  dump.dim = static_cast<std::size_t>(dim);
  dump.entries.resize(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    for (long long j = 0; j < cols; ++j) {
      double re = 0.0;
      double im = 0.0;
      if (!(in >> re >> im)) throw std::invalid_argument("truncated matrix dump");
      dump.entries(i, j) = Complex(re, im);
    }
  }
  return dump;
}

namespace serial {

ToeplitzMatrix build_toeplitz(const Symbol& f, const LatticeBasis& basis) {
  check_same_polytope(f, basis);
  const std::size_t size = basis.size();
  ToeplitzMatrix out{basis.level(), Matrix::Zero(static_cast<Eigen::Index>(size),
                                                 static_cast<Eigen::Index>(size))};
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const auto x = basis.scaled_point(j);
      out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          eval_coef(f, sub(basis.point(i), basis.point(j)), x);
    }
  }
  return out;
}

ErrorOperator error_operator(const Symbol& f, const Symbol& g, int order,
                             const LatticeBasis& basis, const Region& region) {
  check_order(order);
  check_shift_guard(g, basis, region);
  const auto cols = region_lattice(basis, region);
  const Matrix qf = serial::build_toeplitz(f, basis).entries;
  const Matrix qg = serial::build_toeplitz(g, basis).entries;
  ErrorOperator out{order, basis.level(), cols, projector_columns(qf * qg, cols)};
  const double hbar = basis.hbar();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const IntVec& r = basis.point(cols[j]);
      const auto x = basis.scaled_point(cols[j]);
      const IntVec d = sub(basis.point(i), r);
      Complex total = 0.0;
      double scale = 1.0;
      for (int s = 0; s <= order; ++s) {
        total += scale * c_r_mode(f, g, s, d, x);
        scale *= hbar;
      }
      out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= total;
    }
  }
  return out;
}

}  // namespace serial

}  // namespace btq
