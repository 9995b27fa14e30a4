#include "btq/toric_geometry.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace btq {

Rational Facet::eval(std::span<const Rational> x) const {
  Rational value = offset();
  for (std::size_t i = 0; i < normal.size(); ++i) value += x[i] * normal[i];
  return value;
}

double Facet::eval(std::span<const double> x) const {
  double value = 0.5 * static_cast<double>(twice_offset);
  for (std::size_t i = 0; i < normal.size(); ++i) {
    value += x[i] * static_cast<double>(normal[i]);
  }
  return value;
}

long long Facet::pairing(std::span<const long long> q) const {
  long long value = 0;
  for (std::size_t i = 0; i < normal.size(); ++i) value += q[i] * normal[i];
  return value;
}

namespace {

// Calls visit(subset) for every size-r subset of {0..m-1}, lexicographically.
template <typename Visit>
void for_each_subset(std::size_t m, std::size_t r, Visit&& visit) {
  if (r > m) return;
  std::vector<std::size_t> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    visit(std::span<const std::size_t>(idx));
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == m - r + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Gaussian elimination over Q. Returns nullopt when A is singular.
std::optional<RatVec> solve(std::vector<RatVec> a, RatVec b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == Rational(0)) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || a[row][col] == Rational(0)) continue;
      const Rational factor = a[row][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j) a[row][j] -= factor * a[col][j];
      b[row] -= factor * b[col];
    }
  }
  RatVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

std::size_t rank(std::vector<RatVec> rows, std::size_t cols) {
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows.size(); ++col) {
    std::size_t pivot = r;
    while (pivot < rows.size() && rows[pivot][col] == Rational(0)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[r]);
    for (std::size_t row = r + 1; row < rows.size(); ++row) {
      if (rows[row][col] == Rational(0)) continue;
      const Rational factor = rows[row][col] / rows[r][col];
      for (std::size_t j = col; j < cols; ++j) rows[row][j] -= factor * rows[r][j];
    }
    ++r;
  }
  return r;
}

// Integer determinant by Laplace expansion; n <= 3 in practice.
long long det(const std::vector<IntVec>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  long long total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<IntVec> minor;
    minor.reserve(n - 1);
    for (std::size_t r = 1; r < n; ++r) {
      IntVec row;
      row.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) row.push_back(m[r][j]);
      minor.push_back(std::move(row));
    }
    const long long term = m[0][c] * det(minor);
    total += (c % 2 == 0) ? term : -term;
  }
  return total;
}

// Generalized cross product of n-1 integer vectors in Z^n: spans their kernel
// when they are independent.
IntVec cofactor_direction(const std::vector<IntVec>& rows, std::size_t n) {
  IntVec d(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<IntVec> minor;
    for (const auto& row : rows) {
      IntVec r;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) r.push_back(row[j]);
      minor.push_back(std::move(r));
    }
    const long long value = det(minor);
    d[i] = (i % 2 == 0) ? value : -value;
  }
  return d;
}

std::vector<RatVec> to_rational_rows(std::span<const Facet> facets,
                                     std::span<const std::size_t> subset) {
  std::vector<RatVec> rows;
  for (std::size_t f : subset) {
    RatVec row;
    for (long long v : facets[f].normal) row.emplace_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

RatVec facet_offsets(std::span<const Facet> facets) {
  RatVec b;
  for (const auto& f : facets) b.push_back(f.offset());
  return b;
}

Rational eval_with_offset(const Facet& f, const Rational& offset,
                          std::span<const Rational> x) {
  Rational value = offset;
  for (std::size_t i = 0; i < f.normal.size(); ++i) value += x[i] * f.normal[i];
  return value;
}

// Corrected polytope keeps the normal fan: at every chart the vertex solved
// from the adjacent facets sits strictly inside all other half-spaces.
bool same_normal_fan(std::span<const Facet> facets,
                     const std::vector<VertexChart>& charts,
                     const RatVec& offsets) {
  for (const auto& chart : charts) {
    std::vector<RatVec> a;
    RatVec b;
    for (std::size_t f : chart.facets) {
      RatVec row;
      for (long long v : facets[f].normal) row.emplace_back(v);
      a.push_back(std::move(row));
      b.push_back(-offsets[f]);
    }
    auto x = solve(std::move(a), std::move(b));
    if (!x) return false;
    for (std::size_t f = 0; f < facets.size(); ++f) {
      if (std::binary_search(chart.facets.begin(), chart.facets.end(), f)) continue;
      if (eval_with_offset(facets[f], offsets[f], *x) <= 0) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<PolyVertex> enumerate_vertices(std::size_t dim, std::span<const Facet> facets,
                                           std::span<const Rational> offsets) {
  std::vector<PolyVertex> vertices;
  for_each_subset(facets.size(), dim, [&](std::span<const std::size_t> subset) {
    RatVec b;
    for (std::size_t f : subset) b.push_back(-offsets[f]);
    auto x = solve(to_rational_rows(facets, subset), std::move(b));
    if (!x) return;
    std::vector<std::size_t> tight;
    for (std::size_t f = 0; f < facets.size(); ++f) {
      const Rational value = eval_with_offset(facets[f], offsets[f], *x);
      if (value < 0) return;
      if (value == Rational(0)) tight.push_back(f);
    }
    for (const auto& v : vertices)
      if (v.point == *x) return;
    vertices.push_back({std::move(*x), std::move(tight)});
  });
  return vertices;
}

ValidationReport validate_delzant(std::size_t dim, std::span<const Facet> facets) {
  auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };
  if (dim == 0) return fail("dimension must be at least 1");
  if (facets.empty()) return fail("no facets");
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const auto& f = facets[i];
    const std::string tag = "facet " + std::to_string(i + 1);
    if (f.normal.size() != dim) return fail(tag + ": normal has wrong length");
    long long g = 0;
    for (long long v : f.normal) g = std::gcd(g, std::llabs(v));
    if (g == 0) return fail(tag + ": zero normal");
    if (g != 1) return fail(tag + ": normal is not primitive");
    if (f.twice_offset % 2 == 0) return fail(tag + ": 2*lambda is even (lambda not in Z+1/2)");
  }

  std::vector<std::size_t> all(facets.size());
  std::iota(all.begin(), all.end(), 0);
  if (rank(to_rational_rows(facets, all), dim) < dim) {
    return fail("unbounded: normals do not span R^n");
  }
  // A pointed recession cone is trivial iff none of its candidate extreme rays
  // (kernels of n-1 independent normals) is feasible.
  bool unbounded = false;
  for_each_subset(facets.size(), dim - 1, [&](std::span<const std::size_t> subset) {
    if (unbounded) return;
    std::vector<IntVec> rows;
    for (std::size_t f : subset) rows.push_back(facets[f].normal);
    const IntVec d = cofactor_direction(rows, dim);
    if (std::all_of(d.begin(), d.end(), [](long long v) { return v == 0; })) return;
    for (int sign : {1, -1}) {
      bool feasible = true;
      for (const auto& f : facets) {
        if (sign * f.pairing(d) < 0) {
          feasible = false;
          break;
        }
      }
      if (feasible) unbounded = true;
    }
  });
  if (unbounded) return fail("unbounded: recession direction exists");

  const RatVec offsets = facet_offsets(facets);
  const auto vertices = enumerate_vertices(dim, facets, offsets);
  if (vertices.empty()) return fail("empty polytope");
  std::vector<std::size_t> incidence(facets.size(), 0);
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const auto& tight = vertices[v].tight;
    const std::string tag = "vertex " + std::to_string(v + 1);
    if (tight.size() != dim) {
      return fail(tag + ": " + std::to_string(tight.size()) +
                  " facets meet (not simple, or empty interior)");
    }
    std::vector<IntVec> m;
    for (std::size_t f : tight) {
      m.push_back(facets[f].normal);
      ++incidence[f];
    }
    if (std::llabs(det(m)) != 1) return fail(tag + ": |det A_v| != 1");
  }
  for (std::size_t f = 0; f < facets.size(); ++f) {
    if (incidence[f] < dim) {
      return fail("facet " + std::to_string(f + 1) + " is redundant (not a facet)");
    }
  }
  return {};
}

ToricPolytope::ToricPolytope(std::size_t dim, std::vector<Facet> facets)
    : dim_(dim), facets_(std::move(facets)) {
  const auto report = validate_delzant(dim_, facets_);
  if (!report.ok) throw std::invalid_argument("invalid polytope: " + report.message);

  const RatVec offsets = facet_offsets(facets_);
  const auto vertices = enumerate_vertices(dim_, facets_, offsets);
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    VertexChart chart;
    chart.vertex_id = v;
    chart.vertex = vertices[v].point;
    chart.facets = vertices[v].tight;
    for (std::size_t f : chart.facets) {
      chart.matrix.push_back(facets_[f].normal);
      chart.offsets.push_back(facets_[f].offset());
    }
    charts_.push_back(std::move(chart));
  }

  constexpr long long kLevelCap = 100001;
  for (long long k = 1; k <= kLevelCap; k += 2) {
    RatVec corrected;
    for (const auto& f : facets_) corrected.emplace_back((k * f.twice_offset - 1) / 2);
    if (same_normal_fan(facets_, charts_, corrected)) {
      min_level_ = k;
      return;
    }
  }
  throw std::invalid_argument("no admissible level below " + std::to_string(kLevelCap));
}

bool ToricPolytope::contains(std::span<const Rational> x) const {
  return std::all_of(facets_.begin(), facets_.end(),
                     [&](const Facet& f) { return f.eval(x) >= 0; });
}

bool ToricPolytope::contains(std::span<const double> x) const {
  return std::all_of(facets_.begin(), facets_.end(),
                     [&](const Facet& f) { return f.eval(x) >= 0.0; });
}

bool ToricPolytope::interior(std::span<const double> x) const {
  return std::all_of(facets_.begin(), facets_.end(),
                     [&](const Facet& f) { return f.eval(x) > 0.0; });
}

std::pair<std::vector<double>, std::vector<double>> ToricPolytope::bounding_box() const {
  std::vector<double> lo(dim_, 0.0), hi(dim_, 0.0);
  bool first = true;
  for (const auto& chart : charts_) {
    for (std::size_t i = 0; i < dim_; ++i) {
      const double v = to_double(chart.vertex[i]);
      lo[i] = first ? v : std::min(lo[i], v);
      hi[i] = first ? v : std::max(hi[i], v);
    }
    first = false;
  }
  return {lo, hi};
}

PolytopePtr make_polytope(std::size_t dim, std::vector<Facet> facets) {
  return std::make_shared<const ToricPolytope>(dim, std::move(facets));
}

long long min_level(const ToricPolytope& polytope) { return polytope.min_level(); }

IntVec corrected_offsets(const ToricPolytope& polytope, long long level) {
  if (level < 1 || level % 2 == 0) {
    throw std::invalid_argument("level k must be odd and positive, got " +
                                std::to_string(level));
  }
  IntVec out;
  for (const auto& f : polytope.facets()) out.push_back((level * f.twice_offset - 1) / 2);
  return out;
}

LatticeBasis::LatticeBasis(PolytopePtr polytope, long long level, std::vector<IntVec> points)
    : polytope_(std::move(polytope)), level_(level), points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
}

std::optional<std::size_t> LatticeBasis::find(std::span<const long long> m) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), m,
                             [](const IntVec& a, std::span<const long long> b) {
                               return std::lexicographical_compare(a.begin(), a.end(),
                                                                   b.begin(), b.end());
                             });
  if (it == points_.end() || !std::equal(it->begin(), it->end(), m.begin(), m.end())) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - points_.begin());
}

std::vector<double> LatticeBasis::scaled_point(std::size_t i) const {
  std::vector<double> x(points_[i].size());
  const double h = hbar();
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = h * static_cast<double>(points_[i][j]);
  return x;
}

LatticeBasis lattice_points(const PolytopePtr& polytope, long long level) {
  const IntVec offsets = corrected_offsets(*polytope, level);
  if (level < polytope->min_level()) {
    throw std::invalid_argument("level " + std::to_string(level) +
                                " is below the minimal admissible level " +
                                std::to_string(polytope->min_level()));
  }
  const std::size_t n = polytope->dim();
  const auto& facets = polytope->facets();

  IntVec lo(n), hi(n);
  bool first = true;
  for (const auto& chart : polytope->charts()) {
    std::vector<RatVec> a;
    RatVec b;
    for (std::size_t f : chart.facets) {
      RatVec row;
      for (long long v : facets[f].normal) row.emplace_back(v);
      a.push_back(std::move(row));
      b.emplace_back(-offsets[f]);
    }
    const auto x = solve(std::move(a), std::move(b));
    for (std::size_t i = 0; i < n; ++i) {
      const long long down = floor_div((*x)[i]);
      const long long up = ceil_div((*x)[i]);
      lo[i] = first ? down : std::min(lo[i], down);
      hi[i] = first ? up : std::max(hi[i], up);
    }
    first = false;
  }

  std::vector<IntVec> points;
  IntVec m = lo;
  while (true) {
    bool inside = true;
    for (std::size_t f = 0; f < facets.size() && inside; ++f) {
      inside = facets[f].pairing(m) + offsets[f] >= 0;
    }
    if (inside) points.push_back(m);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (m[i] < hi[i]) {
        ++m[i];
        break;
      }
      m[i] = lo[i];
      if (i == 0) return LatticeBasis(polytope, level, std::move(points));
    }
  }
}

Region::Region(RatVec margins) : margins_(std::move(margins)) {
  if (margins_.empty()) throw std::invalid_argument("region needs one margin per facet");
  for (const auto& c : margins_) {
    if (c <= 0) throw std::invalid_argument("region margins must be strictly positive");
  }
}

Rational Region::min_margin() const {
  return *std::min_element(margins_.begin(), margins_.end());
}

bool Region::contains(const ToricPolytope& polytope, std::span<const Rational> x) const {
  const auto& facets = polytope.facets();
  if (facets.size() != margins_.size()) {
    throw std::invalid_argument("region margins do not match the facet count");
  }
  for (std::size_t f = 0; f < facets.size(); ++f) {
    if (facets[f].eval(x) < margins_[f]) return false;
  }
  return true;
}

bool Region::contains(const ToricPolytope& polytope, std::span<const double> x) const {
  const auto& facets = polytope.facets();
  if (facets.size() != margins_.size()) {
    throw std::invalid_argument("region margins do not match the facet count");
  }
  for (std::size_t f = 0; f < facets.size(); ++f) {
    if (facets[f].eval(x) < to_double(margins_[f])) return false;
  }
  return true;
}

bool region_is_empty(const ToricPolytope& polytope, const Region& region) {
  const auto& facets = polytope.facets();
  if (facets.size() != region.margins().size()) {
    throw std::invalid_argument("region margins do not match the facet count");
  }
  RatVec shifted;
  for (std::size_t f = 0; f < facets.size(); ++f) {
    shifted.push_back(facets[f].offset() - region.margins()[f]);
  }
  return enumerate_vertices(polytope.dim(), facets, shifted).empty();
}

std::vector<std::size_t> region_lattice(const LatticeBasis& basis, const Region& region) {
  const auto& facets = basis.polytope().facets();
  if (facets.size() != region.margins().size()) {
    throw std::invalid_argument("region margins do not match the facet count");
  }
  const long long k = basis.level();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const IntVec& m = basis.point(i);
    bool inside = true;
    for (std::size_t f = 0; f < facets.size() && inside; ++f) {
      // l_F(m/k) >= c_F  <=>  <m, nu> + k lambda >= k c_F
      const Rational lhs = Rational(facets[f].pairing(m)) + facets[f].offset() * k;
      inside = lhs >= region.margins()[f] * k;
    }
    if (inside) out.push_back(i);
  }
  return out;
}

Rational shift_safety_threshold(const ToricPolytope& polytope, const Region& region,
                                std::span<const IntVec> shifts) {
  if (region_is_empty(polytope, region)) {
    throw std::invalid_argument("shift safety threshold needs a nonempty region");
  }
  const Rational eps = region.min_margin();
  Rational delta = eps / 2;
  for (const auto& f : polytope.facets()) {
    for (const auto& q : shifts) {
      if (q.size() != polytope.dim()) {
        throw std::invalid_argument("shift vector has wrong dimension");
      }
      const long long pairing = std::llabs(f.pairing(q));
      if (pairing != 0) delta = std::min(delta, eps / (2 * pairing));
    }
  }
  return delta;
}

}  // namespace btq
