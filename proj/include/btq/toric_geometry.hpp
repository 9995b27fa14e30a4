#pragma once

// Moment polytopes of compact toric symplectic manifolds, their half-form
// corrected lattices and compact subregions. All combinatorics here is exact
// (integers and rationals); doubles appear only in the convenience evaluators
// used by the symbol layer.

#include "btq/rational.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace btq {

/// Half-space <x, normal> + offset >= 0. The offset is a half-integer and is
/// stored as its (odd) double.
struct Facet {
  IntVec normal;
  long long twice_offset = 1;

  Rational offset() const { return Rational(twice_offset, 2); }
  Rational eval(std::span<const Rational> x) const;
  double eval(std::span<const double> x) const;
  long long pairing(std::span<const long long> q) const;
};

struct VertexChart {
  std::size_t vertex_id = 0;
  RatVec vertex;
  /// Indices of the n facets through the vertex, ascending.
  std::vector<std::size_t> facets;
  /// Rows are the normals of `facets`, in the same order (|det| = 1).
  std::vector<IntVec> matrix;
  RatVec offsets;
};

struct ValidationReport {
  bool ok = true;
  std::string message;
};

/// Checks primitivity, half-integrality, boundedness, nonempty interior and
/// the Delzant condition. Reports the first violation found.
ValidationReport validate_delzant(std::size_t dim, std::span<const Facet> facets);

class ToricPolytope {
 public:
  /// Throws std::invalid_argument with the validation message on bad data.
  ToricPolytope(std::size_t dim, std::vector<Facet> facets);

  std::size_t dim() const { return dim_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<VertexChart>& charts() const { return charts_; }

  /// Smallest odd level whose corrected polytope keeps the normal fan.
  long long min_level() const { return min_level_; }

  bool contains(std::span<const Rational> x) const;
  bool contains(std::span<const double> x) const;
  bool interior(std::span<const double> x) const;

  /// Axis-aligned bounding box of P_X, from the vertices.
  std::pair<std::vector<double>, std::vector<double>> bounding_box() const;

 private:
  std::size_t dim_;
  std::vector<Facet> facets_;
  std::vector<VertexChart> charts_;
  long long min_level_ = 1;
};

using PolytopePtr = std::shared_ptr<const ToricPolytope>;

PolytopePtr make_polytope(std::size_t dim, std::vector<Facet> facets);

long long min_level(const ToricPolytope& polytope);

/// k*lambda_F - 1/2 for every facet. Rejects even or non-positive k.
IntVec corrected_offsets(const ToricPolytope& polytope, long long level);

/// The half-form corrected lattice Lambda_hbar at an odd level k, sorted
/// lexicographically.
class LatticeBasis {
 public:
  LatticeBasis(PolytopePtr polytope, long long level, std::vector<IntVec> points);

  const ToricPolytope& polytope() const { return *polytope_; }
  const PolytopePtr& polytope_ptr() const { return polytope_; }
  long long level() const { return level_; }
  double hbar() const { return 1.0 / static_cast<double>(level_); }
  std::size_t size() const { return points_.size(); }
  const std::vector<IntVec>& points() const { return points_; }
  const IntVec& point(std::size_t i) const { return points_[i]; }

  std::optional<std::size_t> find(std::span<const long long> m) const;

  /// hbar * m as doubles.
  std::vector<double> scaled_point(std::size_t i) const;

 private:
  PolytopePtr polytope_;
  long long level_;
  std::vector<IntVec> points_;
};

/// Enumerates Lambda_hbar by bounding box of the corrected polytope followed by
/// facet filtering. Rejects even k and k below min_level().
LatticeBasis lattice_points(const PolytopePtr& polytope, long long level);

/// V = { x : l_F(x) >= c_F for all F }, margins aligned with facet order.
class Region {
 public:
  explicit Region(RatVec margins);

  const RatVec& margins() const { return margins_; }
  Rational min_margin() const;
  bool contains(const ToricPolytope& polytope, std::span<const Rational> x) const;
  bool contains(const ToricPolytope& polytope, std::span<const double> x) const;

 private:
  RatVec margins_;
};

/// True when the closed region has no point at all.
bool region_is_empty(const ToricPolytope& polytope, const Region& region);

/// Indices (into the basis) of V_hbar = { m : l_F(m/k) >= c_F }, basis order.
std::vector<std::size_t> region_lattice(const LatticeBasis& basis,
                                        const Region& region);

/// The constructive delta of the shift guard:
///   eps = min c_F,  delta = min(eps/2, eps / (2 |<q, nu_F>|)) over nonzero pairings.
/// Every odd k with 1/k < delta keeps r + q inside Lambda_hbar for r in V_hbar
/// and q in `shifts`. Throws on an empty region.
Rational shift_safety_threshold(const ToricPolytope& polytope, const Region& region,
                                std::span<const IntVec> shifts);

/// Vertices of { x : <x, nu_F> + b_F >= 0 } for arbitrary rational offsets,
/// together with the facets tight at each one.
struct PolyVertex {
  RatVec point;
  std::vector<std::size_t> tight;
};
std::vector<PolyVertex> enumerate_vertices(std::size_t dim, std::span<const Facet> facets,
                                           std::span<const Rational> offsets);

}  // namespace btq
