#pragma once

// Fixtures and independent oracles shared by the unit and acceptance tests.

#include "btq/harness.hpp"
#include "btq/symbols.hpp"
#include "btq/toric_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace btq::test {

inline Facet facet(IntVec normal, long long twice_offset) { return {std::move(normal), twice_offset}; }

inline PolytopePtr cp1() { return make_polytope(1, {facet({1}, 1), facet({-1}, 3)}); }

inline PolytopePtr unit_square() {
  return make_polytope(2, {facet({1, 0}, 1), facet({0, 1}, 1), facet({-1, 0}, 1),
                           facet({0, -1}, 1)});
}

inline Region half_margins(std::size_t facets) {
  return Region(RatVec(facets, Rational(1, 2)));
}

/// Symbols of the cp1 preset.
struct Pair {
  PolytopePtr polytope;
  Symbol f;
  Symbol g;
  Region region;
};

inline Pair preset(const char* name) {
  auto ex = prepare_experiment(demo_config(name));
  return {ex.polytope, ex.f, ex.g, ex.region};
}

/// Every lattice point of a box of half-width `radius` around 0 that passes
/// the corrected facet inequalities, in lexicographic order.
inline std::vector<IntVec> brute_force_lattice(const ToricPolytope& p, long long k,
                                               long long radius) {
  const std::size_t n = p.dim();
  std::vector<IntVec> out;
  IntVec m(n, -radius);
  while (true) {
    bool inside = true;
    for (const auto& f : p.facets()) {
      long long s = (k * f.twice_offset - 1) / 2;
      for (std::size_t i = 0; i < n; ++i) s += f.normal[i] * m[i];
      if (s < 0) {
        inside = false;
        break;
      }
    }
    if (inside) out.push_back(m);
    std::size_t i = n;
    while (i > 0) {
      if (++m[i - 1] <= radius) break;
      m[i - 1] = -radius;
      --i;
    }
    if (i == 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Normal sets of small Delzant polytopes.
inline std::vector<std::pair<std::size_t, std::vector<IntVec>>> delzant_fans() {
  return {
      {1, {{1}, {-1}}},
      {2, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}},
      {2, {{1, 0}, {0, 1}, {-1, -1}}},
      {2, {{1, 0}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}}},
      {2, {{0, 1}, {1, 0}, {0, -1}, {-1, -1}}},
      {2, {{0, 1}, {1, 0}, {0, -1}, {-1, -2}}},
      {2, {{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}}},
      {3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}},
  };
}

/// Random valid Delzant polytope: a fan from delzant_fans(), random offsets in
/// {1/2, ..., 7/2} and a random unimodular change of basis.
inline PolytopePtr random_delzant(std::mt19937_64& rng) {
  const auto fans = delzant_fans();
  std::uniform_int_distribution<std::size_t> pick(0, fans.size() - 1);
  std::uniform_int_distribution<int> half(0, 3);
  std::uniform_int_distribution<int> shear(-2, 2);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const auto& [dim, normals] = fans[pick(rng)];
    std::vector<std::vector<long long>> u(dim, std::vector<long long>(dim, 0));
    for (std::size_t i = 0; i < dim; ++i) u[i][i] = 1;
    if (dim >= 2) {
      // product of two elementary shears, det 1
      const std::size_t a = rng() % dim;
      const std::size_t b = (a + 1 + rng() % (dim - 1)) % dim;
      const long long s = shear(rng);
      for (std::size_t j = 0; j < dim; ++j) u[a][j] += s * u[b][j];
      const long long t = shear(rng);
      for (std::size_t j = 0; j < dim; ++j) u[b][j] += t * u[a][j];
    }
    std::vector<Facet> facets;
    for (const auto& nu : normals) {
      IntVec w(dim, 0);
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) w[i] += u[i][j] * nu[j];
      }
      facets.push_back({w, 2 * half(rng) + 1});
    }
    if (validate_delzant(dim, facets).ok) return make_polytope(dim, facets);
  }
  throw std::runtime_error("no random Delzant polytope found");
}

/// Uniform random point with every l_F >= margin (rejection from the box).
inline std::vector<double> random_interior(const ToricPolytope& p, std::mt19937_64& rng,
                                           double margin = 0.05) {
  const auto [lo, hi] = p.bounding_box();
  std::vector<double> x(p.dim());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    }
    bool ok = true;
    for (const auto& f : p.facets()) ok = ok && f.eval(std::span<const double>(x)) >= margin;
    if (ok) return x;
  }
  throw std::runtime_error("no interior sample found");
}

inline std::vector<double> random_angles(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> theta(n);
  for (auto& t : theta) t = std::uniform_real_distribution<double>(-M_PI, M_PI)(rng);
  return theta;
}

inline double rel_err(Complex a, Complex b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace btq::test
