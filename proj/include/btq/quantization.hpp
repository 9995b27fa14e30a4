#pragma once

// Toeplitz quantization on the half-form corrected basis, the error operator
// of the truncated star product on a compact region, and the two checks built
// on it: the Taylor remainder identity and locality of restricted operators.
//
// Kernels parallelize over columns with OpenMP; each column is written by one
// thread in a fixed order, so results are bit-identical to the serial
// references in btq::serial.

#include "btq/star_product.hpp"
#include "btq/symbols.hpp"
#include "btq/toric_geometry.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace btq {

using Matrix = Eigen::MatrixXcd;

/// 1/k violates the shift guard of the region.
class GuardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ToeplitzMatrix {
  long long level = 0;
  /// Entry (i, j) = f_{m_i - m_j}(hbar m_j) in basis order.
  Matrix entries;
};

ToeplitzMatrix build_toeplitz(const Symbol& f, const LatticeBasis& basis);

/// Columns `cols` of Q_f: a |Lambda| x |cols| block.
Matrix toeplitz_columns(const Symbol& f, const LatticeBasis& basis,
                        std::span<const std::size_t> cols);

/// Q_f restricted to the columns `cols`, everything else dropped.
Matrix projector_columns(const Matrix& q, std::span<const std::size_t> cols);

/// (Q_f Q_g) restricted to the columns `cols`, computed through the rows of
/// Q_g that can be nonzero on those columns.
Matrix composite_columns(const Symbol& f, const Symbol& g, const LatticeBasis& basis,
                         std::span<const std::size_t> cols);

/// Columns `cols` of the operator whose (m, r) entry is C_r(f, g)_{m-r}(hbar r).
Matrix star_order_columns(const Symbol& f, const Symbol& g, int order, const LatticeBasis& basis,
                          std::span<const std::size_t> cols);

/// delta for the region and the modes of g.
Rational shift_guard(const Symbol& g, const Region& region);

/// Throws GuardError unless 1/k < delta.
void check_shift_guard(const Symbol& g, const LatticeBasis& basis, const Region& region);

struct ErrorOperator {
  int order = 0;
  long long level = 0;
  /// Basis indices of V_hbar, i.e. of the retained columns.
  std::vector<std::size_t> columns;
  /// (Q_f Q_g - sum_{r<=N} hbar^r Q_{C_r(f,g)}) restricted to V_hbar.
  Matrix matrix;
};

/// One error operator per requested order, sharing the composite and the
/// star-term columns. Throws GuardError when the level is too coarse.
std::vector<ErrorOperator> error_operators(const Symbol& f, const Symbol& g,
                                           std::span<const int> orders,
                                           const LatticeBasis& basis, const Region& region);

ErrorOperator error_operator(const Symbol& f, const Symbol& g, int order,
                             const LatticeBasis& basis, const Region& region);

/// Gauss-Legendre nodes and weights on [0, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int points);

/// The integral Taylor remainder, assembled entry by entry:
///   (N+1) sum_{|I|=N+1} hbar^{N+1} q^I / I!
///       int_0^1 (1-t)^N f^{(I)}_{m-r-q}(hbar (r + t q)) dt  g_q(hbar r).
Matrix taylor_remainder(const Symbol& f, const Symbol& g, int order, const LatticeBasis& basis,
                        const Region& region, int quadrature_points = 16);

struct RemainderCheck {
  double max_deviation = 0.0;  // max |E - R| over entries
  double max_entry = 0.0;      // max |E|
};
RemainderCheck taylor_remainder_check(const Symbol& f, const Symbol& g, int order,
                                      const LatticeBasis& basis, const Region& region,
                                      int quadrature_points = 16);

/// Entries below this count as zero in the locality check.
inline constexpr double kLocalityZero = 1e-14;

struct LocalityLevel {
  long long level = 0;
  std::size_t columns = 0;
  double max_restricted = 0.0;  // max |Q_f pi_V| entry
};

struct LocalityWitness {
  long long level = 0;
  IntVec row;
  IntVec column;
  double value = 0.0;
};

struct LocalityReport {
  /// Every f_p is below kLocalityZero on the sampled points of the closed region.
  bool vanishes_on_region = false;
  double max_on_region = 0.0;
  std::vector<LocalityLevel> levels;
  /// Set when some restricted operator has an entry above kLocalityZero.
  std::optional<LocalityWitness> witness;
  /// The implication "f vanishes on the region => Q_f pi_V = 0" held at every level.
  bool consistent = true;
};

/// Samples per axis of the dense grid used to probe the region.
inline constexpr int kRegionGrid = 41;

LocalityReport locality_check(const Symbol& f, const Region& region,
                              std::span<const long long> levels);

/// sum_p sup |f_p| over P_X, the sup taken over a dense grid of P_X, its
/// vertices and the scaled lattice points of `levels`.
double coefficient_sup_estimate(const Symbol& f, std::span<const long long> levels = {});

/// Text dump: "toeplitz n=<n> k=<k> size=<rows>x<cols>" then one row per line
/// of "re im" pairs.
void write_matrix(std::ostream& out, const Matrix& a, std::size_t dim, long long level);

struct MatrixDump {
  std::size_t dim = 0;
  long long level = 0;
  Matrix entries;
};
MatrixDump read_matrix(std::istream& in);

namespace serial {

/// Entry-by-entry reference: loops over all (m, m') pairs.
ToeplitzMatrix build_toeplitz(const Symbol& f, const LatticeBasis& basis);

/// Dense reference for the error operator: full Q_f Q_g product and every
/// star-term entry evaluated directly, then restricted.
ErrorOperator error_operator(const Symbol& f, const Symbol& g, int order,
                             const LatticeBasis& basis, const Region& region);

}  // namespace serial

}  // namespace btq
