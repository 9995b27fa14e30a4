#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace btq {

enum class NormMethod { kAuto, kSvd, kPowerIteration };

NormMethod parse_norm_method(std::string_view text);
std::string_view to_string(NormMethod method);

/// kAuto uses the SVD while min(rows, cols) stays at or below this.
inline constexpr Eigen::Index kSvdDimensionLimit = 3000;

struct NormBundle {
  double norm1 = 0.0;     // max column absolute sum
  double norm_inf = 0.0;  // max row absolute sum
  double norm2 = 0.0;     // largest singular value
  double hoelder_bound = 0.0;  // sqrt(norm1 * norm_inf) >= norm2
  NormMethod method = NormMethod::kSvd;
  bool fell_back = false;  // power iteration stalled and the SVD was used
};

NormBundle compute_norms(const Eigen::MatrixXcd& a, NormMethod method = NormMethod::kAuto);

double norm1(const Eigen::MatrixXcd& a);
double norm_inf(const Eigen::MatrixXcd& a);
double spectral_norm_svd(const Eigen::MatrixXcd& a);

struct PowerIterationResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Power iteration on A^H A from the normalized all-ones vector.
PowerIterationResult spectral_norm_power(const Eigen::MatrixXcd& a, double rel_tol = 1e-10,
                                         int max_iterations = 100000);

}  // namespace btq
