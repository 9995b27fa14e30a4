#include "btq/operator_norms.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace btq {

NormMethod parse_norm_method(std::string_view text) {
  if (text == "auto") return NormMethod::kAuto;
  if (text == "svd" || text == "exact-svd") return NormMethod::kSvd;
  if (text == "power" || text == "power-iteration") return NormMethod::kPowerIteration;
  throw std::invalid_argument("unknown norm method '" + std::string(text) +
                              "' (expected auto, svd or power)");
}

std::string_view to_string(NormMethod method) {
  switch (method) {
    case NormMethod::kAuto:
      return "auto";
    case NormMethod::kSvd:
      return "svd";
    case NormMethod::kPowerIteration:
      return "power";
  }
  return "auto";
}

double norm1(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

double norm_inf(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

double spectral_norm_svd(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

PowerIterationResult spectral_norm_power(const Eigen::MatrixXcd& a, double rel_tol,
                                         int max_iterations) {
  PowerIterationResult out;
  if (a.size() == 0) {
    out.converged = true;
    return out;
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(a.cols());
  v /= v.norm();
  double previous = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXcd av = a * v;
    const double estimate = av.squaredNorm();  // Rayleigh quotient of A^H A
    Eigen::VectorXcd w = a.adjoint() * av;
    const double wn = w.norm();
    out.iterations = it;
    if (wn == 0.0) {
      // v lies in the kernel; the all-ones start only does that for A = 0
      // or pathological inputs.
      out.value = 0.0;
      out.converged = a.cwiseAbs().maxCoeff() == 0.0;
      return out;
    }
    v = w / wn;
    if (it > 1 && std::abs(estimate - previous) <= rel_tol * estimate) {
      out.value = std::sqrt(estimate);
      out.converged = true;
      return out;
    }
    previous = estimate;
  }
  out.value = std::sqrt(previous);
  return out;
}

NormBundle compute_norms(const Eigen::MatrixXcd& a, NormMethod method) {
  NormBundle out;
  if (a.size() == 0) return out;
  out.norm1 = norm1(a);
  out.norm_inf = norm_inf(a);
  out.hoelder_bound = std::sqrt(out.norm1 * out.norm_inf);

  if (method == NormMethod::kAuto) {
    method = std::min(a.rows(), a.cols()) <= kSvdDimensionLimit ? NormMethod::kSvd
                                                                 : NormMethod::kPowerIteration;
  }
  out.method = method;
  if (method == NormMethod::kPowerIteration) {
    const auto power = spectral_norm_power(a);
    if (power.converged) {
      out.norm2 = power.value;
      return out;
    }
    std::cerr << "warning: power iteration did not converge after " << power.iterations
              << " steps; falling back to SVD\n";
    out.fell_back = true;
  }
  out.norm2 = spectral_norm_svd(a);
  return out;
}

}  // namespace btq
