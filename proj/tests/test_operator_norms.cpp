#include "btq/operator_norms.hpp"

#include "btq/quantization.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace btq;

namespace {

Eigen::MatrixXcd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXcd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = Complex(n(rng), n(rng));
  return a;
}

}  // namespace

TEST_CASE("nilpotent example") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 1) = 1.0;
  const auto b = compute_norms(a, NormMethod::kSvd);
  CHECK(b.norm1 == 1.0);
  CHECK(b.norm_inf == 1.0);
  CHECK(b.norm2 == doctest::Approx(1.0));
  CHECK(b.hoelder_bound == 1.0);
  CHECK(spectral_norm_power(a).value == doctest::Approx(1.0));
}

TEST_CASE("diagonal example") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = Complex(0.0, -4.0);
  for (auto method : {NormMethod::kSvd, NormMethod::kPowerIteration, NormMethod::kAuto}) {
    const auto b = compute_norms(a, method);
    CHECK(b.norm1 == 4.0);
    CHECK(b.norm_inf == 4.0);
    CHECK(b.norm2 == doctest::Approx(4.0).epsilon(1e-9));
  }
}

TEST_CASE("Hoelder bound on random matrices") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_matrix(50, 30, rng);
    const auto b = compute_norms(a, NormMethod::kSvd);
    CHECK(b.norm2 <= b.hoelder_bound * (1.0 + 1e-12));
    CHECK(b.norm2 <= b.norm1 * std::sqrt(50.0) + 1e-9);
  }
}

TEST_CASE("SVD and power iteration agree") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_matrix(40, 25, rng);
    const double svd = spectral_norm_svd(a);
    const auto power = spectral_norm_power(a);
    CHECK(power.converged);
    CHECK(std::abs(power.value - svd) <= 1e-8 * svd);
  }
  const auto pair = test::preset("cp1");
  const auto basis = lattice_points(pair.polytope, 61);
  const auto op = error_operator(pair.f, pair.g, 1, basis, pair.region);
  const double svd = spectral_norm_svd(op.matrix);
  CHECK(std::abs(spectral_norm_power(op.matrix).value - svd) <= 1e-8 * svd);
}

TEST_CASE("zero-column matrices") {
  const Eigen::MatrixXcd a(7, 0);
  for (auto method : {NormMethod::kSvd, NormMethod::kPowerIteration}) {
    const auto b = compute_norms(a, method);
    CHECK(b.norm1 == 0.0);
    CHECK(b.norm_inf == 0.0);
    CHECK(b.norm2 == 0.0);
    CHECK(b.hoelder_bound == 0.0);
  }
}

TEST_CASE("restricted norm is the sup over unit vectors") {
  std::mt19937_64 rng(47);
  const auto pair = test::preset("cp1");
  const auto basis = lattice_points(pair.polytope, 31);
  const auto op = error_operator(pair.f, pair.g, 0, basis, pair.region);
  const double norm = spectral_norm_svd(op.matrix);
  double best = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    Eigen::VectorXcd v = random_matrix(op.matrix.cols(), 1, rng).col(0);
    v.normalize();
    best = std::max(best, (op.matrix * v).norm());
  }
  CHECK(best <= norm * (1.0 + 1e-12));
  CHECK(best >= 0.5 * norm);
}

TEST_CASE("norm method names") {
  CHECK(parse_norm_method("auto") == NormMethod::kAuto);
  CHECK(parse_norm_method("svd") == NormMethod::kSvd);
  CHECK(parse_norm_method("exact-svd") == NormMethod::kSvd);
  CHECK(parse_norm_method("power") == NormMethod::kPowerIteration);
  CHECK(parse_norm_method("power-iteration") == NormMethod::kPowerIteration);
  CHECK_THROWS_AS(parse_norm_method("lanczos"), std::invalid_argument);
  CHECK(to_string(NormMethod::kSvd) == "svd");
}

TEST_CASE("power iteration reports non-convergence") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 0.5;
  const auto r = spectral_norm_power(a, 1e-10, 2);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
  CHECK(r.value < 1.0);
  CHECK(spectral_norm_power(a).converged);
}
