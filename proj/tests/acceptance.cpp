// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "btq/harness.hpp"
#include "btq/operator_norms.hpp"
#include "btq/quantization.hpp"
#include "btq/star_product.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace btq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Matrices from criteria 1-3, checked again by criterion 4.
struct HoelderLog {
  std::mutex mutex;
  long long checked = 0;
  long long violations = 0;
  double worst_ratio = 0.0;

  void add(const Eigen::MatrixXcd& a) {
    const auto b = compute_norms(a, NormMethod::kSvd);
    std::lock_guard lock(mutex);
    ++checked;
    if (b.hoelder_bound > 0.0) worst_ratio = std::max(worst_ratio, b.norm2 / b.hoelder_bound);
    if (b.norm2 > b.hoelder_bound * (1.0 + 1e-12)) ++violations;
  }
};

HoelderLog hoelder;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Outcome slope_sweep(const char* preset, bool need_r2) {
  const auto ex = prepare_experiment(demo_config(preset));
  RunOptions options;
  options.on_matrix = [](const ErrorOperator& op) { hoelder.add(op.matrix); };
  const auto result = run_experiment(ex, options);
  Outcome out{true, {}};
  for (const auto& s : result.summaries) {
    if (!s.fit) {
      out.pass = false;
      out.detail += "N=" + std::to_string(s.order) + " no fit; ";
      continue;
    }
    const bool ok = s.fit->slope >= s.order + 0.9 && (!need_r2 || s.fit->r2 >= 0.98);
    out.pass = out.pass && ok;
    out.detail += "N=" + std::to_string(s.order) +
                  fmt(" slope %.3f R2 %.5f; ", s.fit->slope, s.fit->r2);
  }
  out.detail += std::to_string(ex.levels.size()) + " levels";
  return out;
}

Outcome criterion_taylor() {
  const auto pair = test::preset("cp1");
  const auto basis = lattice_points(pair.polytope, 41);
  Outcome out{true, {}};
  for (int n = 0; n <= 2; ++n) {
    const auto op = error_operator(pair.f, pair.g, n, basis, pair.region);
    hoelder.add(op.matrix);
    const Matrix r = taylor_remainder(pair.f, pair.g, n, basis, pair.region, 16);
    hoelder.add(r);
    const double dev = (op.matrix - r).cwiseAbs().maxCoeff();
    const double scale = op.matrix.cwiseAbs().maxCoeff();
    out.pass = out.pass && dev <= 1e-9 * scale;
    out.detail += "N=" + std::to_string(n) + fmt(" dev/max %.2e; ", dev / scale);
  }
  return out;
}

Outcome criterion_hoelder() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> rows(1, 100);
  std::uniform_int_distribution<int> cols(1, 60);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::MatrixXcd a(rows(rng), cols(rng));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(normal(rng), normal(rng));
    hoelder.add(a);
  }
  return {hoelder.violations == 0,
          std::to_string(hoelder.checked) + " matrices, " + std::to_string(hoelder.violations) +
              " violations" + fmt(", max norm2/bound %.4f", hoelder.worst_ratio)};
}

Complex mode_sum(const Symbol& f, const Symbol& g, int r, std::span<const double> x,
                 std::span<const double> theta) {
  const auto term = star_term(f, g, r);
  Complex total = 0.0;
  for (const auto& p : term.mode_indices()) {
    double angle = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) angle += static_cast<double>(p[i]) * theta[i];
    total += c_r_mode(f, g, r, p, x) * std::polar(1.0, angle);
  }
  return total;
}

Outcome criterion_oracles() {
  std::mt19937_64 rng(5);
  const std::vector<const char*> presets{"cp1", "square", "cp1xcp1"};
  double worst = 0.0;
  for (int point = 0; point < 200; ++point) {
    const auto pair = test::preset(presets[static_cast<std::size_t>(point) % presets.size()]);
    const auto x = test::random_interior(*pair.polytope, rng, 1e-3);
    const auto theta = test::random_angles(pair.polytope->dim(), rng);
    for (int r = 0; r <= 4; ++r) {
      const Complex a = c_r_pointwise(pair.f, pair.g, r, x, theta);
      const Complex b = mode_sum(pair.f, pair.g, r, x, theta);
      worst = std::max(worst, test::rel_err(a, b));
    }
  }

  // third symbol for associativity
  double worst_assoc = 0.0;
  for (const char* name : {"cp1", "square"}) {
    const auto pair = test::preset(name);
    const Symbol h = pair.polytope->dim() == 1
                         ? parse_symbol(pair.polytope, {{{1}, "lF1^(1/2)*lF2^(1/2)*cos(x1)"},
                                                        {{0}, "x1^2"}})
                         : parse_symbol(pair.polytope, {{{0, 1}, "lF2^(1/2)*lF4^(1/2)*x1"},
                                                        {{0, 0}, "sin(x1 - x2)"}});
    for (int r = 0; r <= 3; ++r) {
      std::vector<Symbol> left;
      std::vector<Symbol> right;
      for (int a = 0; a <= r; ++a) {
        left.push_back(star_term(star_term(pair.f, pair.g, r - a), h, a));
        right.push_back(star_term(pair.f, star_term(pair.g, h, r - a), a));
      }
      for (int point = 0; point < 100; ++point) {
        const auto x = test::random_interior(*pair.polytope, rng, 1e-3);
        const auto theta = test::random_angles(pair.polytope->dim(), rng);
        Complex l = 0.0;
        Complex rr = 0.0;
        for (const auto& s : left) l += s.value(x, theta);
        for (const auto& s : right) rr += s.value(x, theta);
        worst_assoc = std::max(worst_assoc, test::rel_err(l, rr));
      }
    }
  }
  return {worst <= 1e-12 && worst_assoc <= 1e-10,
          fmt("oracle rel err %.2e, associativity rel err %.2e", worst, worst_assoc)};
}

Outcome criterion_correspondence() {
  std::mt19937_64 rng(6);
  const std::vector<const char*> presets{"cp1", "square", "cp1xcp1"};
  double worst = 0.0;
  for (int point = 0; point < 200; ++point) {
    const auto pair = test::preset(presets[static_cast<std::size_t>(point) % presets.size()]);
    const auto x = test::random_interior(*pair.polytope, rng, 1e-3);
    const auto theta = test::random_angles(pair.polytope->dim(), rng);
    const Complex lhs = Complex(0.0, 1.0) * (c_r_pointwise(pair.f, pair.g, 1, x, theta) -
                                             c_r_pointwise(pair.g, pair.f, 1, x, theta));
    const Complex rhs = poisson_bracket(pair.f, pair.g, x, theta);
    worst = std::max(worst, test::rel_err(lhs, rhs));
  }
  return {worst <= 1e-10, fmt("max rel err %.2e over 200 points", worst)};
}

Outcome criterion_lattice() {
  std::mt19937_64 rng(7);
  int mismatches = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = test::random_delzant(rng);
    const long long k = p->min_level() + 2 * static_cast<long long>(rng() % 5);
    const auto [lo, hi] = p->bounding_box();
    double extent = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i)
      extent = std::max({extent, std::abs(lo[i]), std::abs(hi[i])});
    const auto radius = static_cast<long long>(std::ceil(extent * static_cast<double>(k))) + 3;
    if (lattice_points(p, k).points() != test::brute_force_lattice(*p, k, radius)) ++mismatches;
  }

  const auto pair = test::preset("cp1");
  const auto shifts = pair.g.mode_indices();
  const Rational delta = shift_safety_threshold(*pair.polytope, pair.region, shifts);
  long long failures = 0;
  long long checked = 0;
  int levels = 0;
  for (long long k = pair.polytope->min_level(); k <= 101; k += 2) {
    if (!(Rational(1, k) < delta)) continue;
    ++levels;
    const auto basis = lattice_points(pair.polytope, k);
    for (std::size_t r : region_lattice(basis, pair.region)) {
      for (const auto& q : shifts) {
        ++checked;
        if (!basis.find(IntVec{basis.point(r)[0] + q[0]})) ++failures;
      }
    }
  }
  return {mismatches == 0 && failures == 0,
          std::to_string(mismatches) + "/20 enumeration mismatches; " + std::to_string(failures) +
              " shift failures in " + std::to_string(checked) + " checks over " +
              std::to_string(levels) + " levels"};
}

Outcome criterion_locality() {
  const auto p = test::cp1();
  const auto f = parse_symbol(p, {{{0}, "cutoff(0 - x1) + cutoff(x1 - 1)"},
                                  {{1}, "lF1^(1/2)*lF2^(1/2)*cutoff(0 - x1)"},
                                  {{-2}, "lF1*lF2*cutoff(x1 - 1)"}});
  const std::vector<long long> levels{21, 41, 81};
  const auto report = locality_check(f, test::half_margins(2), levels);
  double worst = 0.0;
  for (const auto& l : report.levels) worst = std::max(worst, l.max_restricted);
  return {report.vanishes_on_region && !report.witness && worst < kLocalityZero,
          fmt("max |Q_f pi_V| entry %.2e, max |f_p| on region %.2e", worst,
              report.max_on_region)};
}

Outcome criterion_boundedness() {
  const auto pair = test::preset("cp1");
  const auto ex = prepare_experiment(demo_config("cp1"));
  const double bound = coefficient_sup_estimate(pair.f, ex.levels);
  std::vector<double> norms(ex.levels.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < ex.levels.size(); ++i) {
    const auto basis = lattice_points(pair.polytope, ex.levels[i]);
    norms[i] = spectral_norm_svd(build_toeplitz(pair.f, basis).entries);
  }
  const double worst = *std::max_element(norms.begin(), norms.end());
  return {worst <= bound + 1e-8, fmt("max ||Q_f|| %.6f, sup estimate %.6f", worst, bound)};
}

Outcome criterion_ingestion() {
  std::mt19937_64 rng(10);
  const auto pair = test::preset("cp1");
  const auto& f = pair.f;
  const Sampler sampler = [&](std::span<const double> y, std::span<const double> t) {
    return f.value(y, t);
  };
  double worst_fft = 0.0;
  for (int point = 0; point < 50; ++point) {
    const auto x = test::random_interior(*pair.polytope, rng, 1e-3);
    const auto modes = fft_ingest(sampler, f.band(), 16, x, 1);
    for (const auto& [p, c] : modes) {
      worst_fft = std::max(worst_fft, std::abs(c - eval_coef(f, p, x)));
    }
  }

  double worst_fd = 0.0;
  for (const char* name : {"cp1", "square"}) {
    const auto sym_pair = test::preset(name);
    for (const Symbol* s : {&sym_pair.f, &sym_pair.g}) {
      for (int point = 0; point < 20; ++point) {
        const auto x = test::random_interior(*sym_pair.polytope, rng, 0.2);
        for (int r = 1; r <= 3; ++r) {
          for (const auto& idx : multi_indices(s->dim(), r)) {
            for (const auto& [p, coef] : s->modes()) {
              const double exact = eval_coef_deriv(*s, p, idx, x).real();
              const double numeric = richardson_derivative(
                  [&](std::span<const double> y) { return coef.eval(y); }, x, idx, 1e-2);
              // relative above unit magnitude, absolute below
              const double scale = std::max(std::abs(exact), 1.0);
              worst_fd = std::max(worst_fd, std::abs(exact - numeric) / scale);
            }
          }
        }
      }
    }
  }
  return {worst_fft <= 1e-12 && worst_fd <= 1e-6,
          fmt("fft max err %.2e, finite-difference max rel err %.2e", worst_fft, worst_fd)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "main-estimate slopes, n = 1", [] { return slope_sweep("cp1", true); }},
      {2, "main-estimate slopes, n = 2", [] { return slope_sweep("square", false); }},
      {3, "Taylor remainder identity", criterion_taylor},
      {4, "Hoelder bound", criterion_hoelder},
      {5, "star-product oracles and associativity", criterion_oracles},
      {6, "correspondence principle", criterion_correspondence},
      {7, "lattice enumeration and shift guard", criterion_lattice},
      {8, "locality", criterion_locality},
      {9, "uniform boundedness", criterion_boundedness},
      {10, "DFT ingestion and derivatives", criterion_ingestion},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::printf("criterion %2d %s: %s (%s) [%.1fs]\n", c.id, out.pass ? "PASS" : "FAIL", c.name,
                out.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
