#include "btq/harness.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace btq;
using nlohmann::json;

namespace {

json cp1_doc() {
  return json::parse(R"cfg({
    "manifold": {"facets": [{"normal": [1], "lambda": "1/2"}, {"normal": [-1], "lambda": "3/2"}]},
    "f": [{"p": [0], "coef": "1 + x1"}, {"p": [1], "coef": "lF1^(1/2)*lF2^(1/2)"}],
    "g": [{"p": [-1], "coef": "lF1^(1/2)*lF2^(1/2)*x1"}, {"p": [0], "coef": "cos(x1)"}],
    "region": {"margins": ["1/2", "1/2"]},
    "orders": [1, 0],
    "levels": {"k_min": 21, "k_max": 41, "step": 4}
  })cfg");
}

std::vector<std::pair<double, double>> power_law(double c, double slope,
                                                 const std::vector<double>& hbars) {
  std::vector<std::pair<double, double>> out;
  for (double h : hbars) out.emplace_back(h, c * std::pow(h, slope));
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("fit_slope examples") {
  const std::vector<double> hbars{1.0 / 21, 1.0 / 41, 1.0 / 81, 1.0 / 161};
  const auto quad = fit_slope(power_law(1.0, 2.0, hbars));
  CHECK(quad.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(quad.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quad.points == 4);

  const auto cubic = fit_slope(power_law(5.0, 3.0, hbars));
  CHECK(cubic.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(cubic.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-12));

  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<double> many;
  for (int k = 21; k <= 201; k += 2) many.push_back(1.0 / k);
  auto noisy = power_law(2.0, 1.0, many);
  for (auto& [h, v] : noisy) v *= 1.0 + noise(rng);
  CHECK(std::abs(fit_slope(noisy).slope - 1.0) <= 0.05);

  auto with_zero = power_law(1.0, 2.0, hbars);
  with_zero.emplace_back(0.5, 0.0);
  const auto dropped = fit_slope(with_zero);
  CHECK(dropped.dropped == 1);
  CHECK(dropped.slope == doctest::Approx(2.0));

  const auto two = power_law(1.0, 1.0, {0.1, 0.05});
  CHECK_THROWS_AS(fit_slope(two), std::invalid_argument);
}

TEST_CASE("injected norms give exact slopes") {
  const auto ex = prepare_experiment(parse_config(cp1_doc()));
  RunOptions options;
  options.inject = [](long long k, int n) { return 3.0 * std::pow(1.0 / k, n + 1); };
  const auto result = run_experiment(ex, options);
  CHECK(result.exit_code == kExitPass);
  REQUIRE(result.summaries.size() == 2);
  for (const auto& s : result.summaries) {
    REQUIRE(s.fit.has_value());
    CHECK(s.fit->slope == doctest::Approx(s.order + 1).epsilon(1e-12));
    CHECK(s.fit->r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.pass);
  }

  options.inject = [](long long k, int) { return 1.0 / k; };
  const auto flat = run_experiment(ex, options);
  CHECK(flat.exit_code == kExitSlopeFail);
  CHECK(flat.summaries[0].pass);
  CHECK_FALSE(flat.summaries[1].pass);

  options.inject = [](long long, int) { return std::nan(""); };
  CHECK(run_experiment(ex, options).exit_code == kExitNumerical);
}

TEST_CASE("constant symbols are flagged identically zero") {
  const auto cfg = load_config(std::filesystem::path(BTQ_SOURCE_DIR) / "configs/constants.json");
  const auto result = run_experiment(prepare_experiment(cfg));
  CHECK(result.exit_code == kExitPass);
  for (const auto& s : result.summaries) {
    CHECK(s.identically_zero);
    CHECK(s.pass);
    CHECK_FALSE(s.fit.has_value());
  }
}

TEST_CASE("config round trip") {
  for (const auto& name : demo_names()) {
    const auto cfg = demo_config(name);
    const auto back = parse_config(json::parse(config_to_json(cfg).dump()));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK(back.orders == cfg.orders);
    CHECK(back.margins == cfg.margins);
  }
  const auto cfg = parse_config(cp1_doc());
  CHECK(cfg.orders == std::vector<int>{0, 1});
  CHECK(cfg.levels.step == 4);
  CHECK(cfg.norm_method == NormMethod::kAuto);
  CHECK(cfg.slope_tolerance == 0.1);
}

TEST_CASE("config errors") {
  const auto expect_error = [](auto edit) {
    json doc = cp1_doc();
    edit(doc);
    CHECK_THROWS_AS(prepare_experiment(parse_config(doc)), ConfigError);
  };
  expect_error([](json& d) { d["bogus"] = 1; });
  expect_error([](json& d) { d.erase("f"); });
  expect_error([](json& d) { d["manifold"]["facets"][0]["lambda"] = "1"; });
  expect_error([](json& d) { d["manifold"]["facets"][0]["lambda"] = "1/3"; });
  expect_error([](json& d) { d["manifold"]["facets"][0]["normal"] = {2}; });
  expect_error([](json& d) { d["orders"] = {0, 0}; });
  expect_error([](json& d) { d["orders"] = {13}; });
  expect_error([](json& d) { d["orders"] = json::array(); });
  expect_error([](json& d) { d["levels"]["k_min"] = 20; });
  expect_error([](json& d) { d["levels"]["step"] = 3; });
  expect_error([](json& d) { d["levels"]["k_max"] = 1; });
  expect_error([](json& d) { d["region"]["margins"] = {"1/2"}; });
  expect_error([](json& d) { d["region"]["margins"] = {"5", "5"}; });
  expect_error([](json& d) { d["norm_method"] = "qr"; });
  expect_error([](json& d) { d["f"][0]["coef"] = "x7"; });
  expect_error([](json& d) { d["f"][0]["p"] = {0, 0}; });
  expect_error([](json& d) { d["slope_tolerance"] = -1; });
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  CHECK_THROWS_AS(demo_config("torus"), ConfigError);
}

TEST_CASE("coarse levels are dropped with a warning") {
  json doc = cp1_doc();
  doc["levels"] = {{"k_min", 1}, {"k_max", 9}, {"step", 2}};
  const auto ex = prepare_experiment(parse_config(doc));
  CHECK(ex.delta == Rational(1, 4));
  CHECK(ex.levels == std::vector<long long>{5, 7, 9});
  CHECK_FALSE(ex.warnings.empty());

  doc["levels"] = {{"k_min", 1}, {"k_max", 3}, {"step", 2}};
  const auto none = prepare_experiment(parse_config(doc));
  CHECK(none.levels.empty());
  CHECK(run_experiment(none).exit_code == kExitNoLevels);
}

TEST_CASE("non-smooth symbols are accepted with a warning") {
  json doc = cp1_doc();
  doc["f"][1]["coef"] = "1 + x1";
  const auto ex = prepare_experiment(parse_config(doc));
  CHECK_FALSE(ex.warnings.empty());
}

TEST_CASE("reports") {
  const auto ex = prepare_experiment(parse_config(cp1_doc()));
  const auto result = run_experiment(ex);
  const auto csv = records_csv(result.records);
  CHECK(csv.rfind("k,hbar,N,norm1,norm_inf,norm2,hoelder_bound,cols_V,dim_H\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 6);
  for (std::size_t i = 1; i < result.records.size(); ++i) {
    const auto& a = result.records[i - 1];
    const auto& b = result.records[i];
    CHECK((a.order < b.order || (a.order == b.order && a.k < b.k)));
  }
  const auto summary = summary_json(ex, result);
  CHECK(summary["orders"].size() == 2);
  CHECK(summary["exit_code"] == result.exit_code);
  CHECK(summary["delta"] == "1/4");
  const auto svg = convergence_svg(ex, result);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("N = 1") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "btq_test_reports";
  std::filesystem::remove_all(dir);
  write_reports(ex, result, dir, false);
  CHECK(std::filesystem::exists(dir / "convergence.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK_FALSE(std::filesystem::exists(dir / "convergence.svg"));
  CHECK(slurp(dir / "convergence.csv") == csv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("results do not depend on the number of jobs") {
  const auto ex = prepare_experiment(parse_config(cp1_doc()));
  RunOptions one;
  one.jobs = 1;
  RunOptions two;
  two.jobs = 2;
  const auto a = run_experiment(ex, one);
  const auto b = run_experiment(ex, two);
  CHECK(records_csv(a.records) == records_csv(b.records));
  CHECK(summary_json(ex, a).dump() == summary_json(ex, b).dump());
}

TEST_CASE("error norms decrease along the levels") {
  const auto ex = prepare_experiment(demo_config("cp1"));
  auto cfg = ex.config;
  cfg.levels = {41, 161, 40};
  const auto result = run_experiment(prepare_experiment(cfg));
  for (std::size_t i = 1; i < result.records.size(); ++i) {
    const auto& a = result.records[i - 1];
    const auto& b = result.records[i];
    if (a.order == b.order) CHECK(b.norms.norm2 < a.norms.norm2);
  }
}

TEST_CASE("shipped configs parse") {
  for (const auto& entry :
       std::filesystem::directory_iterator(std::filesystem::path(BTQ_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const auto ex = prepare_experiment(load_config(entry.path()));
    CHECK_FALSE(ex.levels.empty());
  }
}
