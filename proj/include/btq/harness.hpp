#pragma once

// Level sweeps of the error operator, slope fits and report writers.
//
// Config file (JSON):
//
//   {
//     "name": "cp1",                                  optional
//     "manifold": { "facets": [ {"normal": [1], "lambda": "1/2"}, ... ] },
//     "f": [ {"p": [0], "coef": "1 + x1"}, ... ],
//     "g": [ ... ],
//     "region": { "margins": ["1/2", "1/2"] },         one per facet
//     "orders": [0, 1, 2],
//     "levels": { "k_min": 21, "k_max": 201, "step": 2 },
//     "norm_method": "auto" | "svd" | "power",         optional, auto
//     "slope_tolerance": 0.1,                         optional
//     "seed": 0,                                      optional
//     "output": { "dir": "out", "csv": "convergence.csv", "json": "summary.json",
//                 "svg": "convergence.svg" }          optional
//   }
//
// Rationals ("lambda", "margins") are strings "p" or "p/q", or JSON integers.
// Coefficients use the expression grammar of btq/expression.hpp.

#include "btq/operator_norms.hpp"
#include "btq/quantization.hpp"
#include "btq/symbols.hpp"
#include "btq/toric_geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace btq {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum ExitCode : int {
  kExitPass = 0,
  kExitSlopeFail = 1,
  kExitConfig = 2,
  kExitNoLevels = 3,
  kExitNumerical = 4,
};

struct LevelRange {
  long long k_min = 0;
  long long k_max = 0;
  long long step = 2;  // increment between odd levels, even
};

struct OutputSpec {
  std::string dir = "out";
  std::string csv = "convergence.csv";
  std::string json = "summary.json";
  std::string svg = "convergence.svg";
};

using SymbolSpec = std::vector<std::pair<IntVec, std::string>>;

struct ExperimentConfig {
  std::string name;
  std::size_t dim = 0;
  std::vector<Facet> facets;
  SymbolSpec f;
  SymbolSpec g;
  RatVec margins;
  std::vector<int> orders;
  LevelRange levels;
  NormMethod norm_method = NormMethod::kAuto;
  double slope_tolerance = 0.1;
  std::uint64_t seed = 0;
  OutputSpec output;
};

/// Parses and validates the schema. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

/// Built-in presets: "cp1", "cp1xcp1", "square".
ExperimentConfig demo_config(std::string_view name);
std::vector<std::string> demo_names();

/// Everything derived from a config before any matrix is built.
struct Experiment {
  ExperimentConfig config;
  PolytopePtr polytope;
  Symbol f;
  Symbol g;
  Region region;
  Rational delta;
  std::vector<long long> levels;  // admissible, ascending
  std::vector<std::string> warnings;
};

/// Throws ConfigError on anything that is not a valid experiment.
/// Levels failing k >= k0 or 1/k < delta are dropped with a warning.
Experiment prepare_experiment(const ExperimentConfig& config);

struct ConvergenceRecord {
  long long k = 0;
  double hbar = 0.0;
  int order = 0;
  NormBundle norms;
  std::size_t cols_v = 0;
  std::size_t dim_h = 0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
  std::size_t dropped = 0;  // non-positive values filtered out
};

/// OLS of log(value) on log(hbar). Throws std::invalid_argument with fewer
/// than three positive values.
SlopeFit fit_slope(std::span<const std::pair<double, double>> points);

struct OrderSummary {
  int order = 0;
  std::optional<SlopeFit> fit;
  std::size_t levels_used = 0;
  bool identically_zero = false;
  bool pass = false;
  std::string note;
};

struct ExperimentResult {
  std::vector<ConvergenceRecord> records;  // sorted by (N, k)
  std::vector<OrderSummary> summaries;     // one per order, ascending
  std::vector<long long> levels;
  std::vector<std::string> warnings;
  int exit_code = kExitPass;
};

/// Test hook: replaces every computed matrix norm by value(k, N).
using NormInjector = std::function<double(long long k, int order)>;

struct RunOptions {
  int jobs = 0;  // 0 = OpenMP default
  NormInjector inject;
  /// Called with each error operator before its norms are taken.
  std::function<void(const ErrorOperator&)> on_matrix;
};

ExperimentResult run_experiment(const Experiment& experiment, const RunOptions& options = {});

std::string records_csv(const std::vector<ConvergenceRecord>& records);
nlohmann::ordered_json summary_json(const Experiment& experiment, const ExperimentResult& result);
std::string convergence_svg(const Experiment& experiment, const ExperimentResult& result);

/// Writes CSV, JSON and optionally SVG under `dir`.
void write_reports(const Experiment& experiment, const ExperimentResult& result,
                   const std::filesystem::path& dir, bool plot);

}  // namespace btq
