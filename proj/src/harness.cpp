#include "btq/harness.hpp"

#include "btq/svg_plot.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

namespace btq {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(where + ": missing \"" + key + "\"");
  return obj.at(key);
}

Rational parse_rational_field(const json& value, const std::string& where) {
  try {
    if (value.is_number_integer()) return Rational(value.get<long long>());
    if (value.is_string()) return parse_rational(value.get<std::string>());
  } catch (const std::exception& e) {
    fail(where + ": " + e.what());
  }
  fail(where + ": expected a rational string \"p/q\" or an integer");
}

IntVec parse_int_vector(const json& value, const std::string& where) {
  if (!value.is_array()) fail(where + ": expected an integer array");
  IntVec out;
  for (const auto& v : value) {
    if (!v.is_number_integer()) fail(where + ": expected an integer array");
    out.push_back(v.get<long long>());
  }
  return out;
}

SymbolSpec parse_symbol_spec(const json& value, const std::string& where) {
  if (!value.is_array()) fail(where + ": expected a list of {p, coef}");
  SymbolSpec out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    const auto& entry = value[i];
    IntVec p = parse_int_vector(require(entry, "p", at), at + ".p");
    const auto& coef = require(entry, "coef", at);
    if (!coef.is_string()) fail(at + ".coef: expected an expression string");
    out.emplace_back(std::move(p), coef.get<std::string>());
  }
  return out;
}

long long get_int(const json& value, const std::string& where) {
  if (!value.is_number_integer()) fail(where + ": expected an integer");
  return value.get<long long>();
}

std::string get_string(const json& value, const std::string& where) {
  if (!value.is_string()) fail(where + ": expected a string");
  return value.get<std::string>();
}

ordered_json symbol_to_json(const SymbolSpec& spec) {
  ordered_json out = ordered_json::array();
  for (const auto& [p, coef] : spec) out.push_back({{"p", p}, {"coef", coef}});
  return out;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("config: expected a JSON object");
  static const char* const known[] = {"name",   "manifold",    "f",     "g",
                                      "region", "orders",      "levels", "norm_method",
                                      "slope_tolerance", "seed", "output"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known)) {
      fail("config: unknown key \"" + key + "\"");
    }
  }

  ExperimentConfig cfg;
  if (doc.contains("name")) cfg.name = get_string(doc["name"], "name");

  const auto& manifold = require(doc, "manifold", "config");
  const auto& facets = require(manifold, "facets", "manifold");
  if (!facets.is_array() || facets.empty()) fail("manifold.facets: expected a nonempty list");
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const std::string at = "manifold.facets[" + std::to_string(i) + "]";
    Facet facet;
    facet.normal = parse_int_vector(require(facets[i], "normal", at), at + ".normal");
    const Rational lambda = parse_rational_field(require(facets[i], "lambda", at), at + ".lambda");
    const Rational twice = lambda * 2;
    if (twice.denominator() != 1 || twice.numerator() % 2 == 0) {
      fail(at + ".lambda: must be a half-integer p/2 with p odd");
    }
    facet.twice_offset = twice.numerator();
    cfg.facets.push_back(std::move(facet));
  }
  cfg.dim = cfg.facets.front().normal.size();
  if (manifold.contains("dimension") &&
      get_int(manifold["dimension"], "manifold.dimension") != static_cast<long long>(cfg.dim)) {
    fail("manifold.dimension disagrees with the facet normals");
  }

  cfg.f = parse_symbol_spec(require(doc, "f", "config"), "f");
  cfg.g = parse_symbol_spec(require(doc, "g", "config"), "g");

  const auto& margins = require(require(doc, "region", "config"), "margins", "region");
  if (!margins.is_array()) fail("region.margins: expected a list");
  for (std::size_t i = 0; i < margins.size(); ++i) {
    cfg.margins.push_back(
        parse_rational_field(margins[i], "region.margins[" + std::to_string(i) + "]"));
  }

  const auto& orders = require(doc, "orders", "config");
  if (!orders.is_array() || orders.empty()) fail("orders: expected a nonempty list");
  for (const auto& o : orders) {
    const long long n = get_int(o, "orders");
    if (n < 0 || n > kMaxStarOrder) {
      fail("orders: each N must lie in 0.." + std::to_string(kMaxStarOrder));
    }
    cfg.orders.push_back(static_cast<int>(n));
  }
  std::sort(cfg.orders.begin(), cfg.orders.end());
  if (std::adjacent_find(cfg.orders.begin(), cfg.orders.end()) != cfg.orders.end()) {
    fail("orders: duplicate entries");
  }

  const auto& levels = require(doc, "levels", "config");
  cfg.levels.k_min = get_int(require(levels, "k_min", "levels"), "levels.k_min");
  cfg.levels.k_max = get_int(require(levels, "k_max", "levels"), "levels.k_max");
  if (levels.contains("step")) cfg.levels.step = get_int(levels["step"], "levels.step");
  if (cfg.levels.k_min < 1 || cfg.levels.k_min % 2 == 0) fail("levels.k_min: must be odd and >= 1");
  if (cfg.levels.k_max < cfg.levels.k_min) fail("levels.k_max: must be >= k_min");
  if (cfg.levels.step < 2 || cfg.levels.step % 2 != 0) {
    fail("levels.step: must be a positive even number (levels stay odd)");
  }

  if (doc.contains("norm_method")) {
    try {
      cfg.norm_method = parse_norm_method(get_string(doc["norm_method"], "norm_method"));
    } catch (const std::invalid_argument& e) {
      fail(std::string("norm_method: ") + e.what());
    }
  }
  if (doc.contains("slope_tolerance")) {
    const auto& t = doc["slope_tolerance"];
    if (!t.is_number() || t.get<double>() < 0.0) fail("slope_tolerance: expected a number >= 0");
    cfg.slope_tolerance = t.get<double>();
  }
  if (doc.contains("seed")) {
    const auto& s = doc["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      fail("seed: expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    const auto& out = doc["output"];
    if (!out.is_object()) fail("output: expected an object");
    if (out.contains("dir")) cfg.output.dir = get_string(out["dir"], "output.dir");
    if (out.contains("csv")) cfg.output.csv = get_string(out["csv"], "output.csv");
    if (out.contains("json")) cfg.output.json = get_string(out["json"], "output.json");
    if (out.contains("svg")) cfg.output.svg = get_string(out["svg"], "output.svg");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

ordered_json config_to_json(const ExperimentConfig& config) {
  ordered_json doc;
  if (!config.name.empty()) doc["name"] = config.name;
  ordered_json facets = ordered_json::array();
  for (const auto& f : config.facets) {
    facets.push_back({{"normal", f.normal}, {"lambda", format_rational(f.offset())}});
  }
  doc["manifold"] = {{"facets", facets}};
  doc["f"] = symbol_to_json(config.f);
  doc["g"] = symbol_to_json(config.g);
  ordered_json margins = ordered_json::array();
  for (const auto& c : config.margins) margins.push_back(format_rational(c));
  doc["region"] = {{"margins", margins}};
  doc["orders"] = config.orders;
  doc["levels"] = {{"k_min", config.levels.k_min},
                   {"k_max", config.levels.k_max},
                   {"step", config.levels.step}};
  doc["norm_method"] = std::string(to_string(config.norm_method));
  doc["slope_tolerance"] = config.slope_tolerance;
  doc["seed"] = config.seed;
  doc["output"] = {{"dir", config.output.dir},
                   {"csv", config.output.csv},
                   {"json", config.output.json},
                   {"svg", config.output.svg}};
  return doc;
}

namespace {

// Bands <= 2 on the interval [-1/2, 3/2]; every nonzero mode carries the
// profile (lF1 lF2)^{|p|/2}.
constexpr const char* kCp1 = R"cfg({
  "name": "cp1",
  "manifold": { "facets": [ {"normal": [1], "lambda": "1/2"},
                            {"normal": [-1], "lambda": "3/2"} ] },
  "f": [ {"p": [-2], "coef": "1/3*lF1*lF2"},
         {"p": [-1], "coef": "lF1^(1/2)*lF2^(1/2)*(1 - x1)"},
         {"p": [0],  "coef": "1 + x1 - 1/2*x1^2"},
         {"p": [1],  "coef": "lF1^(1/2)*lF2^(1/2)*(2 + x1)"},
         {"p": [2],  "coef": "lF1*lF2*(1/2 + x1^2)"} ],
  "g": [ {"p": [-2], "coef": "1/4*lF1*lF2*x1"},
         {"p": [-1], "coef": "lF1^(1/2)*lF2^(1/2)*(1/2 + 1/3*x1)"},
         {"p": [0],  "coef": "exp(1/2*x1)"},
         {"p": [1],  "coef": "lF1^(1/2)*lF2^(1/2)*cos(x1)"},
         {"p": [2],  "coef": "lF1*lF2*sin(x1 + 1)"} ],
  "region": { "margins": ["1/2", "1/2"] },
  "orders": [0, 1, 2],
  "levels": { "k_min": 21, "k_max": 201, "step": 2 },
  "norm_method": "svd",
  "slope_tolerance": 0.1,
  "seed": 1,
  "output": { "dir": "out/cp1" }
})cfg";

// Unit square [-1/2, 1/2]^2, bands <= 1. The Gaussian factor on g puts the
// peak of the error density at the lattice point x = 0 rather than on the
// edge of V, where coarse lattices undersample it.
constexpr const char* kSquare = R"cfg({
  "name": "square",
  "manifold": { "facets": [ {"normal": [1, 0], "lambda": "1/2"},
                            {"normal": [0, 1], "lambda": "1/2"},
                            {"normal": [-1, 0], "lambda": "1/2"},
                            {"normal": [0, -1], "lambda": "1/2"} ] },
  "f": [ {"p": [0, -1], "coef": "1/10*lF2^(1/2)*lF4^(1/2)*(1 + x1)"},
         {"p": [0, 0],  "coef": "exp(1/2*x1 + 1/3*x2)"},
         {"p": [1, 0],  "coef": "1/10*lF1^(1/2)*lF3^(1/2)"} ],
  "g": [ {"p": [-1, 0], "coef": "lF1^(1/2)*lF3^(1/2)*(1 - x2)*exp(-4*x1^2 - 4*x2^2)"},
         {"p": [0, 0],  "coef": "exp(1/2*x1 - 1/3*x2 - 4*x1^2 - 4*x2^2)"},
         {"p": [0, 1],  "coef": "lF2^(1/2)*lF4^(1/2)*(1/2 + x1)*exp(-4*x1^2 - 4*x2^2)"},
         {"p": [1, 1],  "coef": "lF1^(1/2)*lF3^(1/2)*lF2^(1/2)*lF4^(1/2)*sin(x1 + x2)*exp(-4*x1^2 - 4*x2^2)"} ],
  "region": { "margins": ["1/4", "1/4", "1/4", "1/4"] },
  "orders": [0, 1],
  "levels": { "k_min": 11, "k_max": 61, "step": 2 },
  "norm_method": "svd",
  "slope_tolerance": 0.1,
  "seed": 1,
  "output": { "dir": "out/square" }
})cfg";

// CP1 x CP1 as the rectangle [-1/2, 3/2]^2.
constexpr const char* kCp1xCp1 = R"cfg({
  "name": "cp1xcp1",
  "manifold": { "facets": [ {"normal": [1, 0], "lambda": "1/2"},
                            {"normal": [-1, 0], "lambda": "3/2"},
                            {"normal": [0, 1], "lambda": "1/2"},
                            {"normal": [0, -1], "lambda": "3/2"} ] },
  "f": [ {"p": [0, 0], "coef": "1 + x1 - x2^2"},
         {"p": [1, 0], "coef": "lF1^(1/2)*lF2^(1/2)*(1 + x2)"},
         {"p": [0, -1], "coef": "lF3^(1/2)*lF4^(1/2)*exp(1/2*x1)"} ],
  "g": [ {"p": [0, 0], "coef": "cos(x1 - x2)"},
         {"p": [-1, 1], "coef": "lF1^(1/2)*lF2^(1/2)*lF3^(1/2)*lF4^(1/2)"},
         {"p": [0, 1], "coef": "lF3^(1/2)*lF4^(1/2)*(1/2 + x1*x2)"} ],
  "region": { "margins": ["1/2", "1/2", "1/2", "1/2"] },
  "orders": [0, 1],
  "levels": { "k_min": 9, "k_max": 33, "step": 2 },
  "norm_method": "svd",
  "slope_tolerance": 0.1,
  "seed": 1,
  "output": { "dir": "out/cp1xcp1" }
})cfg";

}  // namespace

std::vector<std::string> demo_names() { return {"cp1", "cp1xcp1", "square"}; }

ExperimentConfig demo_config(std::string_view name) {
  const char* text = nullptr;
  if (name == "cp1") text = kCp1;
  if (name == "square") text = kSquare;
  if (name == "cp1xcp1") text = kCp1xCp1;
  if (text == nullptr) {
    fail("unknown demo '" + std::string(name) + "' (expected cp1, cp1xcp1 or square)");
  }
  return parse_config(json::parse(text));
}

Experiment prepare_experiment(const ExperimentConfig& config) {
  PolytopePtr polytope;
  try {
    polytope = make_polytope(config.dim, config.facets);
  } catch (const std::invalid_argument& e) {
    fail(std::string("manifold: ") + e.what());
  }
  const auto build_symbol = [&](const SymbolSpec& spec, const char* which) {
    try {
      return parse_symbol(polytope, spec);
    } catch (const std::exception& e) {
      fail(std::string(which) + ": " + e.what());
    }
  };
  Symbol f = build_symbol(config.f, "f");
  Symbol g = build_symbol(config.g, "g");

  if (config.margins.size() != config.facets.size()) {
    fail("region.margins: need one margin per facet (" + std::to_string(config.facets.size()) +
         ")");
  }
  std::optional<Region> region;
  try {
    region.emplace(config.margins);
  } catch (const std::invalid_argument& e) {
    fail(std::string("region: ") + e.what());
  }
  if (region_is_empty(*polytope, *region)) fail("region: the closed region is empty");
  const auto shifts = g.mode_indices();
  const Rational delta = shift_safety_threshold(*polytope, *region, shifts);

  Experiment ex{config, polytope, std::move(f), std::move(g), std::move(*region), delta, {}, {}};
  for (const auto* sym : {&ex.f, &ex.g}) {
    const auto report = smoothness_check(*sym);
    if (!report.ok) {
      ex.warnings.push_back(std::string(sym == &ex.f ? "f" : "g") + ": " +
                            std::to_string(report.violations.size()) +
                            " smoothness violation(s); a mode p must vanish on every facet "
                            "with <p, nu_F> != 0");
    }
  }
  for (long long k = config.levels.k_min; k <= config.levels.k_max; k += config.levels.step) {
    if (k < polytope->min_level()) {
      ex.warnings.push_back("skipping k=" + std::to_string(k) + ": below the minimal level " +
                            std::to_string(polytope->min_level()));
      continue;
    }
    if (!(Rational(1, k) < delta)) {
      ex.warnings.push_back("skipping k=" + std::to_string(k) + ": 1/k violates the shift guard " +
                            format_rational(delta));
      continue;
    }
    ex.levels.push_back(k);
  }
  return ex;
}

SlopeFit fit_slope(std::span<const std::pair<double, double>> points) {
  SlopeFit fit;
  std::vector<std::pair<double, double>> logs;
  for (auto [h, v] : points) {
    if (!(h > 0.0)) throw std::invalid_argument("fit_slope: hbar must be positive");
    if (v > 0.0 && std::isfinite(v)) {
      logs.emplace_back(std::log(h), std::log(v));
    } else {
      ++fit.dropped;
    }
  }
  fit.points = logs.size();
  if (logs.size() < 3) {
    throw std::invalid_argument("fit_slope: need at least 3 positive values, got " +
                                std::to_string(logs.size()));
  }
  double mx = 0.0;
  double my = 0.0;
  for (auto [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(logs.size());
  my /= static_cast<double>(logs.size());
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (auto [x, y] : logs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: all hbar values coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (auto [x, y] : logs) {
    const double r = y - (fit.intercept + fit.slope * x);
    sse += r * r;
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - sse / syy;
  return fit;
}

namespace {

// Relative slack for norm2 <= sqrt(norm1 norm_inf): both sides are rounded.
constexpr double kHoelderSlack = 1e-12;

bool numerically_sane(const NormBundle& b) {
  const double v[] = {b.norm1, b.norm_inf, b.norm2, b.hoelder_bound};
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) return false;
  }
  return b.norm2 <= b.hoelder_bound * (1.0 + kHoelderSlack);
}

}  // namespace

ExperimentResult run_experiment(const Experiment& ex, const RunOptions& options) {
  ExperimentResult result;
  result.warnings = ex.warnings;
  result.levels = ex.levels;
  if (ex.levels.empty()) {
    result.warnings.push_back("no admissible levels");
    result.exit_code = kExitNoLevels;
    return result;
  }

  const auto nlevels = static_cast<std::ptrdiff_t>(ex.levels.size());
  std::vector<std::vector<ConvergenceRecord>> per_level(ex.levels.size());
  std::vector<std::exception_ptr> errors(ex.levels.size());
  const int jobs = options.jobs > 0 ? options.jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::ptrdiff_t i = 0; i < nlevels; ++i) {
    try {
      const long long k = ex.levels[static_cast<std::size_t>(i)];
      const auto basis = lattice_points(ex.polytope, k);
      const auto cols = region_lattice(basis, ex.region);
      auto& out = per_level[static_cast<std::size_t>(i)];
      if (options.inject) {
        for (int n : ex.config.orders) {
          const double v = options.inject(k, n);
          NormBundle b{v, v, v, v, ex.config.norm_method, false};
          out.push_back({k, basis.hbar(), n, b, cols.size(), basis.size()});
        }
      } else {
        const auto ops = error_operators(ex.f, ex.g, ex.config.orders, basis, ex.region);
        for (const auto& op : ops) {
          if (options.on_matrix) {
#pragma omp critical(btq_on_matrix)
            options.on_matrix(op);
          }
          out.push_back({k, basis.hbar(), op.order, compute_norms(op.matrix, ex.config.norm_method),
                         cols.size(), basis.size()});
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (auto& lv : per_level) {
    for (auto& r : lv) result.records.push_back(r);
  }
  std::sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
    return a.order != b.order ? a.order < b.order : a.k < b.k;
  });

  bool numerical_failure = false;
  for (const auto& r : result.records) {
    if (!numerically_sane(r.norms)) {
      numerical_failure = true;
      result.warnings.push_back("numerical failure at k=" + std::to_string(r.k) +
                                " N=" + std::to_string(r.order));
    }
  }

  bool all_pass = true;
  for (int n : ex.config.orders) {
    OrderSummary s;
    s.order = n;
    std::vector<std::pair<double, double>> pts;
    bool all_zero = true;
    for (const auto& r : result.records) {
      if (r.order != n) continue;
      pts.emplace_back(r.hbar, r.norms.norm2);
      if (r.norms.norm2 != 0.0) all_zero = false;
    }
    if (all_zero) {
      s.identically_zero = true;
      s.pass = true;
      s.note = "identically zero; slope fit skipped";
    } else {
      try {
        s.fit = fit_slope(pts);
        s.levels_used = s.fit->points;
        s.pass = s.fit->slope >= static_cast<double>(n + 1) - ex.config.slope_tolerance;
        if (s.fit->dropped > 0) {
          s.note = std::to_string(s.fit->dropped) + " zero-norm level(s) excluded from the fit";
        }
      } catch (const std::invalid_argument& e) {
        s.note = e.what();
        s.pass = false;
      }
    }
    all_pass = all_pass && s.pass;
    result.summaries.push_back(std::move(s));
  }
  result.exit_code = numerical_failure ? kExitNumerical : (all_pass ? kExitPass : kExitSlopeFail);
  return result;
}

std::string records_csv(const std::vector<ConvergenceRecord>& records) {
  std::string out = "k,hbar,N,norm1,norm_inf,norm2,hoelder_bound,cols_V,dim_H\n";
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%zu,%zu\n", r.k, r.hbar,
                  r.order, r.norms.norm1, r.norms.norm_inf, r.norms.norm2, r.norms.hoelder_bound,
                  r.cols_v, r.dim_h);
    out += buf;
  }
  return out;
}

ordered_json summary_json(const Experiment& ex, const ExperimentResult& result) {
  ordered_json doc;
  doc["name"] = ex.config.name;
  doc["delta"] = format_rational(ex.delta);
  doc["min_level"] = ex.polytope->min_level();
  doc["levels"] = result.levels;
  doc["slope_tolerance"] = ex.config.slope_tolerance;
  ordered_json orders = ordered_json::array();
  for (const auto& s : result.summaries) {
    ordered_json o;
    o["N"] = s.order;
    if (s.fit) {
      o["slope"] = s.fit->slope;
      o["intercept"] = s.fit->intercept;
      o["r2"] = s.fit->r2;
    } else {
      o["slope"] = nullptr;
      o["intercept"] = nullptr;
      o["r2"] = nullptr;
    }
    o["levels_used"] = s.levels_used;
    o["pass"] = s.pass;
    o["identically_zero"] = s.identically_zero;
    if (!s.note.empty()) o["note"] = s.note;
    orders.push_back(std::move(o));
  }
  doc["orders"] = std::move(orders);
  doc["warnings"] = result.warnings;
  doc["exit_code"] = result.exit_code;
  return doc;
}

std::string convergence_svg(const Experiment& ex, const ExperimentResult& result) {
  std::vector<PlotSeries> series;
  for (int n : ex.config.orders) {
    PlotSeries s{"N = " + std::to_string(n), {}};
    for (const auto& r : result.records) {
      if (r.order == n) s.points.emplace_back(r.hbar, r.norms.norm2);
    }
    series.push_back(std::move(s));
  }
  const std::string title =
      (ex.config.name.empty() ? std::string("error operator") : ex.config.name) +
      ": spectral norm on V vs hbar";
  return render_loglog_svg(series, title, "hbar = 1/k", "||E_N restricted to V||_2");
}

void write_reports(const Experiment& ex, const ExperimentResult& result,
                   const std::filesystem::path& dir, bool plot) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };
  for (const auto& r : result.records) {
    if (!numerically_sane(r.norms) && result.exit_code != kExitNumerical) {
      throw std::logic_error("record violates the Hoelder bound at write time");
    }
  }
  write(ex.config.output.csv, records_csv(result.records));
  write(ex.config.output.json, summary_json(ex, result).dump(2) + "\n");
  if (plot) write(ex.config.output.svg, convergence_svg(ex, result));
}

}  // namespace btq
