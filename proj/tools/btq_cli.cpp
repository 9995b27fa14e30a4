#include "btq/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>

namespace {

struct Flags {
  std::string norm_method;
  std::string out_dir;
  bool no_plot = false;
  int jobs = 0;
  bool dump_matrices = false;
};

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int execute(btq::ExperimentConfig config, const Flags& flags) {
  if (!flags.norm_method.empty()) config.norm_method = btq::parse_norm_method(flags.norm_method);
  if (!flags.out_dir.empty()) config.output.dir = flags.out_dir;
  const auto experiment = btq::prepare_experiment(config);
  std::cerr << "levels: " << experiment.levels.size() << " admissible, delta = "
            << btq::format_rational(experiment.delta)
            << ", k0 = " << experiment.polytope->min_level() << '\n';

  const std::filesystem::path dir = config.output.dir;
  btq::RunOptions options;
  options.jobs = flags.jobs;
  std::mutex dump_mutex;
  if (flags.dump_matrices) {
    std::filesystem::create_directories(dir / "matrices");
    options.on_matrix = [&](const btq::ErrorOperator& op) {
      std::lock_guard lock(dump_mutex);
      const auto name = "E_N" + std::to_string(op.order) + "_k" + std::to_string(op.level) + ".txt";
      std::ofstream out(dir / "matrices" / name);
      btq::write_matrix(out, op.matrix, experiment.polytope->dim(), op.level);
    };
  }

  const auto result = btq::run_experiment(experiment, options);
  print_warnings(result.warnings);
  if (result.exit_code == btq::kExitNoLevels) return result.exit_code;
  btq::write_reports(experiment, result, dir, !flags.no_plot);

  for (const auto& s : result.summaries) {
    std::cout << "N=" << s.order << ' ';
    if (s.identically_zero) {
      std::cout << "identically zero";
    } else if (s.fit) {
      std::cout << "slope=" << s.fit->slope << " intercept=" << s.fit->intercept
                << " r2=" << s.fit->r2 << " levels=" << s.levels_used;
    } else {
      std::cout << "no fit (" << s.note << ')';
    }
    std::cout << (s.pass ? "  PASS" : "  FAIL") << '\n';
  }
  std::cout << "reports written to " << dir.string() << '\n';
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toeplitz quantization convergence harness"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--norm-method", flags.norm_method, "auto, svd or power")
      ->check(CLI::IsMember({"auto", "svd", "power", "exact-svd", "power-iteration"}));
  app.add_option("--out-dir", flags.out_dir, "Directory for CSV/JSON/SVG reports");
  app.add_flag("--no-plot", flags.no_plot, "Skip the SVG plot");
  app.add_option("--jobs", flags.jobs, "Levels computed in parallel (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--dump-matrices", flags.dump_matrices,
               "Write every error operator as text under <out-dir>/matrices");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the level sweep of a config file");
  run->add_option("config", config_path, "Config file")->required();
  auto* validate = app.add_subcommand("validate", "Check a config file without running it");
  validate->add_option("config", config_path, "Config file")->required();
  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "Run a built-in preset");
  demo->add_option("name", demo_name, "cp1, cp1xcp1 or square")
      ->required()
      ->check(CLI::IsMember(btq::demo_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : btq::kExitConfig;
  }

  try {
    if (*validate) {
      const auto experiment = btq::prepare_experiment(btq::load_config(config_path));
      print_warnings(experiment.warnings);
      std::cout << "ok: " << experiment.levels.size() << " admissible level(s), delta = "
                << btq::format_rational(experiment.delta)
                << ", k0 = " << experiment.polytope->min_level() << '\n';
      return experiment.levels.empty() ? btq::kExitNoLevels : btq::kExitPass;
    }
    if (*run) return execute(btq::load_config(config_path), flags);
    return execute(btq::demo_config(demo_name), flags);
  } catch (const btq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return btq::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return btq::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return btq::kExitNumerical;
  }
}
