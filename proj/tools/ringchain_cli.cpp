// Command-line experiment runner: one subcommand per experiment, CSV outputs
// plus a JSON summary, optional golden-file regression comparison.
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ringchain/experiments.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"ringchain: excitonic transfer through chains of dimerized rings"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::string units = "dimensionless";
  std::string golden_path;
  int jobs = 1;
  app.add_option("--config", config_path, "Run config file (INI)")->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--jobs", jobs, "Worker pool size for sweep points")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--units", units, "Time units in outputs")
      ->check(CLI::IsMember({"dimensionless", "ps"}))
      ->capture_default_str();
  app.add_option("--golden", golden_path,
                 "Golden file or directory to compare outputs against");

  for (ringchain::Experiment e :
       {ringchain::Experiment::spectrum_compare, ringchain::Experiment::eigvec_compare,
        ringchain::Experiment::evolve, ringchain::Experiment::efficiency_sweep,
        ringchain::Experiment::dephasing_sweep, ringchain::Experiment::closed_forms,
        ringchain::Experiment::decomposition_check})
    app.add_subcommand(ringchain::to_string(e), "Run the " + ringchain::to_string(e) +
                                                    " experiment");

  CLI11_PARSE(app, argc, argv);

  try {
    ringchain::RunConfig config;
    if (!config_path.empty()) config = ringchain::load_config(config_path);
    config.experiment =
        ringchain::experiment_from_string(app.get_subcommands().front()->get_name());
    config.validate();

    const ringchain::UnitMode mode = units == "ps"
                                         ? ringchain::UnitMode::picoseconds
                                         : ringchain::UnitMode::dimensionless;
    const ringchain::RunResult result = ringchain::run(config, out_dir, jobs, mode);
    std::cout << result.summary.dump(2) << '\n';
    for (const fs::path& p : result.outputs) std::cerr << "wrote " << p.string() << '\n';

    if (!golden_path.empty()) {
      bool all_pass = true;
      const fs::path golden(golden_path);
      for (const fs::path& p : result.outputs) {
        if (p.extension() != ".csv") continue;
        const fs::path ref = fs::is_directory(golden) ? golden / p.filename() : golden;
        if (fs::is_directory(golden) && !fs::exists(ref)) continue;
        const ringchain::GoldenReport report = ringchain::compare_golden(p, ref);
        if (!report.pass) {
          all_pass = false;
          std::cerr << "golden mismatch in " << p.filename().string() << ": columns";
          for (const std::string& c : report.violations) std::cerr << ' ' << c;
          std::cerr << '\n';
        }
        if (!fs::is_directory(golden)) break;
      }
      if (!all_pass) return 3;
      std::cerr << "golden comparison passed\n";
    }
  } catch (const ringchain::validation_error& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
