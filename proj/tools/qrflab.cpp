#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "qrf/scenario.hpp"

namespace {

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw qrf::config_error("cannot write " + out_path);
  out << text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qrflab: cyclic-group quantum-reference-frame laboratory"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  qrf::cli::RunOverrides overrides;
  double tolerance = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "scenario file (JSON)")
        ->required();
    cmd->add_option("--out", out_path, "write results here (default stdout)");
    cmd->add_option("--tolerance", tolerance, "override scenario tolerance");
    cmd->add_option("--seed", seed, "override scenario seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--workers", workers, "sweep worker threads");
  };

  CLI::App* verify = app.add_subcommand("verify", "run a property suite");
  CLI::App* game = app.add_subcommand("game", "run an accessibility game");
  CLI::App* sweep = app.add_subcommand("sweep", "grid-run a base scenario");
  add_common(verify);
  add_common(game);
  add_common(sweep);
  bool inject_parity = false;
  verify
      ->add_flag("--inject-parity-defect", inject_parity,
                 "test fixture: break the parity swap sign")
      ->group("");  // hidden

  CLI11_PARSE(app, argc, argv);

  if (tolerance > 0.0) overrides.tolerance = tolerance;
  if (seed_set) overrides.seed = seed;
  if (workers > 0) overrides.workers = workers;
  overrides.mutate_parity_sign = inject_parity;

  try {
    const qrf::cli::json scenario =
        qrf::cli::load_scenario_file(scenario_path);
    if (sweep->parsed()) {
      write_output(qrf::cli::run_sweep_csv(scenario, overrides), out_path);
      return 0;
    }
    const qrf::cli::json record = qrf::cli::run_scenario(scenario, overrides);
    write_output(record.dump(2), out_path);
    return qrf::cli::exit_code_for(record);
  } catch (const qrf::config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
