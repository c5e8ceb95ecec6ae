// vddc: command-line front end for the contract solvers and PHC learner.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vddc/vddc.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kConfigError = 2, kSolverError = 3, kNotConverged = 4 };

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool oracle = false;
  bool strict = false;
};

int execute(vddc::Mode verb, const Options& opt) {
  vddc::ExperimentConfig cfg = vddc::load_config(opt.config);
  if (cfg.mode != verb)
    throw vddc::ValidationError("mode", "config is for '" + vddc::to_string(cfg.mode) + "', not '" +
                                            vddc::to_string(verb) + "'");
  if (opt.seed) cfg.seeds = {*opt.seed};
  if (opt.out) cfg.output_dir = *opt.out;
  if (cfg.mode == vddc::Mode::phc && cfg.seeds.empty())
    throw vddc::ValidationError("seeds", "phc mode requires at least one seed");

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  std::vector<std::string> outputs;
  auto emit = [&](const std::string& name, const std::string& text) {
    vddc::write_file_atomic(dir / name, text);
    outputs.push_back(name);
  };

  int code = kOk;
  switch (cfg.mode) {
  case vddc::Mode::solve: {
    const auto rep = vddc::run_solve(cfg, opt.oracle);
    emit("solve.csv", vddc::solve_csv(cfg.scenario, rep));
    emit("trace.json", vddc::solve_trace_json(rep).dump(2) + "\n");
    std::cout << "gcs_utility " << vddc::format_number(rep.metrics.gcs_utility) << "  zeta "
              << vddc::format_number(rep.metrics.zeta) << "\n";
    if (rep.oracle)
      std::cout << "oracle gcs_utility " << vddc::format_number(rep.oracle->gcs_utility) << "  bound "
                << vddc::format_number(rep.oracle_bound) << "\n";
    break;
  }
  case vddc::Mode::compare: {
    const auto rows = vddc::run_compare(cfg);
    emit("compare.csv", vddc::compare_csv(rows));
    for (const auto& r : rows)
      std::cout << r.scheme << "  gcs_utility " << vddc::format_number(r.gcs_utility) << "  zeta "
                << vddc::format_number(r.zeta) << "\n";
    break;
  }
  case vddc::Mode::sweep_cost:
    emit("sweep_cost.csv", vddc::sweep_cost_csv(vddc::run_sweep_cost(cfg)));
    break;
  case vddc::Mode::sweep_population:
    emit("sweep_population.csv", vddc::sweep_population_csv(vddc::run_sweep_population(cfg)));
    break;
  case vddc::Mode::phc: {
    const auto run = vddc::run_phc(cfg);
    for (const auto& s : run.seeds) {
      emit("phc_seed_" + std::to_string(s.seed) + ".csv", vddc::phc_log_csv(s.log));
      std::cout << "seed " << s.seed << (s.converged() ? "  converged" : "  not converged");
      if (s.convergence_slot) std::cout << " at slot " << *s.convergence_slot;
      std::cout << "  (" << vddc::format_number(s.wall_seconds) << " s)\n";
      if (!s.converged() && opt.strict) code = kNotConverged;
    }
    emit("phc_summary.csv", vddc::phc_summary_csv(cfg.scenario, run));
    break;
  }
  }
  vddc::write_file_atomic(dir / "manifest.json", vddc::manifest_json(cfg, outputs));
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"VDD contract design and learning experiments"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::pair<vddc::Mode, std::string>> verbs{
      {vddc::Mode::solve, "Solve the partial-information menu"},
      {vddc::Mode::compare, "Compare the four contract schemes"},
      {vddc::Mode::sweep_cost, "Sweep one type's marginal cost"},
      {vddc::Mode::sweep_population, "Sweep the UAV population"},
      {vddc::Mode::phc, "Train the two-tier PHC learner"},
  };
  for (const auto& [mode, help] : verbs) {
    auto* sub = app.add_subcommand(vddc::to_string(mode), help);
    sub->add_option("--config", opt.config, "Experiment config (JSON)")->required();
    sub->add_option("--out", opt.out, "Output directory (overrides the config)");
    sub->add_option("--seed", opt.seed, "Single seed (overrides the config)");
    if (mode == vddc::Mode::solve) sub->add_flag("--oracle", opt.oracle, "Cross-check against the grid oracle");
    if (mode == vddc::Mode::phc) sub->add_flag("--strict", opt.strict, "Exit 4 if any seed fails to converge");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  const auto* chosen = app.get_subcommands().front();
  try {
    return execute(vddc::parse_mode(chosen->get_name()), opt);
  } catch (const vddc::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const vddc::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverError;
  }
}
