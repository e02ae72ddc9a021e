// eapt: run, validate and compare process-tomography experiments from a
// JSON config. Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "eapt/config.hpp"
#include "eapt/results.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool exact = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->required();
  cmd->add_option("--out", f.out, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", f.seed, "Seed (overrides the config)");
  cmd->add_option("--threads", f.threads, "Worker threads (overrides the config)")->check(CLI::Range(1, 256));
  cmd->add_flag("--exact", f.exact, "Use exact probabilities instead of shots");
  cmd->add_flag("--quiet", f.quiet, "Only print errors");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

eapt::ExperimentConfig load(const Flags& f) {
  eapt::ParsedConfig parsed = eapt::load_config(f.config);
  if (!parsed.ok()) throw eapt::ConfigError(std::move(parsed.diagnostics));
  eapt::ExperimentConfig cfg = std::move(*parsed.config);
  if (f.seed) {
    cfg.seed = *f.seed;
    cfg.seed_given = true;
  }
  if (f.threads) cfg.threads = *f.threads;
  if (f.exact) cfg.shots.reset();
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (!cfg.seed_given && !f.quiet) std::cerr << "note: seed not set; using the default seed 0\n";
  return cfg;
}

std::filesystem::path prepare_output(const eapt::ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  return cfg.output_dir;
}

void write_timing(const std::filesystem::path& dir, const std::string& command, const eapt::ExperimentConfig& cfg,
                  double seconds) {
  nlohmann::ordered_json t;
  t["command"] = command;
  t["threads"] = cfg.threads;
  t["wall_seconds"] = seconds;
  write_file(dir / "timing.json", t.dump(2) + "\n");
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_validate(const Flags& f) {
  const eapt::ParsedConfig parsed = eapt::load_config(f.config);
  for (const auto& d : parsed.diagnostics) std::cout << d.str() << "\n";
  if (!parsed.ok()) return kExitConfig;
  if (!f.quiet) std::cout << "config OK\n";
  return 0;
}

int cmd_run(const Flags& f) {
  const eapt::ExperimentConfig cfg = load(f);
  const auto start = std::chrono::steady_clock::now();
  const eapt::EaptResult result = eapt::run_eapt(eapt::make_target(cfg), eapt::make_options(cfg));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto dir = prepare_output(cfg);
  write_file(dir / "results.json", eapt::results_to_json(cfg, result).dump(2) + "\n");
  write_file(dir / "fidelities.csv", eapt::fidelities_csv(result));
  write_timing(dir, "run", cfg, seconds);
  if (cfg.save_datasets) {
    std::filesystem::create_directories(dir / "datasets");
    for (std::size_t k = 0; k < result.per_scale.size(); ++k) {
      const std::string s = std::to_string(result.per_scale[k].scale);
      write_file(dir / "datasets" / ("s" + s + "_state.json"), eapt::dataset_to_json(result.state_datasets[k]).dump() + "\n");
      write_file(dir / "datasets" / ("s" + s + "_process.json"),
                 eapt::dataset_to_json(result.process_datasets[k]).dump() + "\n");
    }
  }
  if (f.quiet) return 0;
  print_warnings(result.warnings);
  std::printf("%-10s %-16s %-16s\n", "scale", "state fidelity", "avg gate fidelity");
  auto row = [](const std::string& label, const eapt::Estimate& st, const std::optional<eapt::Estimate>& g) {
    std::printf("%-10s %-16.6f %s\n", label.c_str(), st.value, g ? std::to_string(g->value).c_str() : "n/a");
  };
  for (const auto& s : result.per_scale) row(std::to_string(s.scale), s.state_fidelity, s.gate_fidelity);
  if (result.mitigated_state_fidelity) row("mitigated", *result.mitigated_state_fidelity, result.mitigated_gate_fidelity);
  std::printf("wrote %s (%.2f s)\n", dir.string().c_str(), seconds);
  return 0;
}

int cmd_compare(const Flags& f) {
  const eapt::ExperimentConfig cfg = load(f);
  if (cfg.system_qubits > 2) {
    throw eapt::ConfigError({{eapt::Diagnostic::Severity::Error, "system_qubits",
                              "standard process tomography comparison supports at most 2 system qubits, got " +
                                  std::to_string(cfg.system_qubits)}});
  }
  const auto start = std::chrono::steady_clock::now();
  const eapt::ComparisonReport report = eapt::compare_methods(eapt::make_target(cfg), eapt::make_options(cfg));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto dir = prepare_output(cfg);
  write_file(dir / "comparison.json", eapt::comparison_to_json(cfg, report).dump(2) + "\n");
  write_timing(dir, "compare", cfg, seconds);
  if (f.quiet) return 0;
  print_warnings(report.eapt.warnings);
  std::printf("choi distance        %.3e\n", report.choi_distance);
  if (report.eapt_gate_fidelity) {
    std::printf("avg gate fidelity    eapt %.6f   qpt %.6f\n", *report.eapt_gate_fidelity, *report.qpt_gate_fidelity);
  }
  std::printf("circuit executions   eapt %lld   qpt %lld\n", static_cast<long long>(report.eapt_executions),
              static_cast<long long>(report.qpt_executions));
  std::printf("wrote %s (%.2f s)\n", dir.string().c_str(), seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement-assisted process tomography with error mitigation"};
  app.require_subcommand(1);
  Flags run_flags, validate_flags, compare_flags;
  auto* run = app.add_subcommand("run", "Run EAPT and write results");
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  auto* compare = app.add_subcommand("compare", "Compare EAPT with probe-state tomography");
  add_common(run, run_flags);
  add_common(validate, validate_flags);
  add_common(compare, compare_flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*validate) return cmd_validate(validate_flags);
    return cmd_compare(compare_flags);
  } catch (const eapt::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
