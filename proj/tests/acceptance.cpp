// Acceptance checks. Each criterion prints one PASS/FAIL line with the
// measured quantities; the exit status is nonzero if any criterion fails.

#include "eapt/circuits.hpp"
#include "eapt/metrics.hpp"
#include "eapt/pipeline.hpp"

#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

using namespace eapt;
using namespace eapt::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

EaptOptions exact_options(std::vector<int> scales) {
  EaptOptions o;
  o.scales = std::move(scales);
  return o;
}

Verdict noiseless_cnot() {
  const auto start = Clock::now();
  const EaptResult r = run_eapt(TargetProcess::cnot(), exact_options({1}));
  const double secs = seconds_since(start);
  const double f = r.per_scale[0].gate_fidelity->value;
  const double dist = choi_distance(r.choi, TargetProcess::cnot().unitary_matrix());
  return {f >= 1 - 1e-6 && dist < 1e-4 && secs < 60,
          fmt("F_avg = %.12f, Choi distance = %.3e, %.2f s", f, dist, secs)};
}

Verdict qpt_equivalence() {
  Rng rng(20240601);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Matrix u = random_unitary(2, rng);
    const double p = 0.2 * rng.uniform();
    const KrausChannel ch = make_depolarizing(p, 1).compose_after(KrausChannel::unitary(u));
    const ComparisonReport rep = compare_methods(TargetProcess::channel(ch), exact_options({1}));
    worst = std::max(worst, rep.choi_distance);
  }
  return {worst < 1e-3, fmt("max Choi distance over 20 channels = %.3e (limit 1e-3)", worst)};
}

Verdict haar_average() {
  Rng rng(20240602);
  double worst_sigma = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto ops = random_kraus(4, 1 + k % 4, rng);
    const Matrix u = random_unitary(4, rng);
    const auto [mean, se] = haar_average_fidelity(ops, u, 10000, rng);
    const double closed = average_gate_fidelity(KrausChannel(ops), u);
    worst_sigma = std::max(worst_sigma, std::abs(closed - mean) / se);
  }
  return {worst_sigma < 3.0, fmt("max |closed form - Monte Carlo| = %.2f standard errors (limit 3)", worst_sigma)};
}

Verdict zne_direction() {
  EaptOptions o = exact_options({1, 3, 5});
  o.noise = table1_noise(2);
  const EaptResult r = run_eapt(TargetProcess::cnot(), o);
  const double s1 = r.per_scale[0].state_fidelity.value;
  const double sm = r.mitigated_state_fidelity->value;
  const double g1 = r.per_scale[0].gate_fidelity->value;
  const double gm = r.mitigated_gate_fidelity->value;
  // Reference state-fidelity gain: 95.3% -> 97.9%.
  const double gain = sm - s1, reference = 0.979 - 0.953;
  const bool pass = gain >= 0.01 && gm > g1 && gain >= 0.3 * reference && gain <= 3 * reference;
  return {pass, fmt("Bell fidelity %.4f -> %.4f (+%.2f pp, band %.2f-%.2f pp), F_avg %.4f -> %.4f", s1, sm,
                    100 * gain, 30 * reference, 300 * reference, g1, gm)};
}

Verdict three_qubit_scale() {
  const auto start = Clock::now();
  EaptOptions o = exact_options({1, 3, 5});
  o.noise = table1_noise(3);
  const EaptResult r = run_eapt(TargetProcess::cascaded_cnot(), o);
  const double secs = seconds_since(start);
  const double s1 = r.per_scale[0].state_fidelity.value;
  const double sm = r.mitigated_state_fidelity->value;
  return {sm > s1 && secs < 1800 && r.process_mitigation->data.setting_count() == 729,
          fmt("GHZ-pair fidelity %.4f -> %.4f, F_avg %.4f -> %.4f, %.1f s", s1, sm,
              r.per_scale[0].gate_fidelity->value, r.mitigated_gate_fidelity->value, secs)};
}

Verdict mle_physicality() {
  Rng rng(20240606);
  int negative_li = 0, unphysical_mle = 0;
  double worst_eig = 0.0, worst_trace = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector psi = haar_state(4, rng);
    const Matrix truth = psi * psi.adjoint();
    std::vector<CountsRecord> records;
    for (const auto& s : all_settings(2)) {
      auto p = born_probabilities(truth, s);
      double total = 0.0;
      for (double& v : p) {
        v = std::max(0.0, v + 0.02 * rng.normal());
        total += v;
      }
      for (double& v : p) v /= total;
      records.push_back(CountsRecord{s, std::nullopt, p});
    }
    const TomographyDataset data(2, records);
    if (eig_hermitian(linear_inversion(stokes_from_dataset(data))).eigenvalues(0) < 0) ++negative_li;
    const Matrix rho = mle_reconstruct(data).state.matrix();
    const double min_eig = eig_hermitian(rho).eigenvalues(0);
    const double trace_err = std::abs(rho.trace() - 1.0);
    worst_eig = std::min(worst_eig, min_eig);
    worst_trace = std::max(worst_trace, trace_err);
    if (min_eig < -1e-12 || trace_err > 1e-12 || hermiticity_error(rho) > 1e-12) ++unphysical_mle;
  }
  return {unphysical_mle == 0 && negative_li >= 30,
          fmt("MLE unphysical %d/100 (min eigenvalue %.1e, trace error %.1e); linear inversion negative %d/100",
              unphysical_mle, worst_eig, worst_trace, negative_li)};
}

Verdict shot_convergence() {
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = std::sqrt(0.5);
  const Matrix truth = 0.9 * bell * bell.adjoint() + 0.1 * Matrix::Identity(4, 4) / 4.0;
  std::vector<double> medians;
  for (std::int64_t shots : {100, 1000, 10000}) {
    std::vector<double> d;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto data = measure_all(truth, shots, nullptr, derive_seed(seed, {static_cast<std::uint64_t>(shots)}));
      d.push_back(trace_distance(mle_reconstruct(data).state.matrix(), truth));
    }
    std::nth_element(d.begin(), d.begin() + 5, d.end());
    const double upper = d[5];
    const double lower = *std::max_element(d.begin(), d.begin() + 5);
    medians.push_back(0.5 * (lower + upper));
  }
  return {medians[0] > medians[1] && medians[1] > medians[2],
          fmt("median trace distance %.4f (1e2), %.4f (1e3), %.4f (1e4)", medians[0], medians[1], medians[2])};
}

Verdict folding_invariance() {
  Rng rng(20240608);
  double worst = 0.0;
  int count_mismatch = 0;
  for (int k = 0; k < 50; ++k) {
    const int qubits = 1 + k % 3;
    Circuit c(qubits);
    const int length = 1 + static_cast<int>(rng.uniform() * 8);
    for (int g = 0; g < length; ++g) {
      const int a = static_cast<int>(rng.uniform() * qubits);
      int b = qubits > 1 ? static_cast<int>(rng.uniform() * (qubits - 1)) : 0;
      if (b >= a) ++b;
      const int pick = static_cast<int>(rng.uniform() * (qubits > 1 ? 6 : 4));
      switch (pick) {
        case 0: c.add(Gate::ry(rng.uniform() * 6.3, a)); break;
        case 1: c.add(Gate::y2p(a)); break;
        case 2: c.add(Gate::y2m(a)); break;
        case 3: c.add(Gate::custom(random_unitary(2, rng), {a})); break;
        case 4: c.add(Gate::cz(a, b)); break;
        default: c.add(Gate::cnot(a, b)); break;
      }
    }
    const Matrix base = circuit_unitary(c);
    for (int folds : {1, 2}) {
      const Circuit f = fold_circuit(c, folds);
      worst = std::max(worst, max_abs(circuit_unitary(f) - base));
      if (f.size() != static_cast<std::size_t>(2 * folds + 1) * c.size()) ++count_mismatch;
    }
  }
  return {worst < 1e-10 && count_mismatch == 0,
          fmt("max unitary deviation %.2e over 50 circuits, gate-count mismatches %d", worst, count_mismatch)};
}

Verdict rem_round_trip() {
  Rng rng(20240609);
  double worst = 0.0;
  for (double e : {0.01, 0.037, 0.1, 0.3}) {
    for (int n = 1; n <= 3; ++n) {
      const ReadoutModel r = make_readout_confusion(std::vector<double>(n, e));
      const Matrix rho = random_density(Eigen::Index{1} << n, 2, rng);
      for (const auto& s : all_settings(n)) {
        const auto truth = born_probabilities(rho, s);
        const auto fixed = rem_correct(simulate_counts(rho, s, std::nullopt, &r, 0), r);
        for (std::size_t b = 0; b < truth.size(); ++b) worst = std::max(worst, std::abs(fixed.frequencies[b] - truth[b]));
      }
    }
  }
  return {worst < 1e-10, fmt("max deviation %.2e over error rates {0.01, 0.037, 0.1, 0.3}", worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "eapt_acceptance_determinism";
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"target": "cnot", "seed": 2024, "noise": "table1", "shots": 1000,)"
                     << R"( "scaling_factors": [1, 3, 5], "bootstrap_resamples": 5})";
  std::vector<std::string> files;
  for (int threads : {1, 4, 1}) {
    const fs::path out = dir / ("out" + std::to_string(files.size()));
    fs::remove_all(out);
    const std::string cmd = std::string(EAPT_CLI_PATH) + " run --quiet --threads " + std::to_string(threads) +
                            " --config " + cfg.string() + " --out " + out.string();
    if (std::system(cmd.c_str()) != 0) return {false, "eapt run failed"};
    files.push_back(slurp(out / "results.json") + slurp(out / "fidelities.csv"));
  }
  const bool same = !files[0].empty() && files[0] == files[1] && files[0] == files[2];
  return {same, fmt("results.json and fidelities.csv %s across threads 1, 4, 1 (%zu bytes)",
                    same ? "identical" : "differ", files[0].size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"noiseless CNOT recovery", noiseless_cnot},
      {"QPT/EAPT oracle equivalence", qpt_equivalence},
      {"average gate fidelity vs Haar Monte Carlo", haar_average},
      {"ZNE direction under calibrated noise", zne_direction},
      {"three-qubit cascaded CNOT", three_qubit_scale},
      {"MLE physicality", mle_physicality},
      {"shot convergence", shot_convergence},
      {"folding invariance", folding_invariance},
      {"REM round trip", rem_round_trip},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
