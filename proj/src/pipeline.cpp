#include "eapt/pipeline.hpp"

#include "eapt/metrics.hpp"
#include "eapt/parallel.hpp"
#include "eapt/pauli.hpp"
#include "eapt/random.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace eapt {

namespace {

constexpr double kTraceWarning = 1e-2;

enum DatasetKind : std::uint64_t { kStateData = 0, kProcessData = 1 };

std::vector<int> range(int begin, int end) {
  std::vector<int> out(end - begin);
  std::iota(out.begin(), out.end(), begin);
  return out;
}

std::string format_scale(int s) { return "s=" + std::to_string(s); }

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

struct ProcessFit {
  ChoiState choi;
  KrausChannel kraus;
  std::optional<double> gate_fidelity;
  double tp_error = 0.0;
  MleResult mle;
};

struct StateFit {
  double fidelity = 0.0;
  MleResult mle;
};

StateFit fit_state(const TomographyDataset& data, const MleOptions& mle, int n) {
  MleResult r = mle_reconstruct(data, std::nullopt, mle);
  const double f = state_fidelity(r.state, max_entangled_vector(n));
  return StateFit{f, std::move(r)};
}

ProcessFit fit_process(const TomographyDataset& data, const MleOptions& mle, const TargetProcess& target) {
  MleResult r = mle_reconstruct(data, std::nullopt, mle);
  ChoiState choi(target.qubits(), r.state);
  KrausChannel kraus = channel_from_choi(choi);
  std::optional<double> favg;
  if (target.is_unitary()) favg = average_gate_fidelity(kraus, target.unitary_matrix());
  const double tp = choi.trace_preservation_error() * static_cast<double>(kraus.dim());
  return ProcessFit{std::move(choi), std::move(kraus), favg, tp, std::move(r)};
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

TomographyDataset resample(const TomographyDataset& raw, std::uint64_t seed) {
  std::vector<CountsRecord> records;
  records.reserve(raw.setting_count());
  for (const CountsRecord& r : raw.records()) {
    CountsRecord copy = r;
    copy.frequencies = sample_frequencies(r.frequencies, *r.shots, derive_seed(seed, {r.setting.index()}));
    records.push_back(std::move(copy));
  }
  return TomographyDataset(raw.qubits(), std::move(records));
}

void validate_options(const EaptOptions& o) {
  if (o.scales.empty()) throw std::invalid_argument("at least one scaling factor is required");
  for (std::size_t i = 0; i < o.scales.size(); ++i) {
    ScalingFactor::from_scale(o.scales[i]);
    if (i > 0 && o.scales[i] <= o.scales[i - 1]) {
      throw std::invalid_argument("scaling factors must be strictly increasing");
    }
  }
  if (o.shots && *o.shots <= 0) throw std::invalid_argument("shots must be positive");
  if (o.bootstrap_resamples < 0) throw std::invalid_argument("bootstrap_resamples must be non-negative");
  if (o.threads < 1) throw std::invalid_argument("threads must be at least 1");
  o.noise.validate();
}

// Single-qubit probe preparations from |0>: |0>, |1>, |+>, |i>.
Gate probe_gate(int code, int qubit) {
  switch (code) {
    case 1: return Gate::ry(std::numbers::pi, qubit);
    case 2: return Gate::y2p(qubit);
    case 3: {
      const double h = std::sqrt(0.5);
      Matrix rx(2, 2);
      rx << Complex(h, 0), Complex(0, h), Complex(0, h), Complex(h, 0);  // RX(-pi/2)
      return Gate::custom(rx, {qubit}, "X2M");
    }
  }
  throw std::logic_error("probe_gate: code has no preparation gate");
}

Vector probe_vector(int code) {
  const double h = std::sqrt(0.5);
  Vector v(2);
  switch (code) {
    case 0: v << 1.0, 0.0; break;
    case 1: v << 0.0, 1.0; break;
    case 2: v << h, h; break;
    default: v << Complex(h, 0), Complex(0, h); break;
  }
  return v;
}

// Row-major vectorization.
Vector vec(const Matrix& m) {
  Vector out(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i * m.cols() + j) = m(i, j);
  }
  return out;
}

}  // namespace

// ---- TargetProcess ----------------------------------------------------------------

TargetProcess::TargetProcess(Kind kind, std::string name, int qubits)
    : kind_(kind), name_(std::move(name)), qubits_(qubits) {
  if (qubits < 1 || qubits > 3) throw std::out_of_range("target must act on 1 to 3 qubits");
}

TargetProcess TargetProcess::cnot() {
  TargetProcess t(Kind::Cnot, "cnot", 2);
  t.unitary_ = circuit_unitary(t.circuit(2));
  return t;
}

TargetProcess TargetProcess::cascaded_cnot() {
  TargetProcess t(Kind::CascadedCnot, "cascaded-cnot", 3);
  t.unitary_ = circuit_unitary(t.circuit(3));
  return t;
}

TargetProcess TargetProcess::identity(int qubits) {
  TargetProcess t(Kind::Identity, "identity", qubits);
  t.unitary_ = Matrix::Identity(Eigen::Index{1} << qubits, Eigen::Index{1} << qubits);
  return t;
}

TargetProcess TargetProcess::unitary(const Matrix& u, std::string name) {
  const int n = qubit_count_for_dimension(u.rows());
  if (n < 1 || u.cols() != u.rows()) throw std::invalid_argument("target unitary must be 2^n x 2^n");
  require_unitary(u);
  TargetProcess t(Kind::Unitary, std::move(name), n);
  t.unitary_ = u;
  return t;
}

TargetProcess TargetProcess::channel(KrausChannel ch, std::string name) {
  TargetProcess t(Kind::Channel, std::move(name), ch.qubits());
  t.channel_ = std::move(ch);
  return t;
}

const Matrix& TargetProcess::unitary_matrix() const {
  if (!unitary_) throw std::logic_error("target '" + name_ + "' is not unitary");
  return *unitary_;
}

Circuit TargetProcess::circuit(int total_qubits) const {
  Circuit c(total_qubits);
  switch (kind_) {
    case Kind::Cnot: c.add(Gate::cnot(0, 1)); break;
    case Kind::CascadedCnot:
      c.add(Gate::cnot(1, 0));
      c.add(Gate::cnot(1, 2));
      break;
    case Kind::Identity: break;
    case Kind::Unitary: c.add(Gate::custom(*unitary_, range(0, qubits_), name_)); break;
    case Kind::Channel: throw std::logic_error("channel targets have no circuit");
  }
  return c;
}

Matrix TargetProcess::apply(Matrix rho, int total_qubits, const NoiseModel* noise) const {
  if (kind_ == Kind::Channel) return apply_channel_on(*channel_, std::move(rho), range(0, qubits_), total_qubits);
  return simulate_matrix(circuit(total_qubits), std::move(rho), noise);
}

// ---- noise preset ---------------------------------------------------------------

NoiseModel table1_noise(int system_qubits) {
  if (system_qubits < 1 || system_qubits > 3) throw std::out_of_range("table1 preset covers 1 to 3 system qubits");
  // Device order S1, S2, S3, A1, A2, A3.
  static constexpr double kReadout[] = {0.037, 0.054, 0.035, 0.048, 0.026, 0.043};
  static constexpr double kSingle[] = {0.0011, 0.0010, 0.0011, 0.0016, 0.0016, 0.0011};
  struct Coupler {
    int a, b;
    double rate;
  };
  static constexpr Coupler kCouplers[] = {
      {0, 3, 0.0119}, {1, 4, 0.0332}, {2, 5, 0.0080}, {0, 1, 0.0217}, {1, 2, 0.0221}};

  const int n = system_qubits;
  auto device_slot = [n](int q) { return q < n ? q : 3 + (q - n); };
  std::vector<int> qubit_of_slot(6, -1);
  for (int q = 0; q < 2 * n; ++q) qubit_of_slot[device_slot(q)] = q;

  NoiseModel noise;
  double coupler_sum = 0.0, single_sum = 0.0;
  for (const Coupler& c : kCouplers) coupler_sum += c.rate;
  for (double r : kSingle) single_sum += r;
  // Pairs without a coupler entry fall back to the mean calibrated rate.
  noise.two_qubit_depolarizing = coupler_sum / std::size(kCouplers);
  noise.single_qubit_depolarizing = single_sum / std::size(kSingle);

  std::vector<double> readout(2 * n);
  for (int q = 0; q < 2 * n; ++q) {
    readout[q] = kReadout[device_slot(q)];
    noise.single_qubit_overrides[q] = kSingle[device_slot(q)];
  }
  for (const Coupler& c : kCouplers) {
    const int qa = qubit_of_slot[c.a], qb = qubit_of_slot[c.b];
    if (qa >= 0 && qb >= 0) noise.two_qubit_overrides[{std::min(qa, qb), std::max(qa, qb)}] = c.rate;
  }
  noise.readout = make_readout_confusion(readout);
  return noise;
}

// ---- EAPT -------------------------------------------------------------------------

std::int64_t eapt_execution_count(int qubits, std::size_t scales) {
  std::int64_t settings = 1;
  for (int i = 0; i < 2 * qubits; ++i) settings *= 3;
  return settings * static_cast<std::int64_t>(scales);
}

std::int64_t qpt_execution_count(int qubits) {
  std::int64_t count = 1;
  for (int i = 0; i < qubits; ++i) count *= 4 * 3;
  return count;
}

EaptResult run_eapt(const TargetProcess& target, const EaptOptions& options) {
  validate_options(options);
  const int n = target.qubits();
  const int total = 2 * n;
  const std::size_t scales = options.scales.size();
  const ReadoutModel readout = options.noise.readout_for(total);
  const bool remove_readout = !readout.is_identity();
  const Circuit prep = build_prep_circuit(n);

  // Raw (pre-correction) datasets: index 2k is the prep-only state at scale k,
  // 2k + 1 the state after the target.
  std::vector<std::optional<TomographyDataset>> raw(2 * scales);
  parallel_for(scales, options.threads, [&](std::size_t k) {
    const Circuit folded = fold_circuit(prep, ScalingFactor::from_scale(options.scales[k]).folds());
    const Matrix bell = simulate_matrix(folded, DensityMatrix::basis_state(total, 0).matrix(), &options.noise);
    const Matrix out = target.apply(bell, total, &options.noise);
    raw[2 * k] = measure_all(bell, options.shots, &readout, derive_seed(options.seed, {k, kStateData}));
    raw[2 * k + 1] = measure_all(out, options.shots, &readout, derive_seed(options.seed, {k, kProcessData}));
  });
  std::vector<std::optional<TomographyDataset>> corrected(2 * scales);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    corrected[i] = remove_readout ? rem_correct(*raw[i], readout) : *raw[i];
  }

  auto mle_for = [&](std::uint64_t a, std::uint64_t b) {
    MleOptions m = options.mle;
    m.seed = derive_seed(options.seed, {0x4D4C45, a, b});
    return m;
  };

  // Per-scale reconstructions plus the two mitigated ones, as one job list.
  std::optional<MitigatedDataset> state_mit, process_mit;
  if (scales >= 2) {
    std::map<int, TomographyDataset> states, processes;
    for (std::size_t k = 0; k < scales; ++k) {
      states.emplace(options.scales[k], *corrected[2 * k]);
      processes.emplace(options.scales[k], *corrected[2 * k + 1]);
    }
    state_mit = mitigate_dataset(states, options.extrapolation, nullptr, options.threads);
    process_mit = mitigate_dataset(processes, options.extrapolation, nullptr, options.threads);
  }
  const std::size_t jobs = 2 * scales + (scales >= 2 ? 2 : 0);
  std::vector<std::optional<StateFit>> state_fits(scales + 1);
  std::vector<std::optional<ProcessFit>> process_fits(scales + 1);
  parallel_for(jobs, options.threads, [&](std::size_t j) {
    const std::size_t k = j / 2;
    const bool is_state = j % 2 == 0;
    const TomographyDataset& data = k < scales ? *corrected[j]
                                    : is_state ? state_mit->data
                                               : process_mit->data;
    if (is_state) {
      state_fits[k] = fit_state(data, mle_for(k, kStateData), n);
    } else {
      process_fits[k] = fit_process(data, mle_for(k, kProcessData), target);
    }
  });

  // Bootstrap over shots: resample raw counts, redo correction, extrapolation
  // and a single-start reconstruction.
  const int resamples = options.shots ? options.bootstrap_resamples : 0;
  const std::size_t columns = scales + (scales >= 2 ? 1 : 0);
  std::vector<std::vector<double>> boot_state(resamples), boot_gate(resamples);
  parallel_for(static_cast<std::size_t>(resamples), options.threads, [&](std::size_t r) {
    MleOptions single = options.mle;
    single.starts = 1;
    std::vector<TomographyDataset> sets;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      TomographyDataset d = resample(*raw[i], derive_seed(options.seed, {0xB007, r, i}));
      sets.push_back(remove_readout ? rem_correct(d, readout) : std::move(d));
    }
    std::vector<double>& st = boot_state[r];
    std::vector<double>& gf = boot_gate[r];
    for (std::size_t k = 0; k < scales; ++k) {
      st.push_back(fit_state(sets[2 * k], single, n).fidelity);
      if (target.is_unitary()) gf.push_back(*fit_process(sets[2 * k + 1], single, target).gate_fidelity);
    }
    if (scales >= 2) {
      std::map<int, TomographyDataset> states, processes;
      for (std::size_t k = 0; k < scales; ++k) {
        states.emplace(options.scales[k], sets[2 * k]);
        processes.emplace(options.scales[k], sets[2 * k + 1]);
      }
      st.push_back(fit_state(mitigate_dataset(states, options.extrapolation).data, single, n).fidelity);
      if (target.is_unitary()) {
        gf.push_back(*fit_process(mitigate_dataset(processes, options.extrapolation).data, single, target).gate_fidelity);
      }
    }
  });
  auto spread = [&](const std::vector<std::vector<double>>& samples, std::size_t column) {
    std::vector<double> v;
    for (const auto& row : samples) {
      if (column < row.size()) v.push_back(row[column]);
    }
    return stddev(v);
  };

  const std::size_t final_index = scales >= 2 ? scales : 0;
  EaptResult result{target.name(),
                    n,
                    {},
                    std::nullopt,
                    std::nullopt,
                    process_fits[final_index]->choi,
                    process_fits[final_index]->kraus,
                    std::move(state_mit),
                    std::move(process_mit),
                    {},
                    {},
                    {}};
  for (std::size_t k = 0; k < columns; ++k) {
    const StateFit& sf = *state_fits[k];
    const ProcessFit& pf = *process_fits[k];
    const Estimate state{sf.fidelity, spread(boot_state, k)};
    std::optional<Estimate> gate;
    if (pf.gate_fidelity) gate = Estimate{*pf.gate_fidelity, spread(boot_gate, k)};
    const std::string label = k < scales ? format_scale(options.scales[k]) : "mitigated";
    if (pf.tp_error > kTraceWarning) {
      result.warnings.push_back(label + ": reconstructed channel deviates from trace preservation by " +
                                format_number(pf.tp_error));
    }
    if (sf.mle.hit_iteration_cap || pf.mle.hit_iteration_cap) {
      result.warnings.push_back(label + ": maximum-likelihood fit stopped at the iteration cap");
    }
    if (k < scales) {
      result.per_scale.push_back(ScaleResult{options.scales[k], state, gate, pf.tp_error, pf.mle.iterations});
    } else {
      result.mitigated_state_fidelity = state;
      result.mitigated_gate_fidelity = gate;
    }
  }
  for (std::size_t i = 0; i < corrected.size(); ++i) {
    std::size_t flagged = 0;
    for (const CountsRecord& r : corrected[i]->records()) flagged += r.flagged ? 1 : 0;
    if (flagged > 0) {
      result.warnings.push_back(format_scale(options.scales[i / 2]) + (i % 2 ? " process" : " state") +
                                " data: readout correction clipped " + std::to_string(flagged) + " setting(s)");
    }
  }
  if (options.keep_datasets) {
    for (std::size_t k = 0; k < scales; ++k) {
      result.state_datasets.push_back(*corrected[2 * k]);
      result.process_datasets.push_back(*corrected[2 * k + 1]);
    }
  }
  return result;
}

// ---- standard QPT -------------------------------------------------------------------

ChiMatrix run_standard_qpt(const TargetProcess& target, const EaptOptions& options) {
  validate_options(options);
  const int n = target.qubits();
  if (n > 2) throw std::out_of_range("standard process tomography supports at most 2 qubits");
  const Eigen::Index d = Eigen::Index{1} << n;
  const Eigen::Index d2 = d * d;
  const std::size_t probes = std::size_t{1} << (2 * n);
  const ReadoutModel readout = options.noise.readout_for(n);
  const bool remove_readout = !readout.is_identity();

  // Ideal probe states as columns of R (row-major vec).
  std::vector<Matrix> ideal(probes);
  Matrix R(d2, d2);
  for (std::size_t j = 0; j < probes; ++j) {
    Vector psi = Vector::Ones(1);
    for (int q = 0; q < n; ++q) psi = tensor(psi, probe_vector((j >> (2 * (n - 1 - q))) & 3));
    ideal[j] = psi * psi.adjoint();
    R.col(static_cast<Eigen::Index>(j)) = vec(ideal[j]);
  }
  const Eigen::FullPivLU<Matrix> basis(R);
  if (!basis.isInvertible()) throw std::logic_error("probe states do not span operator space");

  std::vector<Matrix> outputs(probes);
  parallel_for(probes, options.threads, [&](std::size_t j) {
    Circuit prep(n);
    for (int q = 0; q < n; ++q) {
      const int code = static_cast<int>((j >> (2 * (n - 1 - q))) & 3);
      if (code != 0) prep.add(probe_gate(code, q));
    }
    const Matrix in = simulate_matrix(prep, DensityMatrix::basis_state(n, 0).matrix(), &options.noise);
    const Matrix out = target.apply(in, n, &options.noise);
    TomographyDataset data = measure_all(out, options.shots, &readout, derive_seed(options.seed, {0x515054, j}));
    if (remove_readout) data = rem_correct(data, readout);
    MleOptions mle = options.mle;
    mle.seed = derive_seed(options.seed, {0x4D4C45, 0x515054, j});
    outputs[j] = mle_reconstruct(data, std::nullopt, mle).state.matrix();
  });

  // lambda_jk: coordinates of E(rho_j) in the probe basis. beta maps chi onto
  // the same coordinates: beta^{mn}_{jk} = coordinates of P_m rho_j P_n.
  const std::uint32_t strings = pauli_count(n);
  std::vector<Matrix> paulis;
  for (std::uint32_t m = 0; m < strings; ++m) paulis.push_back(pauli_matrix(m, n));
  Vector lambda(static_cast<Eigen::Index>(probes) * d2);
  Matrix beta(static_cast<Eigen::Index>(probes) * d2, static_cast<Eigen::Index>(strings) * strings);
  for (std::size_t j = 0; j < probes; ++j) {
    const Eigen::Index row = static_cast<Eigen::Index>(j) * d2;
    lambda.segment(row, d2) = basis.solve(vec(outputs[j]));
    for (std::uint32_t m = 0; m < strings; ++m) {
      for (std::uint32_t k = 0; k < strings; ++k) {
        const Matrix term = paulis[m] * ideal[j] * paulis[k].adjoint();
        beta.block(row, static_cast<Eigen::Index>(m) * strings + k, d2, 1) = basis.solve(vec(term));
      }
    }
  }
  const Vector x = beta.fullPivLu().solve(lambda);
  Matrix chi(strings, strings);
  for (std::uint32_t m = 0; m < strings; ++m) {
    for (std::uint32_t k = 0; k < strings; ++k) chi(m, k) = x(static_cast<Eigen::Index>(m) * strings + k);
  }
  chi = 0.5 * (chi + chi.adjoint());
  auto eig = eig_hermitian(chi);
  eig.eigenvalues = eig.eigenvalues.cwiseMax(0.0);
  return ChiMatrix(n, eig.reconstruct());
}

ComparisonReport compare_methods(const TargetProcess& target, const EaptOptions& options) {
  const int n = target.qubits();
  if (n > 2) throw std::out_of_range("method comparison supports at most 2 qubits");
  EaptResult eapt = run_eapt(target, options);
  ChiMatrix chi = run_standard_qpt(target, options);
  const KrausChannel qpt_channel = channel_from_chi(chi);
  ComparisonReport report{0.0, std::nullopt, std::nullopt, eapt_execution_count(n, options.scales.size()),
                          qpt_execution_count(n), std::move(eapt), std::move(chi)};
  report.choi_distance = choi_distance(report.eapt.choi, choi_from_channel(qpt_channel));
  if (target.is_unitary()) {
    report.eapt_gate_fidelity = average_gate_fidelity(report.eapt.kraus, target.unitary_matrix());
    report.qpt_gate_fidelity = average_gate_fidelity(qpt_channel, target.unitary_matrix());
  }
  return report;
}

}  // namespace eapt
