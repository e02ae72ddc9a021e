#pragma once

// End-to-end runs: entanglement-assisted process tomography with zero-noise
// extrapolation, probe-state process tomography as a cross-check, and a report
// comparing the two.
//
// Register layout for EAPT: qubits [0, n) are the system, [n, 2n) the
// ancillas, and qubit i is paired with n + i in the Bell-pair preparation.

#include "eapt/channels.hpp"
#include "eapt/circuits.hpp"
#include "eapt/mitigation.hpp"
#include "eapt/tomography.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eapt {

class TargetProcess {
 public:
  enum class Kind { Cnot, CascadedCnot, Identity, Unitary, Channel };

  /// CNOT with control on qubit 0 and target qubit 1.
  static TargetProcess cnot();
  /// CNOT(1 -> 0) then CNOT(1 -> 2): a shared control on the middle qubit.
  static TargetProcess cascaded_cnot();
  static TargetProcess identity(int qubits);
  static TargetProcess unitary(const Matrix& u, std::string name = "custom");
  /// Arbitrary channel, applied exactly (no gate noise) by the simulator.
  static TargetProcess channel(KrausChannel ch, std::string name = "channel");

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int qubits() const { return qubits_; }
  bool is_unitary() const { return unitary_.has_value(); }
  /// Throws std::logic_error for channel targets.
  const Matrix& unitary_matrix() const;
  /// Gate sequence on qubits [0, n) of a register of `total_qubits`.
  Circuit circuit(int total_qubits) const;
  /// Applies the target to qubits [0, n) of `rho` under `noise`.
  Matrix apply(Matrix rho, int total_qubits, const NoiseModel* noise) const;

 private:
  TargetProcess(Kind kind, std::string name, int qubits);

  Kind kind_;
  std::string name_;
  int qubits_;
  std::optional<Matrix> unitary_;
  std::optional<KrausChannel> channel_;
};

/// Device-calibrated noise: per-qubit readout and single-qubit depolarizing
/// rates and per-coupler two-qubit rates for the S1-S3 / A1-A3 layout. System
/// qubit i maps to S(i+1), ancilla i to A(i+1).
NoiseModel table1_noise(int system_qubits);

struct EaptOptions {
  NoiseModel noise;
  /// Empty for exact probabilities.
  std::optional<std::int64_t> shots;
  std::vector<int> scales{1, 3, 5};
  std::uint64_t seed = 0;
  /// Shots mode only; 0 disables error bars.
  int bootstrap_resamples = 100;
  int threads = 1;
  ExtrapolationMethod extrapolation = ExtrapolationMethod::Linear;
  MleOptions mle;
  bool keep_datasets = false;
};

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

struct ScaleResult {
  int scale = 1;
  Estimate state_fidelity;
  std::optional<Estimate> gate_fidelity;
  double trace_preservation_error = 0.0;
  int mle_iterations = 0;
};

struct EaptResult {
  std::string target;
  int qubits = 0;
  std::vector<ScaleResult> per_scale;
  std::optional<Estimate> mitigated_state_fidelity;
  std::optional<Estimate> mitigated_gate_fidelity;
  /// Mitigated reconstruction when >= 2 scales ran, otherwise the first scale's.
  ChoiState choi;
  KrausChannel kraus;
  std::optional<MitigatedDataset> state_mitigation;
  std::optional<MitigatedDataset> process_mitigation;
  std::vector<std::string> warnings;
  /// Readout-corrected datasets per scale (only with keep_datasets).
  std::vector<TomographyDataset> state_datasets;
  std::vector<TomographyDataset> process_datasets;
};

EaptResult run_eapt(const TargetProcess& target, const EaptOptions& options);

/// Probe-state tomography over {|0>, |1>, |+>, |i>}^n; n <= 2. Uses the
/// noise, shots, seed, threads and MLE fields of `options` (no scaling).
ChiMatrix run_standard_qpt(const TargetProcess& target, const EaptOptions& options);

struct ComparisonReport {
  double choi_distance = 0.0;
  std::optional<double> eapt_gate_fidelity;
  std::optional<double> qpt_gate_fidelity;
  std::int64_t eapt_executions = 0;
  std::int64_t qpt_executions = 0;
  EaptResult eapt;
  ChiMatrix qpt_chi;
};

ComparisonReport compare_methods(const TargetProcess& target, const EaptOptions& options);

/// One execution per (preparation, setting, scale).
std::int64_t eapt_execution_count(int qubits, std::size_t scales);
std::int64_t qpt_execution_count(int qubits);

}  // namespace eapt
