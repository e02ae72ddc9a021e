#pragma once

// Quantum states and channels: density matrices, Kraus / Choi / chi
// representations with conversions between them, and the parametric noise
// channels the simulator composes.

#include "eapt/linalg.hpp"

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace eapt {

/// Hermitian, unit-trace, positive semidefinite operator on n qubits.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-9;

  /// Validates the invariants within `tolerance`; throws std::invalid_argument.
  explicit DensityMatrix(const Matrix& m, double tolerance = kTolerance);

  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix basis_state(int qubits, std::uint32_t index);
  static DensityMatrix maximally_mixed(int qubits);

  int qubits() const { return qubits_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }

 private:
  int qubits_ = 0;
  Matrix matrix_;
};

/// Operator-sum channel. Trace preservation (sum A^dagger A = I) is checked at
/// construction; channels built via `from_operators` with a loose tolerance
/// carry a sub-normalized flag instead of throwing.
class KrausChannel {
 public:
  static constexpr double kTraceTolerance = 1e-8;

  explicit KrausChannel(std::vector<Matrix> operators);
  static KrausChannel from_operators(std::vector<Matrix> operators, double tp_tolerance);

  static KrausChannel identity(int qubits);
  static KrausChannel unitary(const Matrix& u);

  int qubits() const { return qubits_; }
  Eigen::Index dim() const { return Eigen::Index{1} << qubits_; }
  const std::vector<Matrix>& operators() const { return operators_; }
  bool is_trace_preserving() const { return trace_preserving_; }
  /// max |sum_k A_k^dagger A_k - I|
  double trace_preservation_error() const;

  /// Raw action sum_k A_k rho A_k^dagger, no renormalization.
  Matrix apply(const Matrix& rho) const;

  /// this after `first`: rho -> this(first(rho)).
  KrausChannel compose_after(const KrausChannel& first) const;

 private:
  KrausChannel(std::vector<Matrix> operators, double tp_tolerance, bool allow_subnormalized);

  int qubits_ = 0;
  std::vector<Matrix> operators_;
  bool trace_preserving_ = true;
};

/// (E (x) I)(|Phi+><Phi+|) at unit trace; system register is the most
/// significant (slow) index, ancilla register the fast one.
class ChoiState {
 public:
  ChoiState(int channel_qubits, DensityMatrix state);

  int channel_qubits() const { return channel_qubits_; }
  const DensityMatrix& state() const { return state_; }
  const Matrix& matrix() const { return state_.matrix(); }
  /// max |Tr_system(rho) - I/d|; zero for trace-preserving channels.
  double trace_preservation_error() const;

 private:
  int channel_qubits_;
  DensityMatrix state_;
};

/// Process matrix over the Pauli basis: E(rho) = sum_mn chi_mn P_m rho P_n^dagger.
class ChiMatrix {
 public:
  ChiMatrix(int qubits, Matrix coefficients);

  int qubits() const { return qubits_; }
  const Matrix& coefficients() const { return coefficients_; }
  Matrix apply(const Matrix& rho) const;

 private:
  int qubits_;
  Matrix coefficients_;
};

/// Per-qubit 2x2 row-stochastic confusion matrices: C(true, observed).
struct ReadoutModel {
  std::vector<Eigen::Matrix2d> confusion;

  int qubits() const { return static_cast<int>(confusion.size()); }
  bool is_identity() const;
};

/// Gate-level noise. Rates may be overridden per qubit / per unordered pair.
struct NoiseModel {
  double single_qubit_depolarizing = 0.0;
  double two_qubit_depolarizing = 0.0;
  double amplitude_damping = 0.0;
  double dephasing = 0.0;
  std::map<int, double> single_qubit_overrides;
  std::map<std::pair<int, int>, double> two_qubit_overrides;
  ReadoutModel readout;

  double single_qubit_rate(int qubit) const;
  double two_qubit_rate(int a, int b) const;
  /// Confusion restricted to qubits [0, qubits); identity where unset.
  ReadoutModel readout_for(int qubits) const;
  bool has_gate_noise() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// ---- operations -----------------------------------------------------------

/// Trace-preserving channels return a validated state; sub-normalized channels
/// return the output rescaled to unit trace (the raw action is `ch.apply`).
DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho);

ChoiState choi_from_channel(const KrausChannel& ch);
KrausChannel channel_from_choi(const ChoiState& choi);

ChiMatrix chi_from_channel(const KrausChannel& ch);
KrausChannel channel_from_chi(const ChiMatrix& chi);

KrausChannel make_depolarizing(double p, int qubits);
KrausChannel make_amplitude_damping(double gamma);
/// Off-diagonals scale by (1 - lambda): Kraus {sqrt(1 - lambda/2) I, sqrt(lambda/2) Z}.
KrausChannel make_dephasing(double lambda);
/// Symmetric per-qubit confusion [[1-e, e], [e, 1-e]], e in [0, 0.5].
ReadoutModel make_readout_confusion(const std::vector<double>& error_rates);

// ---- local action on a subset of qubits (big-endian, qubit 0 = MSB) ------

/// rho <- O rho O^dagger where O acts on `qubits` (qubits[0] = MSB of O).
void apply_local(Matrix& rho, const Matrix& op, std::span<const int> qubits, int total_qubits);
/// rho <- sum_k K_k rho K_k^dagger on `qubits`.
void apply_kraus_local(Matrix& rho, const std::vector<Matrix>& ops, std::span<const int> qubits,
                       int total_qubits);
/// Embed a local operator into the full 2^total space (identity elsewhere).
Matrix embed_operator(const Matrix& op, std::span<const int> qubits, int total_qubits);

/// Bell-type maximally entangled vector (1/sqrt d) sum_j |j>|j> on 2n qubits.
Vector max_entangled_vector(int n);

}  // namespace eapt
