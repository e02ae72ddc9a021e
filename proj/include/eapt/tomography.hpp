#pragma once

// Pauli-basis state tomography: measurement settings, Born-rule counts with
// readout confusion, readout-error mitigation, Stokes linear inversion and
// Cholesky-parameterized maximum-likelihood reconstruction.
//
// Outcome bitstrings are big-endian: bit (n-1-q) of an outcome index is the
// result on qubit q, and 0 means the +1 eigenvalue of the measured Pauli.

#include "eapt/channels.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eapt {

enum class Basis : std::uint8_t { X = 0, Y = 1, Z = 2 };

class MeasurementSetting {
 public:
  explicit MeasurementSetting(std::vector<Basis> bases);
  static MeasurementSetting from_index(std::uint32_t index, int qubits);
  static MeasurementSetting from_label(const std::string& label);

  int qubits() const { return static_cast<int>(bases_.size()); }
  const std::vector<Basis>& bases() const { return bases_; }
  Basis basis(int qubit) const { return bases_[qubit]; }
  /// Lexicographic position among the 3^n settings (X < Y < Z, qubit 0 slowest).
  std::uint32_t index() const;
  std::string label() const;

  bool operator==(const MeasurementSetting&) const = default;

 private:
  std::vector<Basis> bases_;
};

/// One setting's outcome distribution. `shots` is empty for exact probabilities.
struct CountsRecord {
  static constexpr double kClipFlagThreshold = 0.05;

  MeasurementSetting setting;
  std::optional<std::int64_t> shots;
  std::vector<double> frequencies;
  /// Set by rem_correct / mitigation when clipping moved an entry by > 0.05.
  bool flagged = false;
};

/// Complete dataset: one record per setting, ordered by setting index.
class TomographyDataset {
 public:
  TomographyDataset(int qubits, std::vector<CountsRecord> records);

  int qubits() const { return qubits_; }
  const std::vector<CountsRecord>& records() const { return records_; }
  const CountsRecord& record(std::uint32_t setting_index) const { return records_.at(setting_index); }
  std::size_t setting_count() const { return records_.size(); }

 private:
  int qubits_;
  std::vector<CountsRecord> records_;
};

/// Pauli expectation values S_m = Tr(P_m rho), 4^n entries, S_0 = 1.
struct StokesVector {
  int qubits = 0;
  RealVector coefficients;
};

/// d^2 real parameters of the lower-triangular T(t). Diagonal first, then
/// complex entries one sub-diagonal at a time (re, im pairs, top to bottom).
struct CholeskyParams {
  RealVector t;
};

struct MleOptions {
  int max_iterations = 5000;
  /// Stop when one iteration improves the objective by less than this.
  double tolerance = 1e-10;
  /// Floor on predicted probabilities in the likelihood denominator.
  double probability_floor = 1e-9;
  /// 1..3: linear-inversion start, maximally mixed start, random start.
  int starts = 3;
  std::uint64_t seed = 0;
  int lbfgs_memory = 10;
};

struct MleResult {
  DensityMatrix state;
  double objective = 0.0;
  int iterations = 0;
  bool hit_iteration_cap = false;
  int best_start = 0;
};

// ---- settings and counts ------------------------------------------------------

std::vector<MeasurementSetting> all_settings(int n);

/// Born probabilities of `rho` in the setting's product eigenbasis.
std::vector<double> born_probabilities(const Matrix& rho, const MeasurementSetting& setting);

/// Pushes a distribution through the per-qubit confusion maps.
std::vector<double> apply_confusion(const std::vector<double>& probabilities,
                                    const ReadoutModel& readout);

/// Exact mode when `shots` is empty; otherwise `shots` multinomial draws.
CountsRecord simulate_counts(const DensityMatrix& rho, const MeasurementSetting& setting,
                             std::optional<std::int64_t> shots, const ReadoutModel* readout,
                             std::uint64_t seed);
CountsRecord simulate_counts(const Matrix& rho, const MeasurementSetting& setting,
                             std::optional<std::int64_t> shots, const ReadoutModel* readout,
                             std::uint64_t seed);

/// Measures all 3^n settings. Setting k draws from the stream (seed, k).
TomographyDataset measure_all(const Matrix& rho, std::optional<std::int64_t> shots,
                              const ReadoutModel* readout, std::uint64_t seed, int threads = 1);

/// Multinomial redraw of `shots` outcomes from `probabilities`.
std::vector<double> sample_frequencies(const std::vector<double>& probabilities,
                                       std::int64_t shots, std::uint64_t seed);

CountsRecord rem_correct(const CountsRecord& record, const ReadoutModel& readout);
TomographyDataset rem_correct(const TomographyDataset& data, const ReadoutModel& readout);

// ---- reconstruction -----------------------------------------------------------

StokesVector stokes_from_dataset(const TomographyDataset& data);
Matrix linear_inversion(const StokesVector& s);

Matrix build_T(const CholeskyParams& params);
/// T^dagger T / Tr(T^dagger T).
Matrix density_from_params(const CholeskyParams& params);
/// Parameters with density_from_params(result) == rho; rho must be positive definite.
CholeskyParams params_from_density(const Matrix& rho);

/// Negative log-likelihood sum_i (q_i - p_i)^2 / (2 max(q_i, floor)) over all
/// 3^n * 2^n projectors.
double mle_objective(const TomographyDataset& data, const Matrix& rho, double floor = 1e-9);

/// Objective at the normalized state of `params` and its gradient in the parameters.
double mle_objective_gradient(const TomographyDataset& data, const CholeskyParams& params, RealVector& grad,
                              double floor = 1e-9);
MleResult mle_reconstruct(const TomographyDataset& data,
                          const std::optional<CholeskyParams>& init = std::nullopt,
                          const MleOptions& options = {});

/// In-place Walsh-Hadamard transform, out[m] = sum_b (-1)^{popcount(m & b)} in[b].
void walsh_hadamard(std::vector<double>& v);

}  // namespace eapt
