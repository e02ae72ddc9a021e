#pragma once

// Gate set, entangled-state preparation, global unitary folding and noisy
// density-matrix simulation.

#include "eapt/channels.hpp"

#include <memory>
#include <string>
#include <vector>

namespace eapt {

enum class GateKind { RY, Y2P, Y2M, CZ, CNOT, Custom };

/// A gate on ordered target qubits. CNOT targets are (control, target).
class Gate {
 public:
  static Gate ry(double theta, int qubit);
  static Gate y2p(int qubit);
  static Gate y2m(int qubit);
  static Gate cz(int a, int b);
  static Gate cnot(int control, int target);
  /// Unitary on targets (targets[0] = most significant). The inverse is
  /// computed once and stored.
  static Gate custom(const Matrix& unitary, std::vector<int> targets, std::string name = "U");

  GateKind kind() const { return kind_; }
  const std::vector<int>& targets() const { return targets_; }
  int arity() const { return static_cast<int>(targets_.size()); }
  double angle() const { return angle_; }
  const std::string& name() const;

  Matrix matrix() const;
  Gate inverse() const;

 private:
  struct CustomData {
    Matrix unitary;
    Matrix inverse;
    std::string name;
  };

  Gate(GateKind kind, std::vector<int> targets, double angle = 0.0);

  GateKind kind_;
  std::vector<int> targets_;
  double angle_ = 0.0;
  std::shared_ptr<const CustomData> custom_;
};

class Circuit {
 public:
  explicit Circuit(int qubits);

  int qubits() const { return qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  /// Throws if a target is out of range.
  Circuit& add(Gate g);
  Circuit& append(const Circuit& other);

 private:
  int qubits_;
  std::vector<Gate> gates_;
};

/// Noise scale s = 2 * folds + 1.
class ScalingFactor {
 public:
  static ScalingFactor from_scale(int s);
  static ScalingFactor from_folds(int folds);

  int scale() const { return 2 * folds_ + 1; }
  int folds() const { return folds_; }
  auto operator<=>(const ScalingFactor&) const = default;

 private:
  explicit ScalingFactor(int folds) : folds_(folds) {}
  int folds_ = 0;
};

Matrix ry(double theta);
Matrix y2p();
Matrix y2m();
Matrix cz();
/// Control is the most significant qubit.
Matrix cnot();

/// 2n-qubit circuit preparing (1/sqrt d) sum_j |j>_S |j>_A from |0...0>:
/// Y2P on S_i then CNOT(S_i -> A_i); system register is qubits 0..n-1.
Circuit build_prep_circuit(int n);

/// (U U^dagger)^folds U over the whole gate list.
Circuit fold_circuit(const Circuit& c, int folds);

/// Expands CNOT into its native sequence Y2M(t), CZ(c, t), Y2P(t) (time order).
Circuit compile_native(const Circuit& c);

Matrix circuit_unitary(const Circuit& c);

/// Applies each native gate's unitary followed by its noise (depolarizing, then
/// amplitude damping, then dephasing on the gate's targets). `noise` may be
/// null for noiseless evolution. Readout noise is not applied here.
DensityMatrix simulate(const Circuit& c, const DensityMatrix& input, const NoiseModel* noise);

/// Matrix-level variant used by the pipeline; skips validation.
Matrix simulate_matrix(const Circuit& c, Matrix rho, const NoiseModel* noise);

/// Applies a channel's Kraus operators to `qubits` of a larger register.
Matrix apply_channel_on(const KrausChannel& ch, Matrix rho, const std::vector<int>& qubits,
                        int total_qubits);

}  // namespace eapt
