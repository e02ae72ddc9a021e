#include "eapt/circuits.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eapt {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void require_distinct(const std::vector<int>& targets) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0) throw std::out_of_range("Gate: negative qubit index");
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (targets[i] == targets[j]) throw std::invalid_argument("Gate: repeated target qubit");
    }
  }
}

void apply_gate_noise(Matrix& rho, const Gate& g, const NoiseModel& noise, int total) {
  const auto& t = g.targets();
  if (g.arity() == 1) {
    const double p = noise.single_qubit_rate(t[0]);
    if (p > 0) apply_kraus_local(rho, make_depolarizing(p, 1).operators(), t, total);
  } else {
    const double p = g.arity() == 2 ? noise.two_qubit_rate(t[0], t[1]) : noise.two_qubit_depolarizing;
    if (p > 0) apply_kraus_local(rho, make_depolarizing(p, g.arity()).operators(), t, total);
  }
  if (noise.amplitude_damping > 0) {
    const auto damp = make_amplitude_damping(noise.amplitude_damping);
    for (int q : t) apply_kraus_local(rho, damp.operators(), std::vector<int>{q}, total);
  }
  if (noise.dephasing > 0) {
    const auto deph = make_dephasing(noise.dephasing);
    for (int q : t) apply_kraus_local(rho, deph.operators(), std::vector<int>{q}, total);
  }
}

}  // namespace

// ---- matrices -----------------------------------------------------------------

Matrix ry(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("ry: non-finite angle");
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Matrix m(2, 2);
  m << c, -s, s, c;
  return m;
}

Matrix y2p() { return ry(kHalfPi); }
Matrix y2m() { return ry(-kHalfPi); }

Matrix cz() {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return m;
}

Matrix cnot() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

// ---- Gate ---------------------------------------------------------------------

Gate::Gate(GateKind kind, std::vector<int> targets, double angle)
    : kind_(kind), targets_(std::move(targets)), angle_(angle) {
  require_distinct(targets_);
}

Gate Gate::ry(double theta, int qubit) {
  if (!std::isfinite(theta)) throw std::invalid_argument("Gate::ry: non-finite angle");
  return Gate(GateKind::RY, {qubit}, theta);
}
Gate Gate::y2p(int qubit) { return Gate(GateKind::Y2P, {qubit}); }
Gate Gate::y2m(int qubit) { return Gate(GateKind::Y2M, {qubit}); }
Gate Gate::cz(int a, int b) { return Gate(GateKind::CZ, {a, b}); }
Gate Gate::cnot(int control, int target) { return Gate(GateKind::CNOT, {control, target}); }

Gate Gate::custom(const Matrix& unitary, std::vector<int> targets, std::string name) {
  const Eigen::Index d = Eigen::Index{1} << targets.size();
  if (targets.empty() || unitary.rows() != d || unitary.cols() != d) {
    throw std::invalid_argument("Gate::custom: matrix size does not match target count");
  }
  if ((unitary.adjoint() * unitary - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("Gate::custom: matrix is not unitary");
  }
  Gate g(GateKind::Custom, std::move(targets));
  g.custom_ = std::make_shared<CustomData>(CustomData{unitary, unitary.adjoint(), std::move(name)});
  return g;
}

const std::string& Gate::name() const {
  static const std::string kNames[] = {"RY", "Y2P", "Y2M", "CZ", "CNOT"};
  if (kind_ == GateKind::Custom) return custom_->name;
  return kNames[static_cast<int>(kind_)];
}

Matrix Gate::matrix() const {
  switch (kind_) {
    case GateKind::RY: return eapt::ry(angle_);
    case GateKind::Y2P: return eapt::y2p();
    case GateKind::Y2M: return eapt::y2m();
    case GateKind::CZ: return eapt::cz();
    case GateKind::CNOT: return eapt::cnot();
    case GateKind::Custom: return custom_->unitary;
  }
  throw std::logic_error("Gate::matrix: unknown kind");
}

Gate Gate::inverse() const {
  switch (kind_) {
    case GateKind::RY: return Gate::ry(-angle_, targets_[0]);
    case GateKind::Y2P: return Gate::y2m(targets_[0]);
    case GateKind::Y2M: return Gate::y2p(targets_[0]);
    case GateKind::CZ:
    case GateKind::CNOT: return *this;
    case GateKind::Custom: {
      Gate g(GateKind::Custom, targets_);
      g.custom_ = std::make_shared<CustomData>(
          CustomData{custom_->inverse, custom_->unitary, custom_->name + "^-1"});
      return g;
    }
  }
  throw std::logic_error("Gate::inverse: unknown kind");
}

// ---- Circuit --------------------------------------------------------------------

Circuit::Circuit(int qubits) : qubits_(qubits) {
  if (qubits < 1 || qubits > 12) throw std::out_of_range("Circuit: qubit count out of range");
}

Circuit& Circuit::add(Gate g) {
  for (int t : g.targets()) {
    if (t >= qubits_) {
      throw std::out_of_range("Circuit::add: target " + std::to_string(t) + " >= qubit count " +
                              std::to_string(qubits_));
    }
  }
  gates_.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.qubits_ > qubits_) throw std::invalid_argument("Circuit::append: circuit too wide");
  for (const Gate& g : other.gates_) add(g);
  return *this;
}

ScalingFactor ScalingFactor::from_scale(int s) {
  if (s < 1 || s % 2 == 0) {
    throw std::invalid_argument("scaling factor " + std::to_string(s) +
                                " is not of the form s = 2n + 1 with n >= 0");
  }
  return ScalingFactor((s - 1) / 2);
}

ScalingFactor ScalingFactor::from_folds(int folds) {
  if (folds < 0) throw std::invalid_argument("ScalingFactor: negative fold count");
  return ScalingFactor(folds);
}

// ---- construction -------------------------------------------------------------

Circuit build_prep_circuit(int n) {
  if (n < 1 || n > 3) throw std::out_of_range("build_prep_circuit: n must be in [1, 3]");
  Circuit c(2 * n);
  for (int i = 0; i < n; ++i) {
    c.add(Gate::y2p(i));
    c.add(Gate::cnot(i, n + i));
  }
  return c;
}

Circuit fold_circuit(const Circuit& c, int folds) {
  if (folds < 0) throw std::invalid_argument("fold_circuit: negative fold count");
  Circuit inverse(c.qubits());
  for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) inverse.add(it->inverse());
  Circuit out(c.qubits());
  for (int k = 0; k < folds; ++k) {
    out.append(c);
    out.append(inverse);
  }
  out.append(c);
  return out;
}

Circuit compile_native(const Circuit& c) {
  Circuit out(c.qubits());
  for (const Gate& g : c.gates()) {
    if (g.kind() == GateKind::CNOT) {
      const int control = g.targets()[0], target = g.targets()[1];
      out.add(Gate::y2m(target));
      out.add(Gate::cz(control, target));
      out.add(Gate::y2p(target));
    } else {
      out.add(g);
    }
  }
  return out;
}

Matrix circuit_unitary(const Circuit& c) {
  const Eigen::Index d = Eigen::Index{1} << c.qubits();
  Matrix u = Matrix::Identity(d, d);
  for (const Gate& g : c.gates()) u = embed_operator(g.matrix(), g.targets(), c.qubits()) * u;
  return u;
}

// ---- simulation ---------------------------------------------------------------

Matrix simulate_matrix(const Circuit& c, Matrix rho, const NoiseModel* noise) {
  const Eigen::Index d = Eigen::Index{1} << c.qubits();
  if (rho.rows() != d || rho.cols() != d) throw std::invalid_argument("simulate: dimension mismatch");
  const bool noisy = noise != nullptr && noise->has_gate_noise();
  const Circuit native = compile_native(c);
  for (const Gate& g : native.gates()) {
    apply_local(rho, g.matrix(), g.targets(), c.qubits());
    if (noisy) apply_gate_noise(rho, g, *noise, c.qubits());
  }
  return rho;
}

DensityMatrix simulate(const Circuit& c, const DensityMatrix& input, const NoiseModel* noise) {
  if (input.qubits() != c.qubits()) throw std::invalid_argument("simulate: dimension mismatch");
  if (noise) noise->validate();
  return DensityMatrix(simulate_matrix(c, input.matrix(), noise));
}

Matrix apply_channel_on(const KrausChannel& ch, Matrix rho, const std::vector<int>& qubits,
                        int total_qubits) {
  if (static_cast<int>(qubits.size()) != ch.qubits()) {
    throw std::invalid_argument("apply_channel_on: qubit list does not match channel width");
  }
  apply_kraus_local(rho, ch.operators(), qubits, total_qubits);
  return rho;
}

}  // namespace eapt
