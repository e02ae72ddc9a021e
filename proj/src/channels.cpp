#include "eapt/channels.hpp"

#include "eapt/pauli.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eapt {

namespace {

int require_qubit_dimension(Eigen::Index dim, const char* what) {
  const int n = qubit_count_for_dimension(dim);
  if (n < 0) throw std::invalid_argument(std::string(what) + ": dimension is not a power of two");
  if (dim > kMaxDimension) throw std::length_error(std::string(what) + ": dimension too large");
  return n;
}

// Full-space offsets of the 2^k local basis states for a gate on `qubits`.
struct LocalLayout {
  std::vector<Eigen::Index> offsets;
  Eigen::Index mask = 0;
};

LocalLayout local_layout(std::span<const int> qubits, int total_qubits) {
  const int k = static_cast<int>(qubits.size());
  LocalLayout layout;
  layout.offsets.assign(std::size_t{1} << k, 0);
  for (int i = 0; i < k; ++i) {
    const int q = qubits[i];
    if (q < 0 || q >= total_qubits) throw std::out_of_range("local operator: qubit out of range");
    const Eigen::Index bit = Eigen::Index{1} << (total_qubits - 1 - q);
    if (layout.mask & bit) throw std::invalid_argument("local operator: repeated qubit");
    layout.mask |= bit;
    for (std::size_t a = 0; a < layout.offsets.size(); ++a) {
      if ((a >> (k - 1 - i)) & 1u) layout.offsets[a] |= bit;
    }
  }
  return layout;
}

// m <- O m, O local.
void left_multiply_local(Matrix& m, const Matrix& op, const LocalLayout& layout) {
  const Eigen::Index local = static_cast<Eigen::Index>(layout.offsets.size());
  Vector in(local), out(local);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index base = 0; base < m.rows(); ++base) {
      if (base & layout.mask) continue;
      for (Eigen::Index b = 0; b < local; ++b) in(b) = m(base | layout.offsets[b], c);
      out.noalias() = op * in;
      for (Eigen::Index a = 0; a < local; ++a) m(base | layout.offsets[a], c) = out(a);
    }
  }
}

// m <- m O^dagger, O local.
void right_multiply_adjoint_local(Matrix& m, const Matrix& op, const LocalLayout& layout) {
  const Eigen::Index local = static_cast<Eigen::Index>(layout.offsets.size());
  const Matrix op_conj = op.conjugate();
  Vector in(local), out(local);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index base = 0; base < m.cols(); ++base) {
      if (base & layout.mask) continue;
      for (Eigen::Index b = 0; b < local; ++b) in(b) = m(r, base | layout.offsets[b]);
      out.noalias() = op_conj * in;
      for (Eigen::Index a = 0; a < local; ++a) m(r, base | layout.offsets[a]) = out(a);
    }
  }
}

void check_local_op(const Matrix& op, std::span<const int> qubits) {
  const Eigen::Index expected = Eigen::Index{1} << qubits.size();
  if (op.rows() != expected || op.cols() != expected) {
    throw std::invalid_argument("local operator: matrix size does not match qubit count");
  }
}

}  // namespace

// ---- DensityMatrix ----------------------------------------------------------

DensityMatrix::DensityMatrix(const Matrix& m, double tolerance) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("DensityMatrix: matrix must be square");
  }
  qubits_ = require_qubit_dimension(m.rows(), "DensityMatrix");
  if (!m.allFinite()) throw std::invalid_argument("DensityMatrix: non-finite entries");
  const double herm = hermiticity_error(m);
  if (herm > tolerance) {
    throw std::invalid_argument("DensityMatrix: not Hermitian (deviation " + std::to_string(herm) +
                                ")");
  }
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0)) > tolerance) {
    throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
  }
  matrix_ = (m + m.adjoint()) / 2.0;
  const double min_eig = eig_hermitian(matrix_).eigenvalues.minCoeff();
  if (min_eig < -tolerance) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(min_eig));
  }
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("DensityMatrix::pure: zero vector");
  const Vector unit = psi / norm;
  return DensityMatrix(unit * unit.adjoint());
}

DensityMatrix DensityMatrix::basis_state(int qubits, std::uint32_t index) {
  if (qubits < 1 || qubits > 12) throw std::out_of_range("basis_state: qubit count out of range");
  const Eigen::Index d = Eigen::Index{1} << qubits;
  if (index >= d) throw std::out_of_range("basis_state: index out of range");
  Matrix m = Matrix::Zero(d, d);
  m(index, index) = 1.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(int qubits) {
  if (qubits < 1 || qubits > 12) throw std::out_of_range("maximally_mixed: qubit count out of range");
  const Eigen::Index d = Eigen::Index{1} << qubits;
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
}

// ---- KrausChannel -----------------------------------------------------------

KrausChannel::KrausChannel(std::vector<Matrix> operators)
    : KrausChannel(std::move(operators), kTraceTolerance, false) {}

KrausChannel KrausChannel::from_operators(std::vector<Matrix> operators, double tp_tolerance) {
  return KrausChannel(std::move(operators), tp_tolerance, true);
}

KrausChannel::KrausChannel(std::vector<Matrix> operators, double tp_tolerance,
                           bool allow_subnormalized)
    : operators_(std::move(operators)) {
  if (operators_.empty()) throw std::invalid_argument("KrausChannel: no operators");
  const Eigen::Index d = operators_.front().rows();
  for (const Matrix& a : operators_) {
    if (a.rows() != d || a.cols() != d) {
      throw std::invalid_argument("KrausChannel: operators must be square and equally sized");
    }
    if (!a.allFinite()) throw std::invalid_argument("KrausChannel: non-finite operator entry");
  }
  qubits_ = require_qubit_dimension(d, "KrausChannel");
  const double err = trace_preservation_error();
  trace_preserving_ = err <= tp_tolerance;
  if (!trace_preserving_ && !allow_subnormalized) {
    throw std::invalid_argument("KrausChannel: not trace preserving (deviation " +
                                std::to_string(err) + ")");
  }
}

KrausChannel KrausChannel::identity(int qubits) {
  if (qubits < 1 || qubits > 12) throw std::out_of_range("KrausChannel::identity: bad qubit count");
  const Eigen::Index d = Eigen::Index{1} << qubits;
  return KrausChannel({Matrix::Identity(d, d)});
}

KrausChannel KrausChannel::unitary(const Matrix& u) { return KrausChannel({u}); }

double KrausChannel::trace_preservation_error() const {
  const Eigen::Index d = operators_.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& a : operators_) sum.noalias() += a.adjoint() * a;
  return (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

Matrix KrausChannel::apply(const Matrix& rho) const {
  if (rho.rows() != dim() || rho.cols() != dim()) {
    throw std::invalid_argument("KrausChannel::apply: dimension mismatch");
  }
  Matrix out = Matrix::Zero(dim(), dim());
  for (const Matrix& a : operators_) out.noalias() += a * rho * a.adjoint();
  return out;
}

KrausChannel KrausChannel::compose_after(const KrausChannel& first) const {
  if (first.dim() != dim()) throw std::invalid_argument("compose_after: dimension mismatch");
  std::vector<Matrix> ops;
  ops.reserve(operators_.size() * first.operators_.size());
  for (const Matrix& b : operators_) {
    for (const Matrix& a : first.operators_) ops.push_back(b * a);
  }
  return from_operators(std::move(ops), kTraceTolerance);
}

// ---- ChoiState / ChiMatrix --------------------------------------------------

ChoiState::ChoiState(int channel_qubits, DensityMatrix state)
    : channel_qubits_(channel_qubits), state_(std::move(state)) {
  if (channel_qubits < 1 || state_.qubits() != 2 * channel_qubits) {
    throw std::invalid_argument("ChoiState: state must live on 2n qubits");
  }
}

double ChoiState::trace_preservation_error() const {
  const int d = 1 << channel_qubits_;
  const Matrix ancilla = partial_trace(state_.matrix(), {d, d}, {1});
  return (ancilla - Matrix::Identity(d, d) / static_cast<double>(d)).cwiseAbs().maxCoeff();
}

ChiMatrix::ChiMatrix(int qubits, Matrix coefficients)
    : qubits_(qubits), coefficients_(std::move(coefficients)) {
  if (qubits < 1 || qubits > 4) throw std::out_of_range("ChiMatrix: qubit count out of range");
  const Eigen::Index dd = Eigen::Index{1} << (2 * qubits);
  if (coefficients_.rows() != dd || coefficients_.cols() != dd) {
    throw std::invalid_argument("ChiMatrix: coefficient matrix must be d^2 x d^2");
  }
  if (hermiticity_error(coefficients_) > 1e-8) {
    throw std::invalid_argument("ChiMatrix: coefficients not Hermitian");
  }
}

Matrix ChiMatrix::apply(const Matrix& rho) const {
  const Eigen::Index d = Eigen::Index{1} << qubits_;
  if (rho.rows() != d || rho.cols() != d) throw std::invalid_argument("ChiMatrix::apply: dimension mismatch");
  const std::uint32_t count = pauli_count(qubits_);
  std::vector<PauliString> basis;
  basis.reserve(count);
  for (std::uint32_t m = 0; m < count; ++m) basis.push_back(PauliString::from_index(m, qubits_));

  // (P_m rho P_n)[c ^ x_m, b] = phase_m(c) rho[c, b ^ x_n] phase_n(b)
  Matrix out = Matrix::Zero(d, d);
  for (std::uint32_t m = 0; m < count; ++m) {
    for (std::uint32_t n = 0; n < count; ++n) {
      const Complex coeff = coefficients_(m, n);
      if (coeff == Complex(0.0)) continue;
      const PauliString& pm = basis[m];
      const PauliString& pn = basis[n];
      for (std::uint32_t c = 0; c < d; ++c) {
        const Complex left = coeff * pm.phase(c);
        for (std::uint32_t b = 0; b < d; ++b) {
          out(c ^ pm.x_mask, b) += left * rho(c, b ^ pn.x_mask) * pn.phase(b);
        }
      }
    }
  }
  return out;
}

bool ReadoutModel::is_identity() const {
  for (const auto& c : confusion) {
    if ((c - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 0.0) return false;
  }
  return true;
}

// ---- NoiseModel ---------------------------------------------------------------

double NoiseModel::single_qubit_rate(int qubit) const {
  auto it = single_qubit_overrides.find(qubit);
  return it != single_qubit_overrides.end() ? it->second : single_qubit_depolarizing;
}

double NoiseModel::two_qubit_rate(int a, int b) const {
  auto it = two_qubit_overrides.find({std::min(a, b), std::max(a, b)});
  return it != two_qubit_overrides.end() ? it->second : two_qubit_depolarizing;
}

ReadoutModel NoiseModel::readout_for(int qubits) const {
  ReadoutModel out;
  out.confusion.reserve(qubits);
  for (int q = 0; q < qubits; ++q) {
    out.confusion.push_back(q < readout.qubits() ? readout.confusion[q]
                                                 : Eigen::Matrix2d::Identity());
  }
  return out;
}

bool NoiseModel::has_gate_noise() const {
  if (single_qubit_depolarizing > 0 || two_qubit_depolarizing > 0 || amplitude_damping > 0 ||
      dephasing > 0) {
    return true;
  }
  for (const auto& [q, p] : single_qubit_overrides) if (p > 0) return true;
  for (const auto& [pair, p] : two_qubit_overrides) if (p > 0) return true;
  return false;
}

void NoiseModel::validate() const {
  auto check = [](double p, const std::string& field) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("noise." + field + ": probability " + std::to_string(p) +
                                  " outside [0, 1]");
    }
  };
  check(single_qubit_depolarizing, "single_qubit_depolarizing");
  check(two_qubit_depolarizing, "two_qubit_depolarizing");
  check(amplitude_damping, "amplitude_damping");
  check(dephasing, "dephasing");
  for (const auto& [q, p] : single_qubit_overrides) {
    check(p, "single_qubit_depolarizing[" + std::to_string(q) + "]");
  }
  for (const auto& [pair, p] : two_qubit_overrides) {
    check(p, "two_qubit_depolarizing[" + std::to_string(pair.first) + "," +
                 std::to_string(pair.second) + "]");
  }
  for (std::size_t q = 0; q < readout.confusion.size(); ++q) {
    const auto& c = readout.confusion[q];
    for (int r = 0; r < 2; ++r) {
      if (std::abs(c.row(r).sum() - 1.0) > 1e-12 || c.row(r).minCoeff() < 0.0) {
        throw std::invalid_argument("noise.readout[" + std::to_string(q) +
                                    "]: confusion row is not a probability vector");
      }
    }
  }
}

// ---- operations -----------------------------------------------------------

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
  if (ch.dim() != rho.dim()) throw std::invalid_argument("apply_channel: dimension mismatch");
  Matrix out = ch.apply(rho.matrix());
  if (!ch.is_trace_preserving()) {
    const double tr = out.trace().real();
    if (!(tr > 0.0)) throw std::domain_error("apply_channel: output has zero trace");
    out /= tr;
  }
  return DensityMatrix(out);
}

Vector max_entangled_vector(int n) {
  if (n < 1 || n > 6) throw std::out_of_range("max_entangled_vector: n out of range");
  const Eigen::Index d = Eigen::Index{1} << n;
  Vector psi = Vector::Zero(d * d);
  for (Eigen::Index j = 0; j < d; ++j) psi(j * d + j) = 1.0 / std::sqrt(static_cast<double>(d));
  return psi;
}

ChoiState choi_from_channel(const KrausChannel& ch) {
  const int n = ch.qubits();
  if (2 * n > 12) throw std::length_error("choi_from_channel: channel too large");
  const Vector phi = max_entangled_vector(n);
  Matrix rho = phi * phi.adjoint();
  std::vector<int> system(n);
  for (int q = 0; q < n; ++q) system[q] = q;
  apply_kraus_local(rho, ch.operators(), system, 2 * n);
  if (!ch.is_trace_preserving()) rho /= rho.trace().real();
  return ChoiState(n, DensityMatrix(rho));
}

KrausChannel channel_from_choi(const ChoiState& choi) {
  constexpr double kCutoff = 1e-10;
  const int n = choi.channel_qubits();
  const Eigen::Index d = Eigen::Index{1} << n;
  const auto eig = eig_hermitian(choi.matrix());
  if (eig.eigenvalues.minCoeff() < -1e-8) {
    throw std::domain_error("channel_from_choi: Choi state is not positive semidefinite");
  }
  std::vector<Matrix> ops;
  for (Eigen::Index k = eig.eigenvalues.size() - 1; k >= 0; --k) {
    const double lambda = eig.eigenvalues(k);
    if (lambda <= kCutoff) continue;
    const double scale = std::sqrt(static_cast<double>(d) * lambda);
    // Segment i (system index i, ancilla index j runs fastest) is row i of A_k.
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) a(i, j) = scale * eig.eigenvectors(i * d + j, k);
    }
    ops.push_back(std::move(a));
  }
  if (ops.empty()) throw std::domain_error("channel_from_choi: no eigenvalue above cutoff");
  return KrausChannel::from_operators(std::move(ops), 1e-6);
}

ChiMatrix chi_from_channel(const KrausChannel& ch) {
  const int n = ch.qubits();
  if (n > 4) throw std::length_error("chi_from_channel: at most 4 qubits");
  const std::uint32_t count = pauli_count(n);
  const double d = static_cast<double>(ch.dim());
  // A_k = sum_m a_km P_m with a_km = Tr(P_m A_k) / d
  Matrix coeffs(static_cast<Eigen::Index>(ch.operators().size()), count);
  for (std::size_t k = 0; k < ch.operators().size(); ++k) {
    for (std::uint32_t m = 0; m < count; ++m) {
      coeffs(k, m) = pauli_expectation(ch.operators()[k], PauliString::from_index(m, n)) / d;
    }
  }
  Matrix chi = coeffs.transpose() * coeffs.conjugate();
  chi = (chi + chi.adjoint()) / 2.0;
  return ChiMatrix(n, chi);
}

KrausChannel channel_from_chi(const ChiMatrix& chi) {
  const int n = chi.qubits();
  const std::uint32_t count = pauli_count(n);
  const Eigen::Index d = Eigen::Index{1} << n;
  const auto eig = eig_hermitian(chi.coefficients());
  std::vector<Matrix> ops;
  for (Eigen::Index k = eig.eigenvalues.size() - 1; k >= 0; --k) {
    const double mu = eig.eigenvalues(k);
    if (mu <= 1e-12) continue;
    Matrix a = Matrix::Zero(d, d);
    for (std::uint32_t m = 0; m < count; ++m) {
      add_pauli(a, PauliString::from_index(m, n), std::sqrt(mu) * eig.eigenvectors(m, k));
    }
    ops.push_back(std::move(a));
  }
  if (ops.empty()) throw std::domain_error("channel_from_chi: chi matrix has no positive part");
  return KrausChannel::from_operators(std::move(ops), 1e-6);
}

KrausChannel make_depolarizing(double p, int qubits) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("make_depolarizing: p outside [0, 1]");
  if (qubits < 1 || qubits > 4) throw std::out_of_range("make_depolarizing: qubit count out of range");
  const std::uint32_t count = pauli_count(qubits);
  const double d2 = static_cast<double>(count);
  std::vector<Matrix> ops;
  ops.push_back(std::sqrt(1.0 - p + p / d2) * pauli_matrix(0, qubits));
  if (p > 0.0) {
    for (std::uint32_t m = 1; m < count; ++m) ops.push_back(std::sqrt(p / d2) * pauli_matrix(m, qubits));
  }
  return KrausChannel(std::move(ops));
}

KrausChannel make_amplitude_damping(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("make_amplitude_damping: gamma outside [0, 1]");
  }
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel({k0, k1});
}

KrausChannel make_dephasing(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("make_dephasing: lambda outside [0, 1]");
  }
  return KrausChannel({std::sqrt(1.0 - lambda / 2.0) * pauli_1q(0), std::sqrt(lambda / 2.0) * pauli_1q(3)});
}

ReadoutModel make_readout_confusion(const std::vector<double>& error_rates) {
  ReadoutModel model;
  for (std::size_t q = 0; q < error_rates.size(); ++q) {
    const double e = error_rates[q];
    if (!(e >= 0.0 && e <= 0.5)) {
      throw std::invalid_argument("make_readout_confusion: rate for qubit " + std::to_string(q) +
                                  " outside [0, 0.5]");
    }
    Eigen::Matrix2d c;
    c << 1.0 - e, e, e, 1.0 - e;
    model.confusion.push_back(c);
  }
  return model;
}

// ---- local action -----------------------------------------------------------

void apply_local(Matrix& rho, const Matrix& op, std::span<const int> qubits, int total_qubits) {
  check_local_op(op, qubits);
  const LocalLayout layout = local_layout(qubits, total_qubits);
  left_multiply_local(rho, op, layout);
  right_multiply_adjoint_local(rho, op, layout);
}

void apply_kraus_local(Matrix& rho, const std::vector<Matrix>& ops, std::span<const int> qubits,
                       int total_qubits) {
  if (ops.empty()) throw std::invalid_argument("apply_kraus_local: no operators");
  if (ops.size() == 1) {
    apply_local(rho, ops.front(), qubits, total_qubits);
    return;
  }
  const LocalLayout layout = local_layout(qubits, total_qubits);
  Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
  Matrix work;
  for (const Matrix& k : ops) {
    check_local_op(k, qubits);
    work = rho;
    left_multiply_local(work, k, layout);
    right_multiply_adjoint_local(work, k, layout);
    acc += work;
  }
  rho = std::move(acc);
}

Matrix embed_operator(const Matrix& op, std::span<const int> qubits, int total_qubits) {
  check_local_op(op, qubits);
  const Eigen::Index d = Eigen::Index{1} << total_qubits;
  Matrix out = Matrix::Identity(d, d);
  left_multiply_local(out, op, local_layout(qubits, total_qubits));
  return out;
}

}  // namespace eapt
