#include "eapt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eapt {

double state_fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols()) {
    throw std::invalid_argument("state_fidelity: dimension mismatch");
  }
  // Eigenvalues at rounding level would otherwise enter through their square
  // roots (1e-17 -> 3e-9), so they are treated as exact zeros.
  const double noise = 16.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(rho.rows());
  auto rho_eig = eig_hermitian(rho);
  if (rho_eig.eigenvalues.minCoeff() < -kPsdClipTolerance) throw std::domain_error("state_fidelity: rho is not PSD");
  const double rho_floor = noise * rho_eig.eigenvalues.cwiseAbs().maxCoeff();
  RealVector roots(rho_eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    roots(i) = rho_eig.eigenvalues(i) > rho_floor ? std::sqrt(rho_eig.eigenvalues(i)) : 0.0;
  }
  const Matrix root = rho_eig.eigenvectors * roots.cast<Complex>().asDiagonal() * rho_eig.eigenvectors.adjoint();
  const auto eig = eig_hermitian(Matrix(root * sigma * root));
  const double floor = noise * eig.eigenvalues.cwiseAbs().maxCoeff();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues(i) > floor) sum += std::sqrt(eig.eigenvalues(i));
  }
  return std::clamp(sum * sum, 0.0, 1.0);
}

double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return state_fidelity(rho.matrix(), sigma.matrix());
}

double state_fidelity(const DensityMatrix& rho, const Vector& psi) {
  if (psi.size() != rho.dim()) throw std::invalid_argument("state_fidelity: dimension mismatch");
  const double norm = psi.squaredNorm();
  if (std::abs(norm - 1.0) > 1e-9) throw std::invalid_argument("state_fidelity: reference state not normalized");
  return std::clamp(psi.dot(rho.matrix() * psi).real(), 0.0, 1.0);
}

void require_unitary(const Matrix& u, double tolerance) {
  if (u.rows() != u.cols() || u.rows() == 0) throw std::invalid_argument("target is not square");
  const Matrix err = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  if (err.cwiseAbs().maxCoeff() > tolerance) throw std::invalid_argument("target is not unitary");
}

double process_fidelity(const KrausChannel& actual, const Matrix& target) {
  require_unitary(target);
  if (target.rows() != actual.dim()) throw std::invalid_argument("process_fidelity: dimension mismatch");
  const double d = static_cast<double>(actual.dim());
  double overlap = 0.0;
  for (const Matrix& a : actual.operators()) overlap += std::norm((target.adjoint() * a).trace());
  return overlap / (d * d);
}

double average_gate_fidelity(const KrausChannel& actual, const Matrix& target) {
  require_unitary(target);
  if (target.rows() != actual.dim()) throw std::invalid_argument("average_gate_fidelity: dimension mismatch");
  const double d = static_cast<double>(actual.dim());
  double norm = 0.0, overlap = 0.0;
  for (const Matrix& a : actual.operators()) {
    norm += a.squaredNorm();
    overlap += std::norm((target.adjoint() * a).trace());
  }
  return std::clamp((norm + overlap) / (d * (d + 1.0)), 0.0, 1.0);
}

double choi_distance(const ChoiState& a, const ChoiState& b) {
  if (a.channel_qubits() != b.channel_qubits()) throw std::invalid_argument("choi_distance: dimension mismatch");
  return frobenius_distance(a.matrix(), b.matrix());
}

double choi_distance(const ChoiState& a, const Matrix& unitary) {
  return choi_distance(a, choi_from_channel(KrausChannel::unitary(unitary)));
}

}  // namespace eapt
