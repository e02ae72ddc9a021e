#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library routine it is used to check: Kronecker products and partial traces
// are written as explicit index loops, Choi states come from vectorized Kraus
// operators, and likelihoods are summed over explicit projector matrices.

#include "eapt/channels.hpp"
#include "eapt/random.hpp"
#include "eapt/tomography.hpp"

#include <cmath>
#include <vector>

namespace eapt::testing {

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  }
  return m;
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of R divided out.
inline Matrix random_unitary(Eigen::Index d, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(d, d, rng));
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

inline Vector haar_state(Eigen::Index d, Rng& rng) {
  Vector v = gaussian_matrix(d, 1, rng);
  return v / v.norm();
}

inline Matrix random_density(Eigen::Index d, Eigen::Index rank, Rng& rng) {
  const Matrix g = gaussian_matrix(d, rank, rng);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace();
}

/// Random CPTP map with `count` Kraus operators from a random isometry.
inline std::vector<Matrix> random_kraus(Eigen::Index d, int count, Rng& rng) {
  const Matrix u = random_unitary(d * count, rng);
  std::vector<Matrix> ops;
  for (int k = 0; k < count; ++k) ops.push_back(u.block(k * d, 0, d, d));
  return ops;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Trace out the second factor of a (da x db) bipartite operator.
inline Matrix trace_second(const Matrix& rho, Eigen::Index da, Eigen::Index db) {
  Matrix out = Matrix::Zero(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      for (Eigen::Index k = 0; k < db; ++k) out(i, j) += rho(i * db + k, j * db + k);
  return out;
}

inline Matrix trace_first(const Matrix& rho, Eigen::Index da, Eigen::Index db) {
  Matrix out = Matrix::Zero(db, db);
  for (Eigen::Index i = 0; i < db; ++i)
    for (Eigen::Index j = 0; j < db; ++j)
      for (Eigen::Index k = 0; k < da; ++k) out(i, j) += rho(k * db + i, k * db + j);
  return out;
}

/// Row-major vec: v(i d + j) = A(i, j).
inline Vector vec_rows(const Matrix& a) {
  Vector v(a.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

/// (E (x) I)(Phi+) = (1/d) sum_k vec(A_k) vec(A_k)^dagger.
inline Matrix choi_by_vec(const std::vector<Matrix>& ops) {
  const Eigen::Index d = ops.front().rows();
  Matrix out = Matrix::Zero(d * d, d * d);
  for (const Matrix& a : ops) {
    const Vector v = vec_rows(a);
    out += v * v.adjoint();
  }
  return out / static_cast<double>(d);
}

inline Matrix apply_kraus(const std::vector<Matrix>& ops, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const Matrix& a : ops) out += a * rho * a.adjoint();
  return out;
}

inline Matrix pauli(int k) {
  Matrix m(2, 2);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

/// Pauli string as an explicit Kronecker product of 2x2 factors.
inline Matrix pauli_kron(const std::vector<int>& codes) {
  Matrix out = Matrix::Identity(1, 1);
  for (int c : codes) out = kron(out, pauli(c));
  return out;
}

/// +1 (bit 0) and -1 (bit 1) eigenvectors of X, Y or Z.
inline Vector eigenvector(Basis b, int bit) {
  const double h = std::sqrt(0.5);
  Vector v(2);
  const double sign = bit == 0 ? 1.0 : -1.0;
  switch (b) {
    case Basis::X: v << h, sign * h; break;
    case Basis::Y: v << h, Complex(0, sign * h); break;
    case Basis::Z: v << (bit == 0 ? 1.0 : 0.0), (bit == 0 ? 0.0 : 1.0); break;
  }
  return v;
}

/// Projector onto outcome `outcome` (big-endian bits) of a setting.
inline Matrix projector(const MeasurementSetting& s, std::size_t outcome) {
  const int n = s.qubits();
  Matrix v = Matrix::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    const int bit = static_cast<int>((outcome >> (n - 1 - q)) & 1);
    v = kron(v, eigenvector(s.basis(q), bit));
  }
  return v * v.adjoint();
}

inline double brute_objective(const TomographyDataset& data, const Matrix& rho, double floor = 1e-9) {
  double total = 0.0;
  for (const CountsRecord& r : data.records()) {
    for (std::size_t b = 0; b < r.frequencies.size(); ++b) {
      const double q = (projector(r.setting, b) * rho).trace().real();
      total += (q - r.frequencies[b]) * (q - r.frequencies[b]) / (2.0 * std::max(q, floor));
    }
  }
  return total;
}

/// Monte-Carlo Haar average of <psi|U^dagger E(psi) U|psi> with its standard error.
inline std::pair<double, double> haar_average_fidelity(const std::vector<Matrix>& ops, const Matrix& u, int samples,
                                                       Rng& rng) {
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector psi = haar_state(u.rows(), rng);
    const Vector target = u * psi;
    const double f = target.dot(apply_kraus(ops, psi * psi.adjoint()) * target).real();
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / samples;
  const double var = (sum2 / samples - mean * mean) * samples / (samples - 1.0);
  return {mean, std::sqrt(var / samples)};
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace eapt::testing
