#pragma once

// Dense complex-matrix kernel: Kronecker products, partial traces,
// Hermitian eigendecomposition and PSD square roots.
//
// All functions accept arbitrary Eigen expressions and return plain dense
// matrices of the argument's scalar type.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace eapt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Largest row/column count any kernel routine will produce (2^12).
inline constexpr Eigen::Index kMaxDimension = Eigen::Index{1} << 12;

/// Tolerance on |M - M^dagger| entries accepted by eig_hermitian.
inline constexpr double kHermitianTolerance = 1e-8;

/// Negative eigenvalues above this are treated as round-off in sqrt_psd.
inline constexpr double kPsdClipTolerance = 1e-10;

template <typename Scalar>
struct HermitianEigen {
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;
  /// Ascending.
  Eigen::Matrix<RealScalar, Eigen::Dynamic, 1> eigenvalues;
  /// Orthonormal columns, column k pairs with eigenvalues(k).
  DenseMatrix<Scalar> eigenvectors;

  DenseMatrix<Scalar> reconstruct() const {
    return eigenvectors * eigenvalues.template cast<Scalar>().asDiagonal() *
           eigenvectors.adjoint();
  }
};

template <typename DerivedA, typename DerivedB>
DenseMatrix<typename DerivedA::Scalar> tensor(const Eigen::MatrixBase<DerivedA>& a,
                                              const Eigen::MatrixBase<DerivedB>& b) {
  static_assert(std::is_same_v<typename DerivedA::Scalar, typename DerivedB::Scalar>,
                "tensor: operands must share a scalar type");
  const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  if (ra == 0 || ca == 0 || rb == 0 || cb == 0) {
    throw std::invalid_argument("tensor: empty operand");
  }
  if (ra * rb > kMaxDimension || ca * cb > kMaxDimension) {
    throw std::length_error("tensor: result exceeds maximum dimension 4096");
  }
  DenseMatrix<typename DerivedA::Scalar> out(ra * rb, ca * cb);
  const DenseMatrix<typename DerivedB::Scalar> bb = b;
  for (Eigen::Index i = 0; i < ra; ++i) {
    for (Eigen::Index j = 0; j < ca; ++j) {
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * bb;
    }
  }
  return out;
}

/// Tensor product of a list of factors, left to right (factor 0 most significant).
template <typename Scalar>
DenseMatrix<Scalar> tensor_all(const std::vector<DenseMatrix<Scalar>>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_all: no factors");
  DenseMatrix<Scalar> out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = tensor(out, factors[k]);
  return out;
}

/// Reduced operator on the subsystems listed in `keep` (any order; the result
/// orders kept subsystems by ascending index). An empty `keep` yields the 1x1
/// full trace.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> partial_trace(const Eigen::MatrixBase<Derived>& rho,
                                                    const std::vector<int>& dims,
                                                    std::vector<int> keep) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("partial_trace: matrix not square");
  if (dims.empty()) throw std::invalid_argument("partial_trace: no subsystem dimensions");
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("partial_trace: non-positive subsystem dimension");
    total *= d;
  }
  if (total != rho.rows()) {
    throw std::invalid_argument("partial_trace: product of dims " + std::to_string(total) +
                                " does not match matrix dimension " +
                                std::to_string(rho.rows()));
  }
  const int count = static_cast<int>(dims.size());
  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) {
    if (k < 0 || k >= count) throw std::out_of_range("partial_trace: keep index out of range");
    if (kept[k]) throw std::invalid_argument("partial_trace: duplicate keep index");
    kept[k] = true;
  }

  // Full index = sum of digit * stride, so it splits into a kept offset plus a
  // traced offset.
  std::vector<Eigen::Index> stride(dims.size());
  Eigen::Index s = 1;
  for (int i = count - 1; i >= 0; --i) {
    stride[i] = s;
    s *= dims[i];
  }
  auto offsets = [&](bool want_kept) {
    std::vector<Eigen::Index> out{0};
    for (int i = 0; i < count; ++i) {
      if (kept[i] != want_kept) continue;
      std::vector<Eigen::Index> next;
      next.reserve(out.size() * dims[i]);
      for (Eigen::Index base : out) {
        for (int digit = 0; digit < dims[i]; ++digit) next.push_back(base + digit * stride[i]);
      }
      out = std::move(next);
    }
    return out;
  };
  const std::vector<Eigen::Index> off_keep = offsets(true);
  const std::vector<Eigen::Index> off_trace = offsets(false);

  const Eigen::Index dk = static_cast<Eigen::Index>(off_keep.size());
  DenseMatrix<typename Derived::Scalar> out =
      DenseMatrix<typename Derived::Scalar>::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a) {
    for (Eigen::Index b = 0; b < dk; ++b) {
      typename Derived::Scalar acc(0);
      for (Eigen::Index t : off_trace) acc += rho(off_keep[a] + t, off_keep[b] + t);
      out(a, b) = acc;
    }
  }
  return out;
}

/// Largest entrywise deviation |M - M^dagger|.
template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
HermitianEigen<typename Derived::Scalar> eig_hermitian(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("eig_hermitian: matrix must be square and non-empty");
  }
  const double dev = hermiticity_error(m);
  if (!(dev <= kHermitianTolerance)) {
    throw std::invalid_argument("eig_hermitian: Hermiticity deviation " + std::to_string(dev) +
                                " exceeds tolerance");
  }
  const DenseMatrix<Scalar> sym = (m + m.adjoint()) / typename Eigen::NumTraits<Scalar>::Real(2);
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_hermitian: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Principal square root of a positive semidefinite Hermitian matrix.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> sqrt_psd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  auto eig = eig_hermitian(m);
  if (eig.eigenvalues.minCoeff() < -kPsdClipTolerance) {
    throw std::domain_error("sqrt_psd: eigenvalue " + std::to_string(eig.eigenvalues.minCoeff()) +
                            " is below -1e-10 (non-physical input)");
  }
  auto roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt().template cast<Scalar>();
  return eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
}

/// Clip negative eigenvalues and rescale to unit trace.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> project_to_density(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  auto eig = eig_hermitian(m);
  auto clipped = eig.eigenvalues.cwiseMax(0.0).eval();
  const double total = clipped.sum();
  if (!(total > 0.0)) throw std::domain_error("project_to_density: no positive spectrum");
  clipped /= total;
  return eig.eigenvectors * clipped.template cast<Scalar>().asDiagonal() *
         eig.eigenvectors.adjoint();
}

/// Hilbert-Schmidt (Frobenius) distance.
template <typename DerivedA, typename DerivedB>
double frobenius_distance(const Eigen::MatrixBase<DerivedA>& a,
                          const Eigen::MatrixBase<DerivedB>& b) {
  return (a - b).norm();
}

/// Trace distance (1/2)||a - b||_1 for Hermitian arguments.
template <typename DerivedA, typename DerivedB>
double trace_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const DenseMatrix<typename DerivedA::Scalar> diff = a - b;
  return 0.5 * eig_hermitian(diff).eigenvalues.cwiseAbs().sum();
}

/// log2 of a power-of-two dimension, or -1.
inline int qubit_count_for_dimension(Eigen::Index dim) {
  if (dim <= 0 || (dim & (dim - 1)) != 0) return -1;
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

}  // namespace eapt
