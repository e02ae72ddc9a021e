#include "eapt/tomography.hpp"

#include "eapt/pauli.hpp"
#include "eapt/random.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace eapt {

namespace {

// Mixing weight toward I/d applied to a clipped linear-inversion estimate so
// that it admits a Cholesky factor.
constexpr double kStartMixing = 1e-10;

int dimension_for_params(Eigen::Index count) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(count))));
  if (d < 1 || d * d != count) throw std::invalid_argument("CholeskyParams: size is not a square");
  return static_cast<int>(d);
}

// Walks the strictly-lower entries in parameter order: sub-diagonal k = 1..d-1,
// rows top to bottom. fn(row, col, offset_of_real_part).
template <typename Fn>
void for_each_offdiag(int d, Fn&& fn) {
  Eigen::Index offset = d;
  for (int k = 1; k < d; ++k) {
    for (int i = k; i < d; ++i) {
      fn(i, i - k, offset);
      offset += 2;
    }
  }
}

// Precomputed dataset view: observed distributions plus, for each setting and
// outcome parity mask, the Pauli string whose expectation that mask reads out.
class Problem {
 public:
  Problem(const TomographyDataset& data, double floor) : n_(data.qubits()), floor_(floor) {
    d_ = 1 << n_;
    const std::size_t settings = data.setting_count();
    observed_.reserve(settings);
    pauli_of_.resize(settings * d_);
    for (std::size_t s = 0; s < settings; ++s) {
      const CountsRecord& r = data.records()[s];
      observed_.push_back(r.frequencies);
      for (int mask = 0; mask < d_; ++mask) {
        std::uint32_t m = 0;
        for (int q = 0; q < n_; ++q) {
          m <<= 2;
          if (mask & (1 << (n_ - 1 - q))) m |= static_cast<std::uint32_t>(r.setting.basis(q)) + 1;
        }
        pauli_of_[s * d_ + mask] = m;
      }
    }
    paulis_.reserve(pauli_count(n_));
    for (std::uint32_t m = 0; m < pauli_count(n_); ++m) paulis_.push_back(PauliString::from_index(m, n_));
  }

  int dim() const { return d_; }

  /// Objective at rho; when `pauli_grad` is given it receives dL/dS_m.
  double evaluate(const Matrix& rho, RealVector* pauli_grad) const {
    RealVector stokes(paulis_.size());
    for (std::size_t m = 0; m < paulis_.size(); ++m) stokes(m) = pauli_expectation(rho, paulis_[m]).real();
    if (pauli_grad) *pauli_grad = RealVector::Zero(paulis_.size());
    double total = 0.0;
    std::vector<double> v(d_), g(d_);
    for (std::size_t s = 0; s < observed_.size(); ++s) {
      const std::uint32_t* map = &pauli_of_[s * d_];
      for (int mask = 0; mask < d_; ++mask) v[mask] = stokes(map[mask]);
      walsh_hadamard(v);
      for (int b = 0; b < d_; ++b) {
        const double q = v[b] / d_;
        const double diff = q - observed_[s][b];
        const double denom = std::max(q, floor_);
        total += diff * diff / (2.0 * denom);
        g[b] = q > floor_ ? diff / denom - diff * diff / (2.0 * denom * denom) : diff / denom;
      }
      if (!pauli_grad) continue;
      walsh_hadamard(g);
      for (int mask = 0; mask < d_; ++mask) (*pauli_grad)(map[mask]) += g[mask] / d_;
    }
    return total;
  }

  /// Objective and gradient with respect to the Cholesky parameters.
  double evaluate_params(const RealVector& t, RealVector& grad) const {
    const Matrix T = build_T(CholeskyParams{t});
    const Matrix raw = T.adjoint() * T;
    const double tau = raw.trace().real();
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      grad = RealVector::Zero(t.size());
      return std::numeric_limits<double>::infinity();
    }
    const Matrix rho = raw / tau;
    RealVector c;
    const double value = evaluate(rho, &c);
    Matrix G = Matrix::Zero(d_, d_);
    for (std::size_t m = 0; m < paulis_.size(); ++m) {
      if (c(m) != 0.0) add_pauli(G, paulis_[m], c(m));
    }
    G.diagonal().array() -= (G * rho).trace();
    const Matrix M = (2.0 / tau) * (T * G);
    grad.resize(t.size());
    for (int i = 0; i < d_; ++i) grad(i) = M(i, i).real();
    for_each_offdiag(d_, [&](int i, int j, Eigen::Index o) {
      grad(o) = M(i, j).real();
      grad(o + 1) = M(i, j).imag();
    });
    return value;
  }

 private:
  int n_;
  int d_ = 0;
  double floor_;
  std::vector<std::vector<double>> observed_;
  std::vector<std::uint32_t> pauli_of_;
  std::vector<PauliString> paulis_;
};

struct Minimum {
  RealVector t;
  double value = 0.0;
  int iterations = 0;
  bool capped = false;
};

// Limited-memory BFGS with a backtracking Armijo line search.
Minimum lbfgs(const Problem& problem, RealVector t, const MleOptions& options) {
  RealVector grad;
  double value = problem.evaluate_params(t, grad);
  if (!std::isfinite(value)) throw std::domain_error("mle_reconstruct: start point has zero trace");
  std::deque<std::pair<RealVector, RealVector>> history;
  int iter = 0;
  bool converged = false;
  while (iter < options.max_iterations) {
    if (grad.norm() == 0.0) {
      converged = true;
      break;
    }
    // Two-loop recursion.
    RealVector dir = -grad;
    std::vector<double> alpha(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      const auto& [s, y] = history[k];
      alpha[k] = s.dot(dir) / y.dot(s);
      dir -= alpha[k] * y;
    }
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      dir *= s.dot(y) / y.squaredNorm();
    } else {
      dir /= std::max(1.0, grad.norm() / std::max(t.norm(), 1e-12));
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const auto& [s, y] = history[k];
      const double beta = y.dot(dir) / y.dot(s);
      dir += (alpha[k] - beta) * s;
    }
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      history.clear();
      dir = -grad / std::max(1.0, grad.norm() / std::max(t.norm(), 1e-12));
      slope = grad.dot(dir);
    }

    double step = 1.0;
    RealVector next_t, next_grad;
    double next_value = value;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      next_t = t + step * dir;
      next_value = problem.evaluate_params(next_t, next_grad);
      if (std::isfinite(next_value) && next_value <= value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iter;
    if (!accepted) {
      if (history.empty()) {
        converged = true;
        break;
      }
      history.clear();
      continue;
    }
    const double improvement = value - next_value;
    RealVector s = next_t - t, y = next_grad - grad;
    t = std::move(next_t);
    grad = std::move(next_grad);
    value = next_value;
    if (y.dot(s) > 1e-300) {
      history.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(history.size()) > options.lbfgs_memory) history.pop_front();
    }
    if (improvement < options.tolerance) {
      converged = true;
      break;
    }
  }
  return Minimum{std::move(t), value, iter, !converged};
}

}  // namespace

Matrix build_T(const CholeskyParams& params) {
  const int d = dimension_for_params(params.t.size());
  const RealVector& t = params.t;
  Matrix T = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) T(i, i) = t(i);
  for_each_offdiag(d, [&](int i, int j, Eigen::Index o) { T(i, j) = Complex(t(o), t(o + 1)); });
  return T;
}

Matrix density_from_params(const CholeskyParams& params) {
  const Matrix T = build_T(params);
  const Matrix raw = T.adjoint() * T;
  const double tau = raw.trace().real();
  if (!(tau > 0.0)) throw std::domain_error("density_from_params: T is zero");
  return raw / tau;
}

CholeskyParams params_from_density(const Matrix& rho) {
  const Eigen::Index d = rho.rows();
  if (d < 1 || rho.cols() != d) throw std::invalid_argument("params_from_density: matrix not square");
  // With J the exchange matrix, J rho J = L L^dagger gives T = J L^dagger J.
  const Matrix flipped = rho.reverse();
  Eigen::LLT<Matrix> llt(0.5 * (flipped + flipped.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("params_from_density: matrix is not positive definite");
  }
  const Matrix T = Matrix(llt.matrixL()).adjoint().reverse();
  CholeskyParams p{RealVector(d * d)};
  for (Eigen::Index i = 0; i < d; ++i) p.t(i) = T(i, i).real();
  for_each_offdiag(static_cast<int>(d), [&](int i, int j, Eigen::Index o) {
    p.t(o) = T(i, j).real();
    p.t(o + 1) = T(i, j).imag();
  });
  return p;
}

double mle_objective(const TomographyDataset& data, const Matrix& rho, double floor) {
  const Problem problem(data, floor);
  if (rho.rows() != problem.dim() || rho.cols() != problem.dim()) {
    throw std::invalid_argument("mle_objective: dimension mismatch");
  }
  return problem.evaluate(rho, nullptr);
}

double mle_objective_gradient(const TomographyDataset& data, const CholeskyParams& params, RealVector& grad,
                              double floor) {
  const Problem problem(data, floor);
  if (params.t.size() != static_cast<Eigen::Index>(problem.dim()) * problem.dim()) {
    throw std::invalid_argument("mle_objective_gradient: parameters have wrong size");
  }
  return problem.evaluate_params(params.t, grad);
}

MleResult mle_reconstruct(const TomographyDataset& data, const std::optional<CholeskyParams>& init,
                          const MleOptions& options) {
  if (options.starts < 1 || options.starts > 3) throw std::invalid_argument("MleOptions: starts must be 1..3");
  if (options.max_iterations < 1) throw std::invalid_argument("MleOptions: max_iterations must be positive");
  const Problem problem(data, options.probability_floor);
  const int d = problem.dim();

  std::vector<RealVector> starts;
  if (init) {
    if (init->t.size() != static_cast<Eigen::Index>(d) * d) {
      throw std::invalid_argument("mle_reconstruct: initial parameters have wrong size");
    }
    starts.push_back(init->t);
  } else {
    const Matrix li = project_to_density(linear_inversion(stokes_from_dataset(data)));
    const Matrix mixed = (1.0 - kStartMixing) * li + kStartMixing * Matrix::Identity(d, d) / d;
    starts.push_back(params_from_density(mixed).t);
    if (options.starts >= 2) {
      RealVector t = RealVector::Zero(d * d);
      t.head(d).setOnes();
      starts.push_back(std::move(t));
    }
    if (options.starts >= 3) {
      Rng rng(options.seed, {0x4D4C45});
      RealVector t(d * d);
      for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = rng.normal();
      t.head(d) = t.head(d).cwiseAbs().array() + 0.1;
      starts.push_back(std::move(t));
    }
  }

  std::optional<Minimum> best;
  int best_start = 0;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    Minimum m = lbfgs(problem, starts[k], options);
    if (!best || m.value < best->value) {
      best = std::move(m);
      best_start = static_cast<int>(k);
    }
    // Nothing can beat a start that already fits the data to tolerance.
    if (best->value < options.tolerance) break;
  }
  if (!std::isfinite(best->value)) throw std::domain_error("mle_reconstruct: optimizer diverged");
  Matrix rho = density_from_params(CholeskyParams{best->t});
  rho = 0.5 * (rho + rho.adjoint());
  return MleResult{DensityMatrix(rho), best->value, best->iterations, best->capped, best_start};
}

}  // namespace eapt
