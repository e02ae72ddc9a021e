#include "eapt/channels.hpp"
#include "eapt/pauli.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace eapt;
using namespace eapt::testing;

namespace {

Matrix bell_projector() {
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = std::sqrt(0.5);
  return phi * phi.adjoint();
}

KrausChannel random_channel(int qubits, int rank, Rng& rng) {
  return KrausChannel(random_kraus(Eigen::Index{1} << qubits, rank, rng));
}

}  // namespace

TEST_CASE("DensityMatrix validates its invariants") {
  CHECK_NOTHROW(DensityMatrix(Matrix::Identity(2, 2) / 2.0));
  CHECK_THROWS_AS(DensityMatrix(Matrix::Identity(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix(Matrix::Identity(3, 3) / 3.0), std::invalid_argument);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  CHECK_THROWS_AS(DensityMatrix{neg}, std::invalid_argument);
  Matrix nonherm = Matrix::Identity(2, 2) / 2.0;
  nonherm(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{nonherm}, std::invalid_argument);
  CHECK(DensityMatrix::basis_state(2, 3).matrix()(3, 3) == Complex(1.0));
  CHECK(DensityMatrix::maximally_mixed(3).qubits() == 3);
}

TEST_CASE("KrausChannel requires trace preservation unless flagged") {
  CHECK_THROWS_AS(KrausChannel({Matrix::Identity(2, 2) * 0.5}), std::invalid_argument);
  const auto sub = KrausChannel::from_operators({Matrix::Identity(2, 2) * 0.5}, 1e-6);
  CHECK_FALSE(sub.is_trace_preserving());
  CHECK(sub.trace_preservation_error() == doctest::Approx(0.75));
}

TEST_CASE("channel actions on known inputs") {
  Rng rng(31);
  const Matrix rho = random_density(2, 2, rng);
  CHECK(max_abs(apply_channel(KrausChannel::identity(1), DensityMatrix(rho)).matrix() - rho) < 1e-15);
  CHECK(max_abs(apply_channel(make_depolarizing(1.0, 1), DensityMatrix(rho)).matrix() - Matrix::Identity(2, 2) / 2.0) <
        1e-14);
  const Matrix damped = apply_channel(make_amplitude_damping(0.3), DensityMatrix::basis_state(1, 1)).matrix();
  CHECK(std::abs(damped(0, 0) - 0.3) < 1e-15);
  CHECK(std::abs(damped(1, 1) - 0.7) < 1e-15);
  CHECK(max_abs(make_depolarizing(0.0, 2).apply(tensor(rho, rho)) - tensor(rho, rho)) < 1e-15);
}

TEST_CASE("dephasing scales coherences by 1 - lambda") {
  Matrix plus = Matrix::Constant(2, 2, 0.5);
  const Matrix out = make_dephasing(0.4).apply(plus);
  CHECK(std::abs(out(0, 1) - 0.5 * 0.6) < 1e-15);
  CHECK(std::abs(out(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(make_dephasing(1.0).apply(plus)(0, 1)) < 1e-15);
}

TEST_CASE("two-qubit depolarizing on a Bell state has top eigenvalue 1 - p + p/4") {
  const double p = 0.0119;
  const Matrix out = make_depolarizing(p, 2).apply(bell_projector());
  const auto eig = eig_hermitian(out);
  CHECK(std::abs(out.trace() - 1.0) < 1e-14);
  CHECK(eig.eigenvalues(3) == doctest::Approx(1 - p + p / 4).epsilon(1e-13));
}

TEST_CASE("depolarizing channel matches its mixture definition") {
  Rng rng(32);
  for (double p : {0.0, 0.1, 0.37, 1.0}) {
    const Matrix rho = random_density(4, 3, rng);
    const Matrix expected = (1 - p) * rho + p * Matrix::Identity(4, 4) / 4.0;
    CHECK(max_abs(make_depolarizing(p, 2).apply(rho) - expected) < 1e-14);
  }
  CHECK_THROWS_AS(make_depolarizing(1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_amplitude_damping(-0.1), std::invalid_argument);
}

TEST_CASE("Choi states of identity and full depolarization") {
  CHECK(max_abs(choi_from_channel(KrausChannel::identity(1)).matrix() - bell_projector()) < 1e-15);
  CHECK(max_abs(choi_from_channel(make_depolarizing(1.0, 1)).matrix() - Matrix::Identity(4, 4) / 4.0) < 1e-15);
}

TEST_CASE("Choi state matches the vectorization oracle") {
  Rng rng(33);
  for (int n = 1; n <= 2; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const KrausChannel ch = random_channel(n, 1 + trial, rng);
      CHECK(max_abs(choi_from_channel(ch).matrix() - choi_by_vec(ch.operators())) < 1e-13);
    }
  }
}

TEST_CASE("Choi round trip through Kraus extraction") {
  Rng rng(34);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 4; ++trial) {
      const KrausChannel ch = random_channel(n, 1 + trial, rng);
      const ChoiState choi = choi_from_channel(ch);
      const KrausChannel back = channel_from_choi(choi);
      CHECK(back.is_trace_preserving());
      CHECK(static_cast<int>(back.operators().size()) == std::min(1 + trial, 1 << (2 * n)));
      CHECK(max_abs(choi_from_channel(back).matrix() - choi.matrix()) < 1e-9);
      // Same action on a random input, which also pins the reshape orientation.
      const Matrix rho = random_density(Eigen::Index{1} << n, 2, rng);
      CHECK(max_abs(back.apply(rho) - ch.apply(rho)) < 1e-9);
    }
  }
}

TEST_CASE("Kraus extraction from the identity and maximally mixed Choi states") {
  const KrausChannel id = channel_from_choi(choi_from_channel(KrausChannel::identity(1)));
  REQUIRE(id.operators().size() == 1);
  const Matrix a = id.operators()[0];
  CHECK(max_abs(a - a(0, 0) * Matrix::Identity(2, 2)) < 1e-12);
  CHECK(std::abs(std::abs(a(0, 0)) - 1.0) < 1e-12);

  const KrausChannel full = channel_from_choi(ChoiState(1, DensityMatrix(Matrix::Identity(4, 4) / 4.0)));
  CHECK(full.operators().size() == 4);
  for (std::uint32_t m = 0; m < 4; ++m) {
    CHECK(max_abs(full.apply(pauli_matrix(m, 1)) - (m == 0 ? Matrix(Matrix::Identity(2, 2)) : Matrix::Zero(2, 2))) <
          1e-12);
  }
}

TEST_CASE("a non trace-preserving Choi state yields a flagged channel") {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1.0;  // |00><00|: maps |0> -> |0>, annihilates |1>
  const KrausChannel ch = channel_from_choi(ChoiState(1, DensityMatrix(m)));
  CHECK_FALSE(ch.is_trace_preserving());
  CHECK(ChoiState(1, DensityMatrix(m)).trace_preservation_error() == doctest::Approx(0.5));
}

TEST_CASE("chi matrix of identity and X") {
  const Matrix chi_id = chi_from_channel(KrausChannel::identity(1)).coefficients();
  CHECK(std::abs(chi_id(0, 0) - 1.0) < 1e-15);
  CHECK(chi_id.cwiseAbs().sum() == doctest::Approx(1.0));
  const Matrix chi_x = chi_from_channel(KrausChannel::unitary(pauli_1q(1))).coefficients();
  CHECK(std::abs(chi_x(1, 1) - 1.0) < 1e-15);
  CHECK(chi_x.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("chi matrix reproduces the channel on every Pauli input") {
  Rng rng(35);
  for (int n = 1; n <= 2; ++n) {
    const KrausChannel ch = random_channel(n, 3, rng);
    const ChiMatrix chi = chi_from_channel(ch);
    CHECK(hermiticity_error(chi.coefficients()) < 1e-14);
    for (std::uint32_t m = 0; m < pauli_count(n); ++m) {
      const Matrix p = pauli_matrix(m, n);
      Matrix direct = Matrix::Zero(p.rows(), p.cols());
      for (std::uint32_t a = 0; a < pauli_count(n); ++a)
        for (std::uint32_t b = 0; b < pauli_count(n); ++b)
          direct += chi.coefficients()(a, b) * pauli_matrix(a, n) * p * pauli_matrix(b, n).adjoint();
      CHECK(max_abs(direct - ch.apply(p)) < 1e-9);
      CHECK(max_abs(chi.apply(p) - ch.apply(p)) < 1e-9);
    }
    const KrausChannel back = channel_from_chi(chi);
    CHECK(max_abs(choi_from_channel(back).matrix() - choi_from_channel(ch).matrix()) < 1e-9);
  }
}

TEST_CASE("readout confusion matrices") {
  const ReadoutModel r = make_readout_confusion({0.037, 0.0});
  CHECK(r.confusion[0](0, 0) == doctest::Approx(0.963));
  CHECK(r.confusion[0](0, 1) == doctest::Approx(0.037));
  CHECK(r.confusion[0](1, 0) == doctest::Approx(0.037));
  CHECK(r.confusion[1] == Eigen::Matrix2d::Identity());
  CHECK(make_readout_confusion({0.0, 0.0}).is_identity());
  CHECK_FALSE(r.is_identity());
  CHECK_THROWS_AS(make_readout_confusion({0.6}), std::invalid_argument);
}

TEST_CASE("noise model rate lookup and validation") {
  NoiseModel noise;
  noise.two_qubit_depolarizing = 0.02;
  noise.two_qubit_overrides[{0, 2}] = 0.05;
  noise.single_qubit_overrides[1] = 0.003;
  CHECK(noise.two_qubit_rate(2, 0) == 0.05);
  CHECK(noise.two_qubit_rate(0, 1) == 0.02);
  CHECK(noise.single_qubit_rate(1) == 0.003);
  CHECK(noise.single_qubit_rate(0) == 0.0);
  CHECK(noise.has_gate_noise());
  noise.dephasing = 1.5;
  CHECK_THROWS_AS(noise.validate(), std::invalid_argument);
}

TEST_CASE("local operator embedding agrees with explicit Kronecker products") {
  Rng rng(36);
  const Matrix u = random_unitary(2, rng);
  const Matrix v = random_unitary(4, rng);
  const Matrix i2 = Matrix::Identity(2, 2);
  const std::vector<int> q1{1};
  CHECK(max_abs(embed_operator(u, q1, 3) - kron(kron(i2, u), i2)) < 1e-14);
  const std::vector<int> q01{0, 1};
  CHECK(max_abs(embed_operator(v, q01, 3) - kron(v, i2)) < 1e-14);
  // Reversed target order swaps the operator's tensor factors.
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
  const std::vector<int> q10{1, 0};
  CHECK(max_abs(embed_operator(v, q10, 2) - swap * v * swap) < 1e-14);

  const Matrix rho = random_density(8, 3, rng);
  Matrix local = rho;
  const std::vector<int> q20{2, 0};
  apply_local(local, v, q20, 3);
  const Matrix full = embed_operator(v, q20, 3);
  CHECK(max_abs(local - full * rho * full.adjoint()) < 1e-13);
}
