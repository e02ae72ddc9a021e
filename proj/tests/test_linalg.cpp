#include "eapt/linalg.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace eapt;
using namespace eapt::testing;

TEST_CASE("tensor of Pauli X and identity") {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const Matrix out = tensor(x, Matrix::Identity(2, 2).eval());
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 2) = expected(1, 3) = expected(2, 0) = expected(3, 1) = 1.0;
  CHECK(max_abs(out - expected) == 0.0);
}

TEST_CASE("tensor matches index-loop Kronecker product on random inputs") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index ra = 1 + trial % 3, ca = 1 + (trial / 3) % 3, rb = 1 + trial % 4, cb = 2;
    const Matrix a = gaussian_matrix(ra, ca, rng), b = gaussian_matrix(rb, cb, rng);
    CHECK(max_abs(tensor(a, b) - kron(a, b)) < 1e-14);
  }
}

TEST_CASE("tensor is associative and mixed-product compatible") {
  Rng rng(12);
  const Matrix a = gaussian_matrix(2, 2, rng), b = gaussian_matrix(2, 2, rng), c = gaussian_matrix(2, 2, rng);
  const Matrix d = gaussian_matrix(2, 2, rng), e = gaussian_matrix(2, 2, rng);
  CHECK(max_abs(tensor(tensor(a, b), c) - tensor(a, tensor(b, c))) < 1e-12);
  CHECK(max_abs(tensor(a, b) * tensor(d, e) - tensor(Matrix(a * d), Matrix(b * e))) < 1e-12);
  CHECK(max_abs(tensor_all<Complex>({a, b, c}) - tensor(tensor(a, b), c)) < 1e-12);
}

TEST_CASE("tensor rejects empty operands and oversized products") {
  const Matrix empty(0, 0);
  CHECK_THROWS_AS(tensor(empty, Matrix::Identity(2, 2).eval()), std::invalid_argument);
  const Matrix big = Matrix::Identity(128, 128);
  CHECK_THROWS_AS(tensor(big, big), std::length_error);
}

TEST_CASE("partial trace of a product state returns the factor") {
  Rng rng(13);
  const Matrix a = random_density(2, 2, rng), b = random_density(4, 2, rng);
  const Matrix ab = tensor(a, b);
  CHECK(max_abs(partial_trace(ab, {2, 4}, {0}) - a) < 1e-12);
  CHECK(max_abs(partial_trace(ab, {2, 4}, {1}) - b) < 1e-12);
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = std::sqrt(0.5);
  const Matrix rho = phi * phi.adjoint();
  CHECK(max_abs(partial_trace(rho, {2, 2}, {0}) - Matrix::Identity(2, 2) / 2.0) < 1e-15);
}

TEST_CASE("partial trace matches double-sum oracle and preserves trace") {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = random_density(8, 3, rng);
    CHECK(max_abs(partial_trace(rho, {2, 4}, {0}) - trace_second(rho, 2, 4)) < 1e-13);
    CHECK(max_abs(partial_trace(rho, {2, 4}, {1}) - trace_first(rho, 2, 4)) < 1e-13);
    CHECK(std::abs(partial_trace(rho, {2, 2, 2}, {1}).trace() - rho.trace()) < 1e-13);
    CHECK(std::abs(partial_trace(rho, {2, 2, 2}, {})(0, 0) - rho.trace()) < 1e-13);
    // Tracing qubit 2 then qubit 1 equals keeping qubit 0 directly.
    const Matrix two = partial_trace(rho, {2, 2, 2}, {0, 1});
    CHECK(max_abs(partial_trace(two, {2, 2}, {0}) - partial_trace(rho, {2, 2, 2}, {0})) < 1e-13);
  }
}

TEST_CASE("partial trace validates dimensions and indices") {
  const Matrix rho = Matrix::Identity(8, 8) / 8.0;
  CHECK_THROWS_AS(partial_trace(rho, {2, 2}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(rho, {2, 4}, {2}), std::out_of_range);
  CHECK_THROWS_AS(partial_trace(rho, {2, 4}, {0, 0}), std::invalid_argument);
}

TEST_CASE("eig_hermitian reconstructs and orders eigenvalues") {
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix g = gaussian_matrix(6, 6, rng);
    const Matrix h = g + g.adjoint();
    const auto eig = eig_hermitian(h);
    CHECK(max_abs(eig.reconstruct() - h) < 1e-10 * h.norm());
    for (Eigen::Index i = 1; i < eig.eigenvalues.size(); ++i) CHECK(eig.eigenvalues(i) >= eig.eigenvalues(i - 1));
    CHECK(max_abs(eig.eigenvectors.adjoint() * eig.eigenvectors - Matrix::Identity(6, 6)) < 1e-12);
  }
  Matrix y(2, 2);
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  const auto ey = eig_hermitian(y);
  CHECK(ey.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(ey.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
  Matrix m(2, 2);
  m << 1, 1, 0, 1;
  CHECK_THROWS_AS(eig_hermitian(m), std::invalid_argument);
}

TEST_CASE("sqrt_psd squares back and rejects negative spectra") {
  Rng rng(16);
  const Matrix rho = random_density(4, 4, rng);
  const Matrix r = sqrt_psd(rho);
  CHECK(max_abs(r * r - rho) < 1e-12);
  CHECK(max_abs(sqrt_psd(Matrix(Matrix::Identity(3, 3))) - Matrix::Identity(3, 3)) < 1e-14);
  Matrix neg = Matrix::Identity(2, 2);
  neg(1, 1) = -0.1;
  CHECK_THROWS_AS(sqrt_psd(neg), std::domain_error);
}

TEST_CASE("project_to_density clips and renormalizes") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  const Matrix p = project_to_density(m);
  CHECK(std::abs(p(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(p(1, 1)) < 1e-14);
}

TEST_CASE("distances between states") {
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 0) = 1;
  b(1, 1) = 1;
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  CHECK(frobenius_distance(a, b) == doctest::Approx(std::sqrt(2.0)));
  CHECK(qubit_count_for_dimension(8) == 3);
  CHECK(qubit_count_for_dimension(6) == -1);
}
