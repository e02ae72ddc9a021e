#include "eapt/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace eapt {

PauliString PauliString::from_index(std::uint32_t index, int qubits) {
  if (qubits < 1 || qubits > 12) throw std::out_of_range("PauliString: qubit count out of range");
  if (index >= pauli_count(qubits)) throw std::out_of_range("PauliString: index out of range");
  PauliString p;
  p.qubits = qubits;
  for (int q = 0; q < qubits; ++q) {
    const int code = static_cast<int>((index >> (2 * (qubits - 1 - q))) & 3u);
    const std::uint32_t bit = std::uint32_t{1} << (qubits - 1 - q);
    if (code == 1 || code == 2) p.x_mask |= bit;
    if (code == 2 || code == 3) p.z_mask |= bit;
    if (code == 2) ++p.y_count;
  }
  return p;
}

PauliString PauliString::from_label(const std::string& label) {
  std::uint32_t index = 0;
  for (char c : label) {
    index <<= 2;
    switch (c) {
      case 'I': break;
      case 'X': index |= 1; break;
      case 'Y': index |= 2; break;
      case 'Z': index |= 3; break;
      default: throw std::invalid_argument("PauliString: bad label character");
    }
  }
  return from_index(index, static_cast<int>(label.size()));
}

Complex PauliString::phase(std::uint32_t column) const {
  static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Complex ph = kIPow[y_count & 3];
  if (std::popcount(column & z_mask) & 1) ph = -ph;
  return ph;
}

std::string PauliString::label() const {
  std::string out;
  for (int q = 0; q < qubits; ++q) {
    const std::uint32_t bit = std::uint32_t{1} << (qubits - 1 - q);
    const bool x = x_mask & bit, z = z_mask & bit;
    out += x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }
  return out;
}

Matrix pauli_matrix(const PauliString& p) {
  const Eigen::Index d = Eigen::Index{1} << p.qubits;
  Matrix m = Matrix::Zero(d, d);
  add_pauli(m, p, 1.0);
  return m;
}

Complex pauli_expectation(const Matrix& rho, const PauliString& p) {
  const std::uint32_t d = std::uint32_t{1} << p.qubits;
  Complex acc = 0.0;
  for (std::uint32_t j = 0; j < d; ++j) acc += p.phase(j) * rho(j, j ^ p.x_mask);
  return acc;
}

void add_pauli(Matrix& out, const PauliString& p, Complex coeff) {
  const std::uint32_t d = std::uint32_t{1} << p.qubits;
  for (std::uint32_t j = 0; j < d; ++j) out(j ^ p.x_mask, j) += coeff * p.phase(j);
}

Matrix pauli_1q(int k) { return pauli_matrix(static_cast<std::uint32_t>(k), 1); }

}  // namespace eapt
