#pragma once

// n-qubit Pauli strings in the lexicographic (I, X, Y, Z) basis.
//
// A string is indexed by m = sum_q code_q * 4^(n-1-q) with codes I=0, X=1,
// Y=2, Z=3; qubit 0 is the most significant tensor factor. Every Pauli string
// is a phased permutation: P|j> = i^{#Y} (-1)^{popcount(j & z)} |j ^ x>, which
// lets expectation values and assembly run in O(d) per string.

#include "eapt/linalg.hpp"

#include <cstdint>
#include <string>

namespace eapt {

struct PauliString {
  int qubits = 0;
  std::uint32_t x_mask = 0;
  std::uint32_t z_mask = 0;
  int y_count = 0;

  static PauliString from_index(std::uint32_t index, int qubits);
  static PauliString from_label(const std::string& label);

  /// Matrix element P(j ^ x_mask, j).
  Complex phase(std::uint32_t column) const;
  std::string label() const;
};

/// Number of strings on n qubits (4^n).
inline std::uint32_t pauli_count(int qubits) { return std::uint32_t{1} << (2 * qubits); }

Matrix pauli_matrix(const PauliString& p);
inline Matrix pauli_matrix(std::uint32_t index, int qubits) {
  return pauli_matrix(PauliString::from_index(index, qubits));
}

/// Tr(P rho).
Complex pauli_expectation(const Matrix& rho, const PauliString& p);

/// out += coeff * P
void add_pauli(Matrix& out, const PauliString& p, Complex coeff);

/// Single-qubit Pauli sigma_k, k in 0..3.
Matrix pauli_1q(int k);

}  // namespace eapt
