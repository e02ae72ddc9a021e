#pragma once

// Fidelity measures between states and between a channel and a target unitary.

#include "eapt/channels.hpp"

namespace eapt {

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
double state_fidelity(const Matrix& rho, const Matrix& sigma);
double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
/// <psi| rho |psi> for a normalized pure reference.
double state_fidelity(const DensityMatrix& rho, const Vector& psi);

/// Entanglement fidelity sum_k |Tr(U^dagger A_k)|^2 / d^2.
double process_fidelity(const KrausChannel& actual, const Matrix& target);

/// Haar-averaged <psi|U^dagger E(psi) U|psi>. For trace-preserving channels
/// this equals (d F_pro + 1) / (d + 1); the general form used here,
/// (Tr sum_k A_k^dagger A_k + sum_k |Tr(U^dagger A_k)|^2) / (d (d + 1)),
/// also covers slightly sub-normalized reconstructions.
double average_gate_fidelity(const KrausChannel& actual, const Matrix& target);

/// Frobenius distance between the Choi states of two channels, or between a
/// Choi state and a unitary's Choi state.
double choi_distance(const ChoiState& a, const ChoiState& b);
double choi_distance(const ChoiState& a, const Matrix& unitary);

/// Throws std::invalid_argument unless U^dagger U = I within `tolerance`.
void require_unitary(const Matrix& u, double tolerance = 1e-10);

}  // namespace eapt
