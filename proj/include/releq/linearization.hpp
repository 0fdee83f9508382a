#pragma once

#include "releq/central_config.hpp"

namespace releq {

/// Linearized rotating-frame Hamiltonian system at a relative equilibrium.
/// B is the symmetric 4n x 4n Hessian of the reduced Hamiltonian and
/// L = -J B the Hamiltonian matrix of the linear flow; Xi = omega K.
struct LinearizedSystem {
    Eigen::MatrixXd B;         // 4n x 4n symmetric
    Eigen::MatrixXd L;         // 4n x 4n Hamiltonian, L = -J B exactly
    Eigen::MatrixXd Xi;        // 2n x 2n, omega K
    Eigen::MatrixXd hessian;   // D2U(xbar), 2n x 2n (cached)
    Eigen::VectorXd momentum;  // ybar^T = -M Xi xbar
    double omega = 0.0;
    CentralConfiguration source;
};

LinearizedSystem build_linearization(const CentralConfiguration& cc);

/// Hessian of the augmented potential, D2U(xbar) + omega^2 M, with its
/// Morse index and nullity (zero threshold 1e-8 * max|eig|).
struct AugmentedHessian {
    Eigen::MatrixXd H;
    int morse_index = 0;
    int nullity = 0;
};

AugmentedHessian augmented_hessian(const CentralConfiguration& cc);

enum class ParityVerdict { UnstableSpectrally, UnstableLinearly, Inconclusive };

struct ParityReport {
    ParityVerdict verdict = ParityVerdict::Inconclusive;
    int morse_index = 0;
    int nullity = 0;
};

/// Parity rule: odd Morse index with even nullity implies spectral
/// instability; odd Morse index or odd nullity implies linear instability.
ParityReport parity_from_indices(int morse_index, int nullity);

/// Parity test on the full augmented Hessian of cc.
ParityReport parity_instability_test(const CentralConfiguration& cc);

}  // namespace releq
