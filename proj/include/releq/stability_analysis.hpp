#pragma once

#include <string>

#include "releq/symplectic_reduction.hpp"

namespace releq {

/// Stability classification of the essential block L3.
struct StabilityVerdict {
    std::vector<Complex> essential_spectrum;  // 4n-8 eigenvalues of L3
    bool degenerate = false;                  // 0 in sigma(L3)
    bool spectrally_stable = false;           // sigma(L3) within tau_im of iR
    bool diagonalizable_L3 = false;
    bool linearly_stable = false;             // spectrally stable and diagonalizable
    double max_real_part = 0.0;               // max |Re lambda| over sigma(L3)
    std::string evidence;                     // which test decided the verdict
};

StabilityVerdict classify(const ReducedBlocks& blocks);

/// Both sides of the sum-of-squares trace identity:
/// alpha case   sum lambda_i^2 = 2 a^2 sum (m_i+m_j)/r^(a+2) - 4 n a U_a
/// log case     sum lambda_i^2 = -4 n M.
/// Also checks the first-eight identity sum_{i<=8} lambda_i^2 = (2a-8) w^2
/// against the actual sigma(L1) + sigma(L2).
struct SumSquaresReport {
    double spectral_sum = 0.0;   // Re sum of lambda^2 over sigma(L)
    double trace_formula = 0.0;  // closed form from the Hessian trace
    double rel_error = 0.0;
    double first8_spectral = 0.0;
    double first8_formula = 0.0;  // (2a-8) w^2 = 2a(a-4) U_a; alpha case only
    double first8_rel_error = 0.0;
};

SumSquaresReport sum_of_squares_check(const CentralConfiguration& cc,
                                      const LinearizedSystem& lin,
                                      const ReducedBlocks& blocks);

/// Trace-based instability test (alpha-homogeneous only):
/// sum (m_i+m_j)/r^(a+2) > (2n+a-4)/a * U_a(x) with relative margin 1e-9.
struct InequalityReport {
    enum class Verdict { UnstableByTrace, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // (lhs - rhs) / max(|rhs|, tiny)
    /// Set by the caller when 0 is in sigma(L3): the underlying corollary
    /// excludes the completely degenerate case.
    bool degeneracy_caveat = false;
};

InequalityReport instability_inequality(const CentralConfiguration& cc,
                                        bool degeneracy_caveat = false);

/// Closed-form n-gon threshold  abar(n) = 2 pi^2 (n^2-3n+2)/(n^3 - pi^2 n + pi^2);
/// meaningful (i.e. < 2) exactly for n >= 8.
struct AlphaThreshold {
    double value = 0.0;
    bool meaningful = false;
};

AlphaThreshold ngon_alpha_threshold(int n);

/// Growth probe sup_m |S^m| for a symplectic matrix (bounded iff linearly
/// stable).  Growth beyond 10x the initial norm flags instability.
struct GrowthReport {
    double initial_norm = 0.0;
    double max_norm = 0.0;
    int m_max = 0;
    bool bounded = false;
};

GrowthReport bounded_powers_probe(const Eigen::MatrixXd& symplectic, int m_max);

/// Checks the reduced eigenvalue polynomial
///   P(lambda) = M^-1 D2U + (w^2 - lambda^2) I + 2 lambda w K:
/// det P, as a polynomial in mu = lambda^2, is monic of degree 2n with
/// second coefficient 2 n w^2 - tr[M^-1 D2U]; and det P vanishes on sigma(L).
struct EigenpolyReport {
    double leading_coeff = 0.0;
    double second_coeff = 0.0;
    double expected_second = 0.0;
    double rel_error = 0.0;           // on the top two coefficients
    double max_scaled_det = 0.0;      // max |det P(lambda)| / hadamard over sigma(L)
};

EigenpolyReport reduced_eigenpoly_check(const CentralConfiguration& cc,
                                        const LinearizedSystem& lin);

/// sum_{i<j} (m_i + m_j) / r_ij^(alpha+2) -- shared by the trace identities.
double pair_mass_distance_sum(const BodySystem& sys, double alpha);

}  // namespace releq
