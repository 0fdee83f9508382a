#pragma once

#include <optional>

#include "releq/potentials.hpp"

namespace releq {

/// A central configuration: centered, on the inertia ellipsoid (I = 1) and
/// satisfying M^-1 grad U(q) + lambda q = 0 up to the solver tolerance.
struct CentralConfiguration {
    BodySystem sys;
    PotentialSpec spec;
    double lambda = 0.0;
    double omega = 0.0;          // sqrt(lambda)
    double residual_norm = 0.0;  // |M^-1 grad U + lambda q| at acceptance
    int iterations = 0;          // Newton steps taken (0 for verified inputs)
};

/// Regular n-gon of equal masses, scaled to I = 1, centered, first body on
/// the positive x-axis.  unit_masses selects m_i = 1 (true) or m_i = 1/n.
BodySystem ngon_configuration(int n, bool unit_masses = true);

/// Residual of the central-configuration equation with lambda taken from
/// lambda_multiplier on the same input.
Eigen::VectorXd cc_residual(const BodySystem& sys, const PotentialSpec& spec);

struct SolveOptions {
    int max_iter = 100;
    double tol_factor = 1e-11;  // accept when |residual| <= tol_factor * |grad U|
    int max_halvings = 40;
};

/// Damped Gauss-Newton on (q, lambda) with the ellipsoid, centering and
/// rotation-gauge rows appended to the residual.  The returned configuration
/// is re-normalized (centered, I = 1, first body rotated onto the positive
/// x-axis) and its invariants are re-checked post-hoc.
CentralConfiguration solve_central_config(const BodySystem& initial, const PotentialSpec& spec,
                                          const SolveOptions& opts = {});

/// Normalizes (center, scale to I = 1) and accepts the configuration as
/// central if its residual already meets the solver tolerance; throws
/// NoConvergence otherwise.  No Newton steps are taken.
CentralConfiguration verify_central_config(const BodySystem& sys, const PotentialSpec& spec,
                                           double tol_factor = 1e-11);

}  // namespace releq
