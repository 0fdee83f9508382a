#pragma once

#include "releq/core_model.hpp"

namespace releq {

enum class PotentialKind { AlphaHomogeneous, Logarithmic };

/// Interaction law: either U_alpha(q) = sum m_i m_j / |q_i - q_j|^alpha with
/// alpha in (0,2), or U_log(q) = -sum m_i m_j log|q_i - q_j|.
class PotentialSpec {
public:
    static PotentialSpec alpha_homogeneous(double alpha);
    static PotentialSpec logarithmic();

    PotentialKind kind() const { return kind_; }
    bool is_log() const { return kind_ == PotentialKind::Logarithmic; }

    /// Homogeneity exponent; throws WrongPotential for the logarithmic law.
    double alpha() const;

private:
    PotentialSpec(PotentialKind k, double a) : kind_(k), alpha_(a) {}
    PotentialKind kind_;
    double alpha_;
};

/// Total mass product  sum_{i<j} m_i m_j.
double total_mass_product(const BodySystem& sys);

/// Collision guard: pairwise distances below 1e-9 * diameter are refused.
double collision_tolerance(const BodySystem& sys);

double eval_potential(const BodySystem& sys, const PotentialSpec& spec);

/// Gradient of U; satisfies <grad U_a, q> = -a U_a and <grad U_log, q> = -M.
Eigen::VectorXd grad_potential(const BodySystem& sys, const PotentialSpec& spec);

/// 2n x 2n Hessian of U assembled from the pairwise 2x2 blocks
///   S_ij = a m_i m_j / r^(a+2) [I - (a+2) u u^T]      (alpha case)
///   S_ij = m_i m_j / r^2 [I - 2 u u^T]                (log case)
/// with S_ii = -sum_{j != i} S_ij, so both block row-sums vanish.
Eigen::MatrixXd hess_potential(const BodySystem& sys, const PotentialSpec& spec);

/// Lagrange multiplier of the central-configuration equation:
/// lambda_a = a U_a(q) / I(q), lambda_log = M / I(q).  Always positive.
double lambda_multiplier(const BodySystem& sys, const PotentialSpec& spec);

/// omega = sqrt(lambda).
double angular_velocity(const BodySystem& sys, const PotentialSpec& spec);

/// Quadratic form of the Hessian of U restricted to the inertia ellipsoid,
/// evaluated on a tangent direction v:
///   <D2U v, v> + a U <Mv, v>    (alpha)      <D2U v, v> + M <Mv, v>  (log).
/// Requires I(q) = 1 and <Mq, v> = 0 up to tolerance.
double restricted_hessian_quadform(const BodySystem& sys, const PotentialSpec& spec,
                                   const Eigen::VectorXd& v);

}  // namespace releq
