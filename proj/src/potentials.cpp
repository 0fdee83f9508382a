#include "releq/potentials.hpp"

#include <cmath>

namespace releq {

PotentialSpec PotentialSpec::alpha_homogeneous(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw InvalidArgument("alpha must lie strictly inside (0, 2), got " +
                              std::to_string(alpha));
    return PotentialSpec(PotentialKind::AlphaHomogeneous, alpha);
}

PotentialSpec PotentialSpec::logarithmic() {
    return PotentialSpec(PotentialKind::Logarithmic, 0.0);
}

double PotentialSpec::alpha() const {
    if (is_log())
        throw WrongPotential("logarithmic potential has no homogeneity exponent");
    return alpha_;
}

double total_mass_product(const BodySystem& sys) {
    double s = 0.0;
    for (int i = 0; i < sys.count(); ++i)
        for (int j = i + 1; j < sys.count(); ++j)
            s += sys.masses()[i] * sys.masses()[j];
    return s;
}

double collision_tolerance(const BodySystem& sys) {
    return 1e-9 * sys.diameter();
}

namespace {

void require_collision_free(const BodySystem& sys) {
    if (sys.min_pair_distance() <= collision_tolerance(sys))
        throw CollisionError("two bodies are closer than the collision tolerance");
}

}  // namespace

double eval_potential(const BodySystem& sys, const PotentialSpec& spec) {
    require_collision_free(sys);
    double u = 0.0;
    for (int i = 0; i < sys.count(); ++i) {
        for (int j = i + 1; j < sys.count(); ++j) {
            const double mm = sys.masses()[i] * sys.masses()[j];
            const double r = (sys.body(i) - sys.body(j)).norm();
            u += spec.is_log() ? -mm * std::log(r) : mm / std::pow(r, spec.alpha());
        }
    }
    return u;
}

Eigen::VectorXd grad_potential(const BodySystem& sys, const PotentialSpec& spec) {
    require_collision_free(sys);
    const int n = sys.count();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const Eigen::Vector2d d = sys.body(i) - sys.body(j);
            const double r = d.norm();
            const double mm = sys.masses()[i] * sys.masses()[j];
            // dU/dq_i = -a m_i m_j (q_i - q_j) / r^(a+2);  log case is a = 0
            // in the exponent with unit prefactor.
            const double coeff = spec.is_log()
                                     ? -mm / (r * r)
                                     : -spec.alpha() * mm / std::pow(r, spec.alpha() + 2.0);
            g.segment<2>(2 * i) += coeff * d;
            g.segment<2>(2 * j) -= coeff * d;
        }
    }
    return g;
}

Eigen::MatrixXd hess_potential(const BodySystem& sys, const PotentialSpec& spec) {
    require_collision_free(sys);
    const int n = sys.count();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const Eigen::Vector2d d = sys.body(i) - sys.body(j);
            const double r = d.norm();
            const Eigen::Vector2d u = d / r;
            const double mm = sys.masses()[i] * sys.masses()[j];
            Eigen::Matrix2d S;
            if (spec.is_log()) {
                S = mm / (r * r) *
                    (Eigen::Matrix2d::Identity() - 2.0 * u * u.transpose());
            } else {
                const double a = spec.alpha();
                S = a * mm / std::pow(r, a + 2.0) *
                    (Eigen::Matrix2d::Identity() - (a + 2.0) * u * u.transpose());
            }
            H.block<2, 2>(2 * i, 2 * j) = S;
            H.block<2, 2>(2 * j, 2 * i) = S;
            H.block<2, 2>(2 * i, 2 * i) -= S;
            H.block<2, 2>(2 * j, 2 * j) -= S;
        }
    }
    return H;
}

double lambda_multiplier(const BodySystem& sys, const PotentialSpec& spec) {
    require_collision_free(sys);
    const double inertia = moment_of_inertia(sys);
    return spec.is_log() ? total_mass_product(sys) / inertia
                         : spec.alpha() * eval_potential(sys, spec) / inertia;
}

double angular_velocity(const BodySystem& sys, const PotentialSpec& spec) {
    return std::sqrt(lambda_multiplier(sys, spec));
}

double restricted_hessian_quadform(const BodySystem& sys, const PotentialSpec& spec,
                                   const Eigen::VectorXd& v) {
    if (v.size() != 2 * sys.count())
        throw DimensionError("tangent vector must have size 2n");
    const double inertia = moment_of_inertia(sys);
    if (std::abs(inertia - 1.0) > 1e-8)
        throw NotOnEllipsoid("configuration must satisfy I(q) = 1, got I = " +
                             std::to_string(inertia));
    const Eigen::MatrixXd M = mass_matrix(sys.masses());
    const Eigen::VectorXd Mq = M * sys.positions();
    if (std::abs(Mq.dot(v)) > 1e-8 * Mq.norm() * v.norm())
        throw NotTangent("direction is not tangent to the inertia ellipsoid");

    const Eigen::MatrixXd H = hess_potential(sys, spec);
    const double weight = spec.is_log() ? total_mass_product(sys)
                                        : spec.alpha() * eval_potential(sys, spec);
    return v.dot(H * v) + weight * v.dot(M * v);
}

}  // namespace releq
