#include "releq/central_config.hpp"

#include <cmath>
#include <numbers>

namespace releq {

namespace {

/// Shift to the weighted barycentre and rescale so that I(q) = 1.
Eigen::VectorXd normalize_positions(const BodySystem& sys) {
    const Eigen::Vector2d shift = sys.weighted_centroid() / sys.total_mass();
    Eigen::VectorXd q = sys.positions();
    for (int i = 0; i < sys.count(); ++i) q.segment<2>(2 * i) -= shift;
    const double inertia = moment_of_inertia(sys.with_positions(q));
    return q / std::sqrt(inertia);
}

/// Rotate the whole configuration so body 0 lands on the positive x-axis.
Eigen::VectorXd fix_rotation_gauge(const BodySystem& sys) {
    Eigen::VectorXd q = sys.positions();
    const Eigen::Vector2d first = q.segment<2>(0);
    if (first.norm() < 1e-14) return q;  // body at the origin: gauge undefined
    const double theta = std::atan2(first.y(), first.x());
    const double c = std::cos(-theta), s = std::sin(-theta);
    for (int i = 0; i < sys.count(); ++i) {
        const Eigen::Vector2d p = q.segment<2>(2 * i);
        q.segment<2>(2 * i) << c * p.x() - s * p.y(), s * p.x() + c * p.y();
    }
    return q;
}

/// Center/rescale (no rotation: callers that need the gauge apply it first)
/// and accept as central if the residual meets the tolerance.
CentralConfiguration accept(const BodySystem& sys, const PotentialSpec& spec,
                            double tol_factor) {
    BodySystem normalized = sys.with_positions(normalize_positions(sys));
    const Eigen::VectorXd grad = grad_potential(normalized, spec);
    const Eigen::VectorXd res = cc_residual(normalized, spec);
    const double tol = tol_factor * grad.norm();
    if (res.norm() > tol)
        throw NoConvergence(0, res.norm());
    if (std::abs(moment_of_inertia(normalized) - 1.0) > 1e-12)
        throw NoConvergence(0, std::abs(moment_of_inertia(normalized) - 1.0));
    if (!normalized.is_centered())
        throw NoConvergence(0, normalized.weighted_centroid().norm());
    CentralConfiguration cc{normalized, spec, lambda_multiplier(normalized, spec), 0.0,
                            res.norm(), 0};
    cc.omega = std::sqrt(cc.lambda);
    return cc;
}

}  // namespace

BodySystem ngon_configuration(int n, bool unit_masses) {
    if (n < 3)
        throw InvalidArgument("n-gon needs n >= 3 vertices");
    const double m = unit_masses ? 1.0 : 1.0 / n;
    std::vector<double> masses(n, m);
    Eigen::VectorXd q(2 * n);
    const double radius = 1.0 / std::sqrt(m * n);  // so that I = n m r^2 = 1
    for (int i = 0; i < n; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / n;
        q[2 * i] = radius * std::cos(angle);
        q[2 * i + 1] = radius * std::sin(angle);
    }
    return BodySystem(std::move(masses), std::move(q));
}

Eigen::VectorXd cc_residual(const BodySystem& sys, const PotentialSpec& spec) {
    const double lambda = lambda_multiplier(sys, spec);
    Eigen::VectorXd res = grad_potential(sys, spec);
    for (int i = 0; i < sys.count(); ++i) res.segment<2>(2 * i) /= sys.masses()[i];
    res += lambda * sys.positions();
    return res;
}

CentralConfiguration solve_central_config(const BodySystem& initial, const PotentialSpec& spec,
                                          const SolveOptions& opts) {
    const int n = initial.count();
    const int rows = 2 * n + 4;  // cc equation + ellipsoid + centering (2) + gauge

    Eigen::VectorXd q;
    try {
        q = normalize_positions(initial);
    } catch (const CollisionError&) {
        throw CollisionDuringIteration("initial configuration is within collision tolerance");
    }
    const Eigen::VectorXd gauge_dir = complex_structure_K(n) * q;  // K q0

    const Eigen::MatrixXd M = mass_matrix(initial.masses());
    const Eigen::VectorXd masses_x = [&] {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n);
        for (int i = 0; i < n; ++i) v[2 * i] = initial.masses()[i];
        return v;
    }();
    const Eigen::VectorXd masses_y = [&] {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n);
        for (int i = 0; i < n; ++i) v[2 * i + 1] = initial.masses()[i];
        return v;
    }();

    double lambda = 0.0;

    auto residual = [&](const Eigen::VectorXd& pos, double lam) -> Eigen::VectorXd {
        const BodySystem s = initial.with_positions(pos);
        Eigen::VectorXd grad = grad_potential(s, spec);
        Eigen::VectorXd F(rows);
        for (int i = 0; i < n; ++i)
            F.segment<2>(2 * i) = grad.segment<2>(2 * i) / initial.masses()[i];
        F.head(2 * n) += lam * pos;
        F[2 * n] = 0.5 * (moment_of_inertia(s) - 1.0);
        F[2 * n + 1] = masses_x.dot(pos);
        F[2 * n + 2] = masses_y.dot(pos);
        F[2 * n + 3] = gauge_dir.dot(pos);
        return F;
    };

    try {
        lambda = lambda_multiplier(initial.with_positions(q), spec);
        Eigen::VectorXd F = residual(q, lambda);

        for (int iter = 0; iter < opts.max_iter; ++iter) {
            const BodySystem current = initial.with_positions(q);
            const Eigen::VectorXd grad = grad_potential(current, spec);
            const double tol = opts.tol_factor * grad.norm();
            if (F.head(2 * n).norm() <= tol && F.tail(4).lpNorm<Eigen::Infinity>() <= tol) {
                const BodySystem gauged = current.with_positions(fix_rotation_gauge(current));
                CentralConfiguration cc = accept(gauged, spec, opts.tol_factor);
                cc.iterations = iter;
                return cc;
            }

            Eigen::MatrixXd Jac = Eigen::MatrixXd::Zero(rows, 2 * n + 1);
            const Eigen::MatrixXd H = hess_potential(current, spec);
            for (int i = 0; i < n; ++i)
                Jac.block(2 * i, 0, 2, 2 * n) = H.middleRows(2 * i, 2) / initial.masses()[i];
            Jac.topLeftCorner(2 * n, 2 * n) += lambda * Eigen::MatrixXd::Identity(2 * n, 2 * n);
            Jac.col(2 * n).head(2 * n) = q;
            Jac.row(2 * n).head(2 * n) = (M * q).transpose();
            Jac.row(2 * n + 1).head(2 * n) = masses_x.transpose();
            Jac.row(2 * n + 2).head(2 * n) = masses_y.transpose();
            Jac.row(2 * n + 3).head(2 * n) = gauge_dir.transpose();

            const Eigen::VectorXd step = Jac.colPivHouseholderQr().solve(-F);

            // Backtracking: halve until the residual decreases.
            double t = 1.0;
            bool accepted = false;
            for (int k = 0; k < opts.max_halvings; ++k, t *= 0.5) {
                const Eigen::VectorXd q_try = q + t * step.head(2 * n);
                const double lam_try = lambda + t * step[2 * n];
                const BodySystem trial = initial.with_positions(q_try);
                if (trial.min_pair_distance() <= collision_tolerance(trial)) continue;
                const Eigen::VectorXd F_try = residual(q_try, lam_try);
                if (F_try.norm() < F.norm()) {
                    q = q_try;
                    lambda = lam_try;
                    F = F_try;
                    accepted = true;
                    break;
                }
            }
            if (!accepted)
                throw NoConvergence(iter, F.norm());
        }
    } catch (const CollisionError&) {
        throw CollisionDuringIteration("bodies collided while iterating");
    }
    throw NoConvergence(opts.max_iter, residual(q, lambda).norm());
}

CentralConfiguration verify_central_config(const BodySystem& sys, const PotentialSpec& spec,
                                           double tol_factor) {
    return accept(sys, spec, tol_factor);
}

}  // namespace releq
