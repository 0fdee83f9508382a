#include "releq/stability_analysis.hpp"

#include <cmath>
#include <numbers>

namespace releq {

namespace {

constexpr double kImagTolRel = 1e-7;  // |Re lambda| threshold for "pure imaginary"
constexpr double kRankTolRel = 1e-9;

int kernel_dimension(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    if (smax <= 1e-300) return static_cast<int>(m.cols());
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > kRankTolRel * smax) ++rank;
    return static_cast<int>(m.cols()) - rank;
}

double hadamard_bound(const Eigen::MatrixXcd& m) {
    double b = 1.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) b *= m.row(i).norm();
    return b;
}

}  // namespace

StabilityVerdict classify(const ReducedBlocks& blocks) {
    StabilityVerdict verdict;
    verdict.essential_spectrum = eigenvalues_of(blocks.L3);
    const double rho = std::max(1.0, spectral_radius(verdict.essential_spectrum));
    const double im_tol = kImagTolRel * rho;

    verdict.max_real_part = 0.0;
    bool zero_present = false;
    for (const Complex& z : verdict.essential_spectrum) {
        verdict.max_real_part = std::max(verdict.max_real_part, std::abs(z.real()));
        if (std::abs(z) <= im_tol) zero_present = true;
    }
    verdict.degenerate = zero_present;
    verdict.spectrally_stable = verdict.max_real_part <= im_tol;

    // Diagonalizable iff every cluster has geometric multiplicity equal to
    // its algebraic one.
    verdict.diagonalizable_L3 = true;
    const Eigen::MatrixXcd L3c = blocks.L3.cast<Complex>();
    const auto clusters = cluster_eigenvalues(verdict.essential_spectrum, im_tol);
    for (const auto& cluster : clusters) {
        const Eigen::MatrixXcd shifted =
            L3c - cluster.mean * Eigen::MatrixXcd::Identity(L3c.rows(), L3c.cols());
        if (kernel_dimension(shifted) != cluster.multiplicity) {
            verdict.diagonalizable_L3 = false;
            break;
        }
    }
    verdict.linearly_stable = verdict.spectrally_stable && verdict.diagonalizable_L3;
    verdict.evidence = "direct spectrum of L3";
    return verdict;
}

double pair_mass_distance_sum(const BodySystem& sys, double alpha) {
    double s = 0.0;
    for (int i = 0; i < sys.count(); ++i)
        for (int j = i + 1; j < sys.count(); ++j) {
            const double r = (sys.body(i) - sys.body(j)).norm();
            s += (sys.masses()[i] + sys.masses()[j]) / std::pow(r, alpha + 2.0);
        }
    return s;
}

SumSquaresReport sum_of_squares_check(const CentralConfiguration& cc,
                                      const LinearizedSystem& lin,
                                      const ReducedBlocks& blocks) {
    SumSquaresReport report;
    const int n = cc.sys.count();

    Complex sum = 0.0;
    for (const Complex& z : eigenvalues_of(lin.L)) sum += z * z;
    report.spectral_sum = sum.real();

    if (cc.spec.is_log()) {
        report.trace_formula = -4.0 * n * total_mass_product(cc.sys);
    } else {
        const double a = cc.spec.alpha();
        report.trace_formula = 2.0 * a * a * pair_mass_distance_sum(cc.sys, a) -
                               4.0 * n * a * eval_potential(cc.sys, cc.spec);
    }
    report.rel_error = std::abs(report.spectral_sum - report.trace_formula) /
                       std::max(std::abs(report.trace_formula), 1e-300);

    Complex first8 = 0.0;
    for (const Complex& z : eigenvalues_of(blocks.L1)) first8 += z * z;
    for (const Complex& z : eigenvalues_of(blocks.L2)) first8 += z * z;
    report.first8_spectral = first8.real();
    // L1 contributes -4 w^2; L2 contributes -2(2-a) w^2 (a = 0 in the log case).
    const double a8 = cc.spec.is_log() ? 0.0 : cc.spec.alpha();
    report.first8_formula = (2.0 * a8 - 8.0) * cc.omega * cc.omega;
    report.first8_rel_error = std::abs(report.first8_spectral - report.first8_formula) /
                              std::max(std::abs(report.first8_formula), 1e-300);
    return report;
}

InequalityReport instability_inequality(const CentralConfiguration& cc,
                                        bool degeneracy_caveat) {
    if (cc.spec.is_log())
        throw WrongPotential("the trace inequality exists only for the alpha-homogeneous law");
    const double a = cc.spec.alpha();
    InequalityReport report;
    report.degeneracy_caveat = degeneracy_caveat;
    report.lhs = pair_mass_distance_sum(cc.sys, a);
    report.rhs = (2.0 * cc.sys.count() + a - 4.0) / a * eval_potential(cc.sys, cc.spec);
    report.margin = (report.lhs - report.rhs) / std::max(std::abs(report.rhs), 1e-300);
    report.verdict = report.margin > 1e-9 ? InequalityReport::Verdict::UnstableByTrace
                                          : InequalityReport::Verdict::Inconclusive;
    return report;
}

AlphaThreshold ngon_alpha_threshold(int n) {
    if (n < 3)
        throw InvalidArgument("n-gon threshold needs n >= 3");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double nn = n;
    AlphaThreshold t;
    t.value = 2.0 * pi2 * (nn * nn - 3.0 * nn + 2.0) / (nn * nn * nn - pi2 * nn + pi2);
    t.meaningful = t.value < 2.0;
    return t;
}

GrowthReport bounded_powers_probe(const Eigen::MatrixXd& symplectic, int m_max) {
    const auto d = symplectic.rows();
    if (d != symplectic.cols() || d % 2 != 0)
        throw DimensionError("symplectic matrix must be square of even size");
    const Eigen::MatrixXd J = standard_J(static_cast<int>(d));
    if ((symplectic.transpose() * J * symplectic - J).norm() > 1e-10 * std::max(J.norm(), 1.0))
        throw NotSymplectic("matrix fails S^T J S = J to 1e-10");

    GrowthReport report;
    report.m_max = m_max;
    report.initial_norm = symplectic.jacobiSvd().singularValues()[0];
    report.max_norm = report.initial_norm;
    Eigen::MatrixXd power = symplectic;
    for (int m = 2; m <= m_max; ++m) {
        power = power * symplectic;
        const double norm = power.jacobiSvd().singularValues()[0];
        report.max_norm = std::max(report.max_norm, norm);
        if (norm > 1e12) break;  // clearly unbounded, avoid overflow
    }
    report.bounded = report.max_norm <= 10.0 * std::max(report.initial_norm, 1.0);
    return report;
}

EigenpolyReport reduced_eigenpoly_check(const CentralConfiguration& cc,
                                        const LinearizedSystem& lin) {
    const int n = cc.sys.count();
    const double w = cc.omega;
    const Eigen::MatrixXd Minv_D2U = [&] {
        Eigen::MatrixXd m = lin.hessian;
        for (int i = 0; i < n; ++i) m.middleRows(2 * i, 2) /= cc.sys.masses()[i];
        return m;
    }();
    const Eigen::MatrixXd K = complex_structure_K(n);
    const Eigen::MatrixXcd base = Minv_D2U.cast<Complex>();
    const Eigen::MatrixXcd Kc = K.cast<Complex>();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2 * n, 2 * n);

    auto P_of = [&](Complex lambda) -> Eigen::MatrixXcd {
        return base + (w * w - lambda * lambda) * I + 2.0 * lambda * w * Kc;
    };

    // det P is a monic degree-2n polynomial in mu = lambda^2; recover its two
    // leading coefficients by sampling on a circle in the complex mu-plane
    // that encloses all roots and reading the DFT.  Unlike an interval fit,
    // the circle keeps the conditioning of every coefficient uniform.
    const auto spectrum = eigenvalues_of(lin.L);
    const double rho = spectral_radius(spectrum);
    const int degree = 2 * n;
    const int points = 2 * (degree + 1);
    const double radius = 4.0 * std::max(1.0, rho * rho);
    std::vector<Complex> values(points);
    for (int j = 0; j < points; ++j) {
        const double angle = 2.0 * std::numbers::pi * j / points;
        const Complex mu = radius * Complex(std::cos(angle), std::sin(angle));
        values[j] = P_of(std::sqrt(mu)).determinant() / std::pow(radius, degree);
    }
    const auto dft_coefficient = [&](int k) {
        Complex sum = 0.0;
        for (int j = 0; j < points; ++j) {
            const double angle = -2.0 * std::numbers::pi * j * k / points;
            sum += values[j] * Complex(std::cos(angle), std::sin(angle));
        }
        // values were normalized by radius^degree, so undo per order.
        return sum / static_cast<double>(points) * std::pow(radius, degree - k);
    };

    EigenpolyReport report;
    report.leading_coeff = dft_coefficient(degree).real();
    report.second_coeff = dft_coefficient(degree - 1).real();
    report.expected_second = 2.0 * n * w * w - Minv_D2U.trace();
    const double denom = std::max({std::abs(report.expected_second), 1.0});
    report.rel_error = std::max(std::abs(report.leading_coeff - 1.0),
                                std::abs(report.second_coeff - report.expected_second) / denom);

    report.max_scaled_det = 0.0;
    for (const Complex& lambda : spectrum) {
        const Eigen::MatrixXcd P = P_of(lambda);
        const double det = std::abs(P.determinant());
        report.max_scaled_det =
            std::max(report.max_scaled_det, det / std::max(hadamard_bound(P), 1e-300));
    }
    return report;
}

}  // namespace releq
