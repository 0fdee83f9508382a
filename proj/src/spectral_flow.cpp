#include "releq/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace releq {

namespace {

constexpr double kRankTolRel = 1e-9;    // SVD rank decisions
constexpr double kKernelTolRel = 1e-8;  // Hermitian eigenvalue-zero threshold

void require_hermitian(const Eigen::MatrixXcd& m, const char* name) {
    const double scale = std::max(m.norm(), 1e-300);
    if ((m - m.adjoint()).norm() > 1e-12 * scale)
        throw InvalidArgument(std::string(name) + " is not Hermitian to 1e-12");
}

Eigen::MatrixXcd symmetrize(const Eigen::MatrixXcd& m) {
    return 0.5 * (m + m.adjoint());
}

struct HermitianEigs {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
};

HermitianEigs eig_hermitian(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    return {es.eigenvalues(), es.eigenvectors()};
}

bool invertible(const Eigen::VectorXd& eigs) {
    const double scale = eigs.cwiseAbs().maxCoeff();
    if (scale <= 0.0) return false;
    return eigs.cwiseAbs().minCoeff() > kRankTolRel * scale;
}

/// Exact negative count; callers gate on invertible() first, so every
/// eigenvalue is bounded away from zero and the sign is unambiguous.
int count_negative(const Eigen::VectorXd& eigs) {
    int c = 0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
        if (eigs[i] < 0.0) ++c;
    return c;
}

/// Inertia of a small Hermitian form with an absolute zero floor (the form
/// may be a compression of a larger matrix, so a purely relative threshold
/// would misread an all-noise block).
Inertia form_inertia(const Eigen::MatrixXcd& form, double abs_floor) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(symmetrize(form), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd eigs = es.eigenvalues();
    const double tol = std::max(kKernelTolRel * eigs.cwiseAbs().maxCoeff(), abs_floor);
    Inertia r;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        if (std::abs(eigs[i]) <= tol)
            ++r.nullity;
        else if (eigs[i] < 0.0)
            ++r.n_minus;
        else
            ++r.n_plus;
    }
    return r;
}

Eigen::MatrixXcd kernel_basis_svd(const Eigen::MatrixXcd& m, double tol_rel) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    int rank = 0;
    if (smax > 1e-300)
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] > tol_rel * smax) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

}  // namespace

HermitianPath HermitianPath::affine(Eigen::MatrixXcd A, Eigen::MatrixXcd C, double a, double b) {
    if (A.rows() != A.cols() || C.rows() != C.cols() || A.rows() != C.rows())
        throw DimensionError("HermitianPath: A and C must be square of equal size");
    if (!(a < b))
        throw InvalidArgument("HermitianPath: interval needs a < b");
    require_hermitian(A, "A");
    require_hermitian(C, "C");
    return HermitianPath(symmetrize(A), symmetrize(C), a, b);
}

HermitianPath HermitianPath::on(double a, double b) const {
    return affine(A_, C_, a, b);
}

HermitianPath normalization_path(const Eigen::MatrixXcd& A) {
    require_hermitian(A, "A");
    const auto d = A.rows();
    if (d < 2)
        throw InvalidArgument("normalization path needs dimension >= 2");
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(d, d);
    P(0, 0) = 1.0;
    const Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(d, d) - P;
    const Eigen::MatrixXcd QAQ = symmetrize(Q * A * Q);
    const Eigen::MatrixXcd compressed = QAQ.bottomRightCorner(d - 1, d - 1);
    if (!invertible(eig_hermitian(compressed).values))
        throw InvalidArgument("normalization path: (I-P)A(I-P) singular on ker P");
    return HermitianPath::affine(QAQ - 0.5 * P, P, 0.0, 1.0);
}

int spectral_flow_endpoints(const HermitianPath& path) {
    const Eigen::VectorXd at_a = eig_hermitian(path.at(path.a())).values;
    const Eigen::VectorXd at_b = eig_hermitian(path.at(path.b())).values;
    if (!invertible(at_a))
        throw SingularEndpoint("path endpoint T(a) is singular");
    if (!invertible(at_b))
        throw SingularEndpoint("path endpoint T(b) is singular");
    return count_negative(at_a) - count_negative(at_b);
}

int spectral_flow_affine(const HermitianPath& path) {
    return spectral_flow_endpoints(path);
}

std::vector<double> find_crossings_affine(const HermitianPath& path) {
    const double a = path.a(), b = path.b();
    const int samples = 128;

    // Anchor the pencil at the best-conditioned sampled instant.
    double t0 = a, best = -1.0, scale = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = a + (b - a) * i / samples;
        const Eigen::VectorXd eigs = eig_hermitian(path.at(t)).values;
        const double lo = eigs.cwiseAbs().minCoeff();
        scale = std::max(scale, eigs.cwiseAbs().maxCoeff());
        if (lo > best) {
            best = lo;
            t0 = t;
        }
    }
    if (best <= 1e-12 * std::max(scale, 1e-300))
        throw NonIsolatedCrossing("affine path is singular across the sampled interval");

    // A + tC singular  <=>  -1/(t - t0) is an eigenvalue of D(t0)^{-1} C.
    const Eigen::MatrixXcd X = path.at(t0).fullPivLu().solve(path.C());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(X, /*computeEigenvectors=*/false);

    std::vector<double> hits;
    const double edge = 1e-9 * (1.0 + b - a);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const Complex mu = es.eigenvalues()[i];
        if (std::abs(mu) < 1e-13) continue;  // no finite crossing
        const Complex tc = t0 - 1.0 / mu;
        if (std::abs(tc.imag()) > 1e-7 * std::max(1.0, std::abs(tc))) continue;
        const double t = tc.real();
        if (t < a - edge || t > b + edge) continue;
        hits.push_back(std::clamp(t, a, b));
    }
    std::sort(hits.begin(), hits.end());
    // Merge numerically coincident hits into their mean: a defective
    // crossing splits the candidate instants symmetrically by ~sqrt(eps),
    // so the cluster mean recovers the instant to rounding accuracy.
    std::vector<double> merged;
    std::size_t i = 0;
    while (i < hits.size()) {
        double sum = hits[i];
        std::size_t j = i + 1;
        while (j < hits.size() && hits[j] - hits[j - 1] <= 1e-7 * (1.0 + std::abs(hits[j]))) {
            sum += hits[j];
            ++j;
        }
        merged.push_back(sum / static_cast<double>(j - i));
        i = j;
    }
    return merged;
}

CrossingFormData crossing_form(const HermitianPath& path, double t_star) {
    const HermitianEigs ed = eig_hermitian(path.at(t_star));
    const double scale = ed.values.cwiseAbs().maxCoeff();
    const double tol = kKernelTolRel * std::max(scale, 1e-300);

    std::vector<Eigen::Index> kernel_idx;
    for (Eigen::Index i = 0; i < ed.values.size(); ++i)
        if (std::abs(ed.values[i]) <= tol) kernel_idx.push_back(i);
    if (kernel_idx.empty())
        throw NotACrossing("T(t*) is injective at t* = " + std::to_string(t_star));

    Eigen::MatrixXcd U(path.dim(), kernel_idx.size());
    for (std::size_t j = 0; j < kernel_idx.size(); ++j) U.col(j) = ed.vectors.col(kernel_idx[j]);

    CrossingFormData data;
    data.kernel_dim = static_cast<int>(kernel_idx.size());
    data.form = symmetrize(U.adjoint() * path.C() * U);
    const Inertia inertia = form_inertia(data.form, 1e-10 * path.C().norm());
    data.signature = inertia.signature();
    data.regular = (inertia.nullity == 0);
    return data;
}

int spectral_flow_regular(const HermitianPath& path) {
    if (!invertible(eig_hermitian(path.at(path.a())).values) ||
        !invertible(eig_hermitian(path.at(path.b())).values))
        throw SingularEndpoint("regular-crossing formula needs invertible endpoints");
    int flow = 0;
    for (double t : find_crossings_affine(path)) {
        const CrossingFormData form = crossing_form(path, t);
        if (!form.regular)
            throw DegenerateCrossing(t);
        flow += form.signature;
    }
    return flow;
}

Eigen::MatrixXcd generalized_eigenspace(const Eigen::MatrixXcd& X, Complex lambda,
                                        double tol_rel) {
    const auto d = X.rows();
    Eigen::MatrixXcd Y = X - lambda * Eigen::MatrixXcd::Identity(d, d);
    const double norm = Y.norm();
    if (norm > 1e-300) Y /= norm;

    Eigen::MatrixXcd power = Y;
    Eigen::MatrixXcd kernel = kernel_basis_svd(power, tol_rel);
    for (Eigen::Index j = 1; j < d; ++j) {
        if (kernel.cols() == 0) break;
        power = power * Y;
        Eigen::MatrixXcd next = kernel_basis_svd(power, tol_rel);
        if (next.cols() == kernel.cols()) break;  // filtration stabilized
        kernel = std::move(next);
    }
    return kernel;
}

namespace {

/// Track the vanishing eigenvalue branches of D on a symmetric stencil
/// around t_star and estimate each branch's vanishing order and leading
/// coefficient by a polynomial fit (no constant term; branches vanish at 0).
struct BranchFit {
    int order = 0;
    double leading = 0.0;  // fitted coefficient of (s/delta)^order
};

std::vector<BranchFit> fit_vanishing_branches(const HermitianPath& path, double t_star,
                                              const Eigen::MatrixXcd& kernel, double delta) {
    const int k = static_cast<int>(kernel.cols());
    const int steps = 6;                     // stencil points per side
    const int max_order = 6;                 // fitted polynomial degree
    Eigen::MatrixXd samples(k, 2 * steps);   // branch values
    Eigen::VectorXd offsets(2 * steps);      // scaled stencil s/delta

    int col = 0;
    for (int side : {-1, +1}) {
        Eigen::MatrixXcd current = kernel;
        for (int j = 1; j <= steps; ++j, ++col) {
            const double frac = side * static_cast<double>(j) / steps;
            offsets[col] = frac;
            const HermitianEigs ed = eig_hermitian(path.at(t_star + frac * delta));
            // Globally-greedy overlap matching of branches to eigenpairs.
            std::vector<std::tuple<double, int, int>> overlaps;
            for (int i = 0; i < k; ++i)
                for (Eigen::Index l = 0; l < ed.values.size(); ++l)
                    overlaps.emplace_back(std::abs(current.col(i).dot(ed.vectors.col(l))), i,
                                          static_cast<int>(l));
            std::sort(overlaps.begin(), overlaps.end(), std::greater<>());
            std::vector<char> branch_done(k, 0), eig_done(ed.values.size(), 0);
            Eigen::MatrixXcd next = current;
            for (const auto& [ov, i, l] : overlaps) {
                if (branch_done[i] || eig_done[l]) continue;
                branch_done[i] = eig_done[l] = 1;
                next.col(i) = ed.vectors.col(l);
                samples(i, col) = ed.values[l];
            }
            current = std::move(next);
        }
    }

    // Least-squares fit lambda_i(s) = sum_p c_p (s/delta)^p, p = 1..max_order.
    Eigen::MatrixXd vandermonde(2 * steps, max_order);
    for (int r = 0; r < 2 * steps; ++r) {
        double pw = 1.0;
        for (int p = 0; p < max_order; ++p) {
            pw *= offsets[r];
            vandermonde(r, p) = pw;
        }
    }
    const auto qr = vandermonde.colPivHouseholderQr();

    std::vector<BranchFit> fits(k);
    for (int i = 0; i < k; ++i) {
        const Eigen::VectorXd coeffs = qr.solve(samples.row(i).transpose());
        const double cmax = coeffs.cwiseAbs().maxCoeff();
        BranchFit fit;
        fit.order = max_order;
        for (int p = 0; p < max_order; ++p) {
            if (std::abs(coeffs[p]) > 0.02 * cmax) {
                fit.order = p + 1;
                fit.leading = coeffs[p];
                break;
            }
        }
        fits[i] = fit;
    }
    return fits;
}

}  // namespace

CrossingReport partial_signatures_affine(const HermitianPath& path, double t_star) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(path.C());
    if (!lu.isInvertible())
        throw InvalidArgument("partial signatures need an invertible C in A + tC");

    // A defective crossing instant is only known to ~sqrt(eps), which is
    // enough to contaminate the kernel basis and the crossing form.  Refine
    // it to the mean of the eigenvalue cluster of C^{-1}A near -t* before
    // any local analysis.
    const Eigen::MatrixXcd X = lu.solve(path.A());
    const auto x_spectrum = eigenvalues_of(X);
    const double cluster_tol = 1e-6 * std::max(1.0, spectral_radius(x_spectrum));
    Complex shift(0, 0);
    int in_cluster = 0;
    for (const Complex& z : x_spectrum) {
        if (std::abs(z - Complex(-t_star, 0.0)) <= cluster_tol) {
            shift += z;
            ++in_cluster;
        }
    }
    if (in_cluster == 0)
        throw NotACrossing("no eigenvalue of C^{-1}A near -t*");
    shift /= static_cast<double>(in_cluster);
    const double refined_t = -shift.real();

    const CrossingFormData form = crossing_form(path, refined_t);  // throws NotACrossing

    CrossingReport report;
    report.t_star = t_star;
    report.kernel_dim = form.kernel_dim;
    report.crossing_form_signature = form.signature;
    report.regular = form.regular;

    // Local flow: signature of <C.,.> on the generalized eigenspace of
    // C^{-1}A (the affine-path shortcut for degenerate crossings).
    const Eigen::MatrixXcd space = generalized_eigenspace(X, shift);
    report.generalized_space_dim = static_cast<int>(space.cols());
    const Eigen::MatrixXcd krein_form = space.adjoint() * path.C() * space;
    report.local_flow = form_inertia(krein_form, 1e-10 * path.C().norm()).signature();

    // Stencil radius: stay well inside the gap to the neighbouring crossings.
    double gap = std::numeric_limits<double>::infinity();
    const HermitianPath wide =
        path.on(refined_t - 1.0 - std::abs(refined_t), refined_t + 1.0 + std::abs(refined_t));
    for (double t : find_crossings_affine(wide))
        if (std::abs(t - refined_t) > 1e-7 * (1.0 + std::abs(refined_t)))
            gap = std::min(gap, std::abs(t - refined_t));
    const double delta = std::min(0.25 * gap, 0.05 * (1.0 + std::abs(refined_t)));

    const HermitianEigs at_star = eig_hermitian(path.at(refined_t));
    const double tol = kKernelTolRel * std::max(at_star.values.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::MatrixXcd kernel(path.dim(), form.kernel_dim);
    int c = 0;
    for (Eigen::Index i = 0; i < at_star.values.size() && c < form.kernel_dim; ++i) {
        if (std::abs(at_star.values[i]) <= tol) {
            kernel.col(c) = at_star.vectors.col(i);
            ++c;
        }
    }

    const auto fits = fit_vanishing_branches(path, refined_t, kernel, delta);
    int max_order = 0;
    for (const auto& f : fits) max_order = std::max(max_order, f.order);
    report.partial_signatures.assign(max_order, 0);
    for (const auto& f : fits)
        report.partial_signatures[f.order - 1] += (f.leading > 0.0) ? 1 : (f.leading < 0.0 ? -1 : 0);
    return report;
}

namespace {

Complex matched_eigenvalue(const std::vector<Complex>& spectrum, Complex lambda, double tol) {
    // Mean of the cluster of spectrum points nearest to lambda.
    Complex sum = 0.0;
    int count = 0;
    for (const Complex& z : spectrum) {
        if (std::abs(z - lambda) <= tol) {
            sum += z;
            ++count;
        }
    }
    if (count == 0)
        throw NotAnEigenvalue("no eigenvalue within tolerance of the requested value");
    return sum / static_cast<double>(count);
}

KreinReport krein_on_space(const Eigen::MatrixXcd& space, const Eigen::MatrixXcd& G,
                           Complex lambda) {
    KreinReport report;
    report.eigenvalue = lambda;
    report.space_dim = static_cast<int>(space.cols());
    const Eigen::MatrixXcd form = space.adjoint() * G * space;
    report.signature = form_inertia(form, 1e-10 * G.norm()).signature();
    return report;
}

}  // namespace

KreinReport krein_signature(const Eigen::MatrixXd& hamiltonian, Complex lambda) {
    const auto d = hamiltonian.rows();
    if (d != hamiltonian.cols() || d % 2 != 0)
        throw DimensionError("Hamiltonian matrix must be square of even size");
    const Eigen::MatrixXd J = standard_J(static_cast<int>(d));
    const double scale = std::max(hamiltonian.norm(), 1e-300);
    if ((hamiltonian.transpose() * J + J * hamiltonian).norm() > 1e-10 * scale)
        throw InvalidArgument("matrix is not Hamiltonian: H^T J + J H != 0");

    const auto spectrum = eigenvalues_of(hamiltonian);
    const double tol = 1e-7 * std::max(1.0, spectral_radius(spectrum));
    const Complex mean = matched_eigenvalue(spectrum, lambda, tol);

    const Eigen::MatrixXcd space = generalized_eigenspace(hamiltonian.cast<Complex>(), mean);
    const Eigen::MatrixXcd G = Complex(0.0, 1.0) * J.cast<Complex>();
    return krein_on_space(space, G, mean);
}

KreinReport krein_signature_symplectic(const Eigen::MatrixXd& symplectic, Complex lambda) {
    const auto d = symplectic.rows();
    if (d != symplectic.cols() || d % 2 != 0)
        throw DimensionError("symplectic matrix must be square of even size");
    const Eigen::MatrixXd J = standard_J(static_cast<int>(d));
    if ((symplectic.transpose() * J * symplectic - J).norm() > 1e-10 * std::max(J.norm(), 1.0))
        throw NotSymplectic("matrix fails S^T J S = J to 1e-10");

    const auto spectrum = eigenvalues_of(symplectic);
    const double tol = 1e-7 * std::max(1.0, spectral_radius(spectrum));
    const Complex mean = matched_eigenvalue(spectrum, lambda, tol);
    const Eigen::MatrixXcd Sc = symplectic.cast<Complex>();
    const Eigen::MatrixXcd G = Complex(0.0, 1.0) * J.cast<Complex>();

    Eigen::MatrixXcd space = generalized_eigenspace(Sc, mean);
    if (std::abs(std::abs(mean) - 1.0) > 1e-7) {
        // Off the unit circle the form is isotropic on E_lambda; report the
        // pairing space E_lambda + E_{1/conj(lambda)} where it is defined.
        const Complex partner = matched_eigenvalue(spectrum, 1.0 / std::conj(mean), tol);
        const Eigen::MatrixXcd other = generalized_eigenspace(Sc, partner);
        Eigen::MatrixXcd joint(space.rows(), space.cols() + other.cols());
        joint << space, other;
        return krein_on_space(joint, G, mean);
    }
    return krein_on_space(space, G, mean);
}

}  // namespace releq
