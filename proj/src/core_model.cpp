#include "releq/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace releq {

BodySystem::BodySystem(std::vector<double> masses, Eigen::VectorXd positions)
    : masses_(std::move(masses)), positions_(std::move(positions)) {
    const int n = static_cast<int>(masses_.size());
    if (n < 3)
        throw InvalidArgument("BodySystem needs n >= 3 bodies, got " + std::to_string(n));
    if (positions_.size() != 2 * n)
        throw DimensionError("positions must have size 2n = " + std::to_string(2 * n) +
                             ", got " + std::to_string(positions_.size()));
    for (double m : masses_)
        if (!(m > 0.0))
            throw InvalidArgument("all masses must be strictly positive");
    if (min_pair_distance() <= 0.0)
        throw CollisionError("configuration has two coincident bodies");
}

double BodySystem::total_mass() const {
    return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

Eigen::Vector2d BodySystem::weighted_centroid() const {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (int i = 0; i < count(); ++i) c += masses_[i] * body(i);
    return c;
}

double BodySystem::min_pair_distance() const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < count(); ++i)
        for (int j = i + 1; j < count(); ++j)
            d = std::min(d, (body(i) - body(j)).norm());
    return d;
}

double BodySystem::diameter() const {
    double d = 0.0;
    for (int i = 0; i < count(); ++i)
        for (int j = i + 1; j < count(); ++j)
            d = std::max(d, (body(i) - body(j)).norm());
    return d;
}

double BodySystem::center_tolerance() const {
    double max_abs = 0.0;
    for (int i = 0; i < count(); ++i) max_abs = std::max(max_abs, body(i).norm());
    return 1e-10 * total_mass() * max_abs;
}

bool BodySystem::is_centered() const {
    return weighted_centroid().norm() <= center_tolerance();
}

BodySystem BodySystem::with_positions(Eigen::VectorXd q) const {
    return BodySystem(masses_, std::move(q));
}

double moment_of_inertia(const BodySystem& sys) {
    double s = 0.0;
    for (int i = 0; i < sys.count(); ++i)
        s += sys.masses()[i] * sys.body(i).squaredNorm();
    return s;
}

Eigen::MatrixXd mass_matrix(const std::vector<double>& masses) {
    const int n = static_cast<int>(masses.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        M(2 * i, 2 * i) = masses[i];
        M(2 * i + 1, 2 * i + 1) = masses[i];
    }
    return M;
}

Eigen::MatrixXd complex_structure_K(int n_bodies) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * n_bodies, 2 * n_bodies);
    for (int i = 0; i < n_bodies; ++i) {
        K(2 * i, 2 * i + 1) = -1.0;
        K(2 * i + 1, 2 * i) = 1.0;
    }
    return K;
}

Eigen::MatrixXd standard_J(int dim) {
    if (dim % 2 != 0)
        throw DimensionError("standard_J needs an even dimension");
    const int h = dim / 2;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
    J.topRightCorner(h, h) = -Eigen::MatrixXd::Identity(h, h);
    J.bottomLeftCorner(h, h) = Eigen::MatrixXd::Identity(h, h);
    return J;
}

double symplectic_pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != v.size())
        throw DimensionError("symplectic_pairing: size mismatch");
    if (u.size() % 2 != 0)
        throw DimensionError("symplectic_pairing: odd dimension");
    const auto h = u.size() / 2;
    // <J u, v> with J = [[0,-I],[I,0]]: J u = (-u_tail, u_head).
    return u.head(h).dot(v.tail(h)) - u.tail(h).dot(v.head(h));
}

StructuralMatrices StructuralMatrices::build(const BodySystem& sys) {
    StructuralMatrices s;
    s.M = mass_matrix(sys.masses());
    s.K = complex_structure_K(sys.count());
    s.J2n = standard_J(2 * sys.count());
    s.J4n = standard_J(4 * sys.count());
    return s;
}

namespace {

Inertia inertia_from_real_eigenvalues(const Eigen::VectorXd& eigs, double zero_tol_rel) {
    const double scale = eigs.size() ? eigs.cwiseAbs().maxCoeff() : 0.0;
    const double tol = zero_tol_rel * scale;
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

}  // namespace

Inertia inertia_of(const Eigen::MatrixXd& symmetric, double zero_tol_rel) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
    return inertia_from_real_eigenvalues(es.eigenvalues(), zero_tol_rel);
}

Inertia inertia_of(const Eigen::MatrixXcd& hermitian, double zero_tol_rel) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian, Eigen::EigenvaluesOnly);
    return inertia_from_real_eigenvalues(es.eigenvalues(), zero_tol_rel);
}

int negative_eigenvalue_count(const Eigen::MatrixXcd& hermitian, double zero_tol_rel) {
    return inertia_of(hermitian, zero_tol_rel).n_minus;
}

std::vector<Complex> eigenvalues_of(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
    const auto& v = es.eigenvalues();
    return std::vector<Complex>(v.data(), v.data() + v.size());
}

std::vector<Complex> eigenvalues_of(const Eigen::MatrixXcd& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
    const auto& v = es.eigenvalues();
    return std::vector<Complex>(v.data(), v.data() + v.size());
}

std::vector<Complex> refined_eigenvalues_of(const Eigen::MatrixXd& m, double cluster_tol_rel) {
    const std::vector<Complex> raw = eigenvalues_of(m);
    const double tol = cluster_tol_rel * std::max(1.0, spectral_radius(raw));
    std::vector<Complex> refined;
    refined.reserve(raw.size());
    for (const auto& cluster : cluster_eigenvalues(raw, tol))
        for (int k = 0; k < cluster.multiplicity; ++k) refined.push_back(cluster.mean);
    return refined;
}

double spectral_radius(const std::vector<Complex>& spectrum) {
    double r = 0.0;
    for (const auto& z : spectrum) r = std::max(r, std::abs(z));
    return r;
}

std::vector<EigenvalueCluster> cluster_eigenvalues(std::vector<Complex> values, double tol) {
    // Single-linkage union-find on the |.|-distance graph.
    const int n = static_cast<int>(values.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(values[i] - values[j]) <= tol) parent[find(i)] = find(j);

    std::vector<EigenvalueCluster> clusters;
    std::vector<int> root_to_cluster(n, -1);
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (root_to_cluster[r] < 0) {
            root_to_cluster[r] = static_cast<int>(clusters.size());
            clusters.push_back({Complex(0, 0), 0});
        }
        auto& c = clusters[root_to_cluster[r]];
        c.mean += values[i];
        ++c.multiplicity;
    }
    for (auto& c : clusters) c.mean /= static_cast<double>(c.multiplicity);
    std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
        if (a.mean.real() != b.mean.real()) return a.mean.real() < b.mean.real();
        return a.mean.imag() < b.mean.imag();
    });
    return clusters;
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
    if (cost.rows() != cost.cols())
        throw DimensionError("min_cost_assignment: matrix must be square");
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();

    // Shortest-augmenting-path Hungarian with potentials; 1-based helpers.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> match(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) match[p[j] - 1] = j - 1;
    return match;
}

double max_matched_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size())
        throw DimensionError("max_matched_distance: multiset sizes differ");
    const int n = static_cast<int>(a.size());
    if (n == 0) return 0.0;
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost(i, j) = std::abs(a[i] - b[j]);
    const auto match = min_cost_assignment(cost);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, cost(i, match[i]));
    return worst;
}

}  // namespace releq
