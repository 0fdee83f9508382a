#include "releq/symplectic_reduction.hpp"

#include <cmath>
#include <random>

namespace releq {

namespace {

Eigen::VectorXd translation_vector(int n) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < n; ++i) v[2 * i] = 1.0;
    return v;
}

Eigen::MatrixXd phase_basis(const Eigen::VectorXd& top, const Eigen::MatrixXd& K,
                            const Eigen::MatrixXd& M) {
    // Columns (u, 0), (Ku, 0), (0, Mu), (0, KMu).
    const auto dim = top.size();
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2 * dim, 4);
    E.col(0).head(dim) = top;
    E.col(1).head(dim) = K * top;
    E.col(2).tail(dim) = M * top;
    E.col(3).tail(dim) = K * (M * top);
    return E;
}

double hadamard_bound(const Eigen::MatrixXd& m) {
    double b = 1.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) b *= m.row(i).norm();
    return b;
}

void require_nondegenerate_pairing(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& J4n,
                                   const char* name) {
    Eigen::MatrixXd gram(basis.cols(), basis.cols());
    for (Eigen::Index i = 0; i < basis.cols(); ++i)
        for (Eigen::Index j = 0; j < basis.cols(); ++j)
            gram(i, j) = (J4n * basis.col(i)).dot(basis.col(j));
    const double scale = hadamard_bound(gram);
    if (scale == 0.0 || std::abs(gram.determinant()) <= 1e-10 * scale)
        throw DegenerateBasis(std::string("symplectic pairing degenerate on ") + name);
}

/// M-orthonormal K-commuting completion: columns come in (b, Kb) pairs, so
/// [C, K] = 0 holds exactly; orthogonalizing each new b against every
/// existing column also takes care of its K-partner.
Eigen::MatrixXd complete_C(const CentralConfiguration& cc, const Eigen::MatrixXd& K,
                           const Eigen::MatrixXd& M, unsigned seed) {
    const int n = cc.sys.count();
    const int dim = 2 * n;
    Eigen::MatrixXd C(dim, dim);

    const Eigen::VectorXd v = translation_vector(n);
    const double v_norm = std::sqrt(v.dot(M * v));  // sqrt(sum m_i)
    C.col(0) = v / v_norm;
    C.col(1) = K * C.col(0);
    C.col(2) = cc.sys.positions();  // I = 1, so already M-unit
    C.col(3) = K * C.col(2);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int filled = 4;
    while (filled < dim) {
        Eigen::VectorXd b(dim);
        for (int i = 0; i < dim; ++i) b[i] = gauss(rng);
        // Two rounds of modified Gram-Schmidt in the M-inner product.
        for (int round = 0; round < 2; ++round)
            for (int j = 0; j < filled; ++j)
                b -= C.col(j).dot(M * b) * C.col(j);
        const double norm = std::sqrt(b.dot(M * b));
        if (norm < 1e-8) continue;  // unlucky draw, resample
        C.col(filled) = b / norm;
        C.col(filled + 1) = K * C.col(filled);
        filled += 2;
    }
    return C;
}

}  // namespace

ReductionBasis build_reduction(const CentralConfiguration& cc, const LinearizedSystem& lin,
                               unsigned seed) {
    const int n = cc.sys.count();
    if (lin.B.rows() != 4 * n)
        throw DimensionError("linearization does not match the configuration size");
    const auto structural = StructuralMatrices::build(cc.sys);

    ReductionBasis basis;
    basis.seed = seed;
    basis.E1 = phase_basis(translation_vector(n), structural.K, structural.M);
    basis.E2 = phase_basis(cc.sys.positions(), structural.K, structural.M);

    require_nondegenerate_pairing(basis.E1, structural.J4n, "E1");
    require_nondegenerate_pairing(basis.E2, structural.J4n, "E2");

    // E3 = kernel of the 8 x 4n pairing matrix with rows (J u_i)^T,
    // u_i running over the E1 and E2 bases.
    Eigen::MatrixXd pairing(8, 4 * n);
    for (int i = 0; i < 4; ++i) {
        pairing.row(i) = (structural.J4n * basis.E1.col(i)).transpose();
        pairing.row(4 + i) = (structural.J4n * basis.E2.col(i)).transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(pairing, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-10 * sv[0]) ++rank;
    if (rank < 8)
        throw DegenerateBasis("E1 + E2 spans fewer than 8 dimensions");
    basis.E3 = svd.matrixV().rightCols(4 * n - 8);

    basis.C = complete_C(cc, structural.K, structural.M, seed);
    return basis;
}

namespace {

/// Coordinates of L * (basis columns) in the basis itself (least squares;
/// the subspace is L-invariant so the residual is at rounding level).
Eigen::MatrixXd restricted_operator(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& L) {
    const Eigen::MatrixXd image = L * basis;
    return basis.colPivHouseholderQr().solve(image);
}

}  // namespace

ReducedBlocks restrict_blocks(const ReductionBasis& basis, const LinearizedSystem& lin) {
    const int n = lin.source.sys.count();
    const int ess = 2 * n - 4;  // essential configuration dimension

    ReducedBlocks blocks;
    blocks.omega = lin.omega;
    blocks.L1 = restricted_operator(basis.E1, lin.L);
    blocks.L2 = restricted_operator(basis.E2, lin.L);

    const Eigen::MatrixXd S = basis.C.transpose() * lin.hessian * basis.C;
    blocks.D_block = S.bottomRightCorner(ess, ess);

    const Eigen::MatrixXd K3 = complex_structure_K(ess / 2);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(ess, ess);
    const double w = lin.omega;

    blocks.L3.resize(2 * ess, 2 * ess);
    blocks.L3 << w * K3, I, blocks.D_block, w * K3;

    blocks.B3.resize(2 * ess, 2 * ess);
    blocks.B3 << -blocks.D_block, w * K3.transpose(), w * K3, I;

    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(2 * ess, 2 * ess);
    T.topRightCorner(ess, ess) = w * K3;
    blocks.N3 = T * blocks.B3 * T.transpose();
    return blocks;
}

AugmentedHessian essential_hessian(const ReducedBlocks& blocks) {
    AugmentedHessian aug;
    aug.H = blocks.D_block + blocks.omega * blocks.omega *
                                 Eigen::MatrixXd::Identity(blocks.D_block.rows(),
                                                           blocks.D_block.cols());
    const Inertia inertia = inertia_of(aug.H);
    aug.morse_index = inertia.n_minus;
    aug.nullity = inertia.nullity;
    return aug;
}

}  // namespace releq
