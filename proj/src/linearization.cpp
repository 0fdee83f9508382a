#include "releq/linearization.hpp"

namespace releq {

LinearizedSystem build_linearization(const CentralConfiguration& cc) {
    const int n = cc.sys.count();
    const auto structural = StructuralMatrices::build(cc.sys);
    const Eigen::MatrixXd D2U = hess_potential(cc.sys, cc.spec);
    const Eigen::MatrixXd Xi = cc.omega * structural.K;
    const Eigen::MatrixXd Minv = [&] {
        Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            inv(2 * i, 2 * i) = 1.0 / cc.sys.masses()[i];
            inv(2 * i + 1, 2 * i + 1) = 1.0 / cc.sys.masses()[i];
        }
        return inv;
    }();

    LinearizedSystem lin{Eigen::MatrixXd(4 * n, 4 * n), Eigen::MatrixXd(4 * n, 4 * n),
                         Xi, D2U, Eigen::VectorXd(), cc.omega, cc};
    lin.B.topLeftCorner(2 * n, 2 * n) = -D2U;
    lin.B.topRightCorner(2 * n, 2 * n) = Xi.transpose();
    lin.B.bottomLeftCorner(2 * n, 2 * n) = Xi;
    lin.B.bottomRightCorner(2 * n, 2 * n) = Minv;

    // -J B permutes the blocks of B with signs; assembling the result
    // directly keeps L = -J B an exact identity.
    lin.L.topLeftCorner(2 * n, 2 * n) = Xi;                     //  omega K
    lin.L.topRightCorner(2 * n, 2 * n) = Minv;                  //  M^-1
    lin.L.bottomLeftCorner(2 * n, 2 * n) = D2U;                 //  D2U(xbar)
    lin.L.bottomRightCorner(2 * n, 2 * n) = -Xi.transpose();    //  omega K

    lin.momentum = -(structural.M * (Xi * cc.sys.positions()));
    return lin;
}

AugmentedHessian augmented_hessian(const CentralConfiguration& cc) {
    AugmentedHessian aug;
    aug.H = hess_potential(cc.sys, cc.spec) +
            cc.omega * cc.omega * mass_matrix(cc.sys.masses());
    const Inertia inertia = inertia_of(aug.H);
    aug.morse_index = inertia.n_minus;
    aug.nullity = inertia.nullity;
    return aug;
}

ParityReport parity_from_indices(int morse_index, int nullity) {
    ParityReport r{ParityVerdict::Inconclusive, morse_index, nullity};
    const bool morse_odd = morse_index % 2 != 0;
    const bool nullity_odd = nullity % 2 != 0;
    if (morse_odd && !nullity_odd)
        r.verdict = ParityVerdict::UnstableSpectrally;
    else if (morse_odd || nullity_odd)
        r.verdict = ParityVerdict::UnstableLinearly;
    return r;
}

ParityReport parity_instability_test(const CentralConfiguration& cc) {
    const AugmentedHessian aug = augmented_hessian(cc);
    return parity_from_indices(aug.morse_index, aug.nullity);
}

}  // namespace releq
