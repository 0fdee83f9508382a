#pragma once

#include "releq/linearization.hpp"

namespace releq {

/// Symplectic splitting of the phase space at a relative equilibrium.
/// E1 spans centre-of-mass position/momentum, E2 the dilation/rotation
/// modes, E3 = (E1 + E2)^perp with respect to the symplectic pairing.
/// C is the 2n x 2n change of configuration coordinates with [C, K] = 0 and
/// C^T M C = I whose first four columns are the normalized
/// (v, Kv, xbar, K xbar).
struct ReductionBasis {
    Eigen::MatrixXd E1;  // 4n x 4, columns v1..v4
    Eigen::MatrixXd E2;  // 4n x 4, columns w1..w4
    Eigen::MatrixXd E3;  // 4n x (4n-8), orthonormal kernel basis
    Eigen::MatrixXd C;   // 2n x 2n
    unsigned seed = 0;   // seed used for the random completion of C
};

ReductionBasis build_reduction(const CentralConfiguration& cc, const LinearizedSystem& lin,
                               unsigned seed = 0);

/// Restrictions of L and B to the invariant subspaces.  L3 has the block
/// form [[omega K, I], [D, omega K]] with D the essential block of
/// C^T D2U(xbar) C; N3 is the congruent diag(-(D + omega^2 I), I).
struct ReducedBlocks {
    Eigen::MatrixXd L1;       // 4 x 4 in the (v1..v4) basis
    Eigen::MatrixXd L2;       // 4 x 4 in the (w1..w4) basis
    Eigen::MatrixXd L3;       // (4n-8) x (4n-8)
    Eigen::MatrixXd B3;       // (4n-8) x (4n-8) symmetric
    Eigen::MatrixXd N3;       // congruent block-diagonal form of B3
    Eigen::MatrixXd D_block;  // (2n-4) x (2n-4)
    double omega = 0.0;
};

ReducedBlocks restrict_blocks(const ReductionBasis& basis, const LinearizedSystem& lin);

/// Morse index / nullity of the essential Hessian D + omega^2 I, i.e. the
/// Hessian of the potential restricted to the shape sphere.
AugmentedHessian essential_hessian(const ReducedBlocks& blocks);

}  // namespace releq
