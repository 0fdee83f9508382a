#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "releq/errors.hpp"

namespace releq {

using Complex = std::complex<double>;

/// Planar n-body kinematic data: masses and a stacked coordinate vector
/// q = (x_1, y_1, ..., x_n, y_n).  Immutable after construction.
class BodySystem {
public:
    /// Validates n >= 3, strictly positive masses and a collision-free
    /// configuration (all pairwise distances nonzero).
    BodySystem(std::vector<double> masses, Eigen::VectorXd positions);

    int count() const { return static_cast<int>(masses_.size()); }
    const std::vector<double>& masses() const { return masses_; }
    const Eigen::VectorXd& positions() const { return positions_; }

    Eigen::Vector2d body(int i) const { return positions_.segment<2>(2 * i); }
    double total_mass() const;
    Eigen::Vector2d weighted_centroid() const;  // sum m_i q_i

    double min_pair_distance() const;
    double diameter() const;  // max pairwise distance

    /// Scale-aware centering tolerance: 1e-10 * (sum m_i) * max|q_i|.
    double center_tolerance() const;
    bool is_centered() const;

    /// Same masses, new coordinates.
    BodySystem with_positions(Eigen::VectorXd q) const;

private:
    std::vector<double> masses_;
    Eigen::VectorXd positions_;
};

/// Moment of inertia I(q) = <Mq, q> = sum m_i |q_i|^2.
double moment_of_inertia(const BodySystem& sys);

/// 2n x 2n diagonal mass matrix diag(m_1 I_2, ..., m_n I_2).
Eigen::MatrixXd mass_matrix(const std::vector<double>& masses);

/// 2n x 2n block-diagonal complex structure K = diag_n(J_2) with
/// J_2 = [[0,-1],[1,0]].  Exact 0/+-1 entries, so K^2 = -I and [K,M] = 0
/// hold at machine precision.
Eigen::MatrixXd complex_structure_K(int n_bodies);

/// Standard complex structure [[0,-I],[I,0]] of even size `dim`.
/// Distinct from K: this one is block-anti-diagonal.
Eigen::MatrixXd standard_J(int dim);

/// Symplectic pairing Omega(u, v) = <J u, v> with J = standard_J(dim(u)).
/// Throws DimensionError on mismatched or odd dimensions.
double symplectic_pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Mass matrix, complex structures and the 4n symplectic structure for one
/// body system.
struct StructuralMatrices {
    Eigen::MatrixXd M;    // 2n x 2n
    Eigen::MatrixXd K;    // 2n x 2n, block-diagonal J_2
    Eigen::MatrixXd J2n;  // 2n x 2n, block-anti-diagonal
    Eigen::MatrixXd J4n;  // 4n x 4n, block-anti-diagonal

    static StructuralMatrices build(const BodySystem& sys);
};

/// Signature data of a real symmetric / complex Hermitian matrix.
struct Inertia {
    int n_minus = 0;   // negative eigenvalues (Morse index)
    int nullity = 0;   // |eig| <= zero_tol_rel * max|eig|
    int n_plus = 0;
    int signature() const { return n_plus - n_minus; }
};

Inertia inertia_of(const Eigen::MatrixXd& symmetric, double zero_tol_rel = 1e-8);
Inertia inertia_of(const Eigen::MatrixXcd& hermitian, double zero_tol_rel = 1e-8);

/// Count of eigenvalues of `hermitian` strictly below -tol (Morse index with
/// an explicit absolute threshold).
int negative_eigenvalue_count(const Eigen::MatrixXcd& hermitian, double zero_tol_rel = 1e-8);

std::vector<Complex> eigenvalues_of(const Eigen::MatrixXd& m);
std::vector<Complex> eigenvalues_of(const Eigen::MatrixXcd& m);

/// Eigenvalues with numerically coincident clusters replaced by their mean
/// (repeated with multiplicity).  A defective eigenvalue computed by a
/// backward-stable solver splits by ~sqrt(eps); the cluster mean cancels the
/// splitting and is accurate to O(eps).
std::vector<Complex> refined_eigenvalues_of(const Eigen::MatrixXd& m,
                                            double cluster_tol_rel = 1e-6);

double spectral_radius(const std::vector<Complex>& spectrum);

/// One cluster of numerically coincident eigenvalues.
struct EigenvalueCluster {
    Complex mean;
    int multiplicity = 0;
};

/// Groups eigenvalues whose mutual distance is below `tol` (single-linkage).
std::vector<EigenvalueCluster> cluster_eigenvalues(std::vector<Complex> values, double tol);

/// Minimum-cost perfect assignment (Hungarian algorithm) on a square cost
/// matrix; returns col[row].
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

/// Max |a_i - b_match(i)| under the minimum-total-|.|-cost bipartite matching
/// of two equally sized complex multisets.  Throws DimensionError on size
/// mismatch.
double max_matched_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace releq
