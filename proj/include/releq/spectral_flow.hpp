#pragma once

#include "releq/core_model.hpp"

namespace releq {

/// Affine path of Hermitian matrices t -> A + tC on [a, b].
/// Inputs are validated to be Hermitian to 1e-12 relative and symmetrized.
class HermitianPath {
public:
    static HermitianPath affine(Eigen::MatrixXcd A, Eigen::MatrixXcd C, double a, double b);

    Eigen::MatrixXcd at(double t) const { return A_ + t * C_; }
    const Eigen::MatrixXcd& A() const { return A_; }
    const Eigen::MatrixXcd& C() const { return C_; }
    double a() const { return a_; }
    double b() const { return b_; }
    Eigen::Index dim() const { return A_.rows(); }

    /// Same matrices on a different interval.
    HermitianPath on(double a, double b) const;

private:
    HermitianPath(Eigen::MatrixXcd A, Eigen::MatrixXcd C, double a, double b)
        : A_(std::move(A)), C_(std::move(C)), a_(a), b_(b) {}
    Eigen::MatrixXcd A_, C_;
    double a_, b_;
};

/// The normalization path of the spectral-flow axioms:
/// zeta(t) = (t - 1/2) P + (I-P) A (I-P) with P the projector onto e_1.
/// Its flow over [0,1] is 1.  Throws InvalidArgument when the compression of
/// A to ker P is singular.
HermitianPath normalization_path(const Eigen::MatrixXcd& A);

/// Endpoint formula: spfl = n^-(T(a)) - n^-(T(b)).
/// Throws SingularEndpoint when either endpoint fails the rank test.
int spectral_flow_endpoints(const HermitianPath& path);

/// Instants in [a, b] where A + tC is singular, deduplicated and sorted.
/// Computed from the eigenvalues of D(t0)^{-1} C for a well-conditioned t0;
/// throws NonIsolatedCrossing when the path is singular along the whole
/// sampled interval.
std::vector<double> find_crossings_affine(const HermitianPath& path);

struct CrossingFormData {
    Eigen::MatrixXcd form;  // compression of dT/dt = C to ker T(t*)
    int kernel_dim = 0;
    int signature = 0;
    bool regular = false;
};

/// Crossing form Gamma(T, t*) = Q C Q restricted to ker(A + t* C).
/// Throws NotACrossing when the kernel is trivial.
CrossingFormData crossing_form(const HermitianPath& path, double t_star);

/// Sum of crossing-form signatures over all crossings (Lemma of regular
/// crossings).  Throws DegenerateCrossing if some crossing form is singular
/// and SingularEndpoint if an endpoint is.
int spectral_flow_regular(const HermitianPath& path);

/// Full local data at one (possibly degenerate) crossing of an affine path.
struct CrossingReport {
    double t_star = 0.0;
    int kernel_dim = 0;
    int crossing_form_signature = 0;
    bool regular = false;
    /// k-th partial signature sgn_k at index k-1, recovered from the orders
    /// and leading coefficients of the vanishing eigenvalue branches.
    std::vector<int> partial_signatures;
    int generalized_space_dim = 0;
    /// Local flow contribution: signature of the Krein-type form <C.,.>
    /// restricted to the generalized eigenspace of C^{-1}A at -t*.  Equals
    /// the sum of the odd partial signatures.
    int local_flow = 0;
};

/// Local spectral-flow analysis at an isolated crossing of an affine path
/// with invertible C.
CrossingReport partial_signatures_affine(const HermitianPath& path, double t_star);

/// Spectral flow of an affine path by the defining endpoint formula.
int spectral_flow_affine(const HermitianPath& path);

/// Orthonormal basis of the generalized eigenspace  U_j ker(X - lambda I)^j
/// (repeated kernel extraction, rank threshold tol_rel * sigma_max).
Eigen::MatrixXcd generalized_eigenspace(const Eigen::MatrixXcd& X, Complex lambda,
                                        double tol_rel = 1e-9);

struct KreinReport {
    Complex eigenvalue;  // cluster mean actually used
    int space_dim = 0;   // dim of the generalized eigenspace
    int signature = 0;   // of <iJ ., .> restricted to it
};

/// Krein signature of a purely imaginary eigenvalue of a real Hamiltonian
/// matrix: signature of g(v, w) = <iJ v, w> on the generalized eigenspace.
/// Throws NotAnEigenvalue / InvalidArgument on bad inputs.
KreinReport krein_signature(const Eigen::MatrixXd& hamiltonian, Complex lambda);

/// Krein signature for a real symplectic matrix.  For |lambda| = 1 the form
/// is restricted to E_lambda; otherwise to E_lambda + E_{1/conj(lambda)},
/// where the signature always vanishes.
KreinReport krein_signature_symplectic(const Eigen::MatrixXd& symplectic, Complex lambda);

}  // namespace releq
