#pragma once

#include <stdexcept>
#include <string>

namespace releq {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vector/matrix dimensions do not match the expected shape.
struct DimensionError : Error {
    using Error::Error;
};

/// Two bodies are closer than the collision tolerance.
struct CollisionError : Error {
    using Error::Error;
};

/// Invalid construction parameter (bad mass, alpha out of range, n too small, ...).
struct InvalidArgument : Error {
    using Error::Error;
};

/// The Newton solver ran out of iterations.
struct NoConvergence : Error {
    NoConvergence(int iterations, double residual)
        : Error("central-configuration solver did not converge after " +
                std::to_string(iterations) +
                " iterations (residual " + std::to_string(residual) + ")"),
          iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

/// Two bodies collided while the solver was iterating.
struct CollisionDuringIteration : Error {
    using Error::Error;
};

/// The E1+E2 pairing block is rank deficient.
struct DegenerateBasis : Error {
    using Error::Error;
};

/// Configuration does not sit on the inertia ellipsoid.
struct NotOnEllipsoid : Error {
    using Error::Error;
};

/// Direction is not tangent to the inertia ellipsoid.
struct NotTangent : Error {
    using Error::Error;
};

/// A spectral-flow endpoint is singular.
struct SingularEndpoint : Error {
    using Error::Error;
};

/// The affine path is singular on a whole subinterval.
struct NonIsolatedCrossing : Error {
    using Error::Error;
};

/// The requested instant is not a crossing.
struct NotACrossing : Error {
    using Error::Error;
};

/// A crossing form is degenerate; regular-crossing summation does not apply.
struct DegenerateCrossing : Error {
    explicit DegenerateCrossing(double t)
        : Error("degenerate crossing at t = " + std::to_string(t)), t_star(t) {}
    double t_star;
};

/// The requested value is not an eigenvalue of the given matrix.
struct NotAnEigenvalue : Error {
    using Error::Error;
};

/// Matrix fails the symplectic check S^T J S = J.
struct NotSymplectic : Error {
    using Error::Error;
};

/// Operation defined only for the alpha-homogeneous potential.
struct WrongPotential : Error {
    using Error::Error;
};

/// Problem-file schema or value error.
struct InputError : Error {
    using Error::Error;
};

}  // namespace releq
