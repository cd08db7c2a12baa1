#pragma once

#include <Eigen/Dense>

#include "intermit/ulam.hpp"

namespace intermit {

// Eigenvector entries are bin masses in the row-vector convention (v <- v*P).
// Leading results: nonnegative entries summing to 1. Second results: zero-sum
// entries with L1 norm 1.
struct SpectralResult {
    double eigenvalue = 0.0;
    Eigen::VectorXd eigenvector;
    double residual = 0.0;    // L1 norm of v*P - lambda*v at the final iterate
    long iterations = 0;
    bool converged = false;
    bool non_real_dominant = false; // second(): estimate oscillated, no real dominant mode
    double max_mean_drift = 0.0;    // second(): worst |sum of entries| seen after re-projection
};

// Power iteration from the uniform start for a row-stochastic matrix; the
// eigenvector is the Ulam invariant density. L1 norm is explicitly reset to 1
// every step.
SpectralResult leading(const UlamMatrix& M, double tol = 1e-10, long max_iter = 1000000);

// Normalized iteration v <- v*P/||v*P||_1 for substochastic P; the eigenvalue is
// the converged norm ratio and the eigenvector approximates the conditionally
// invariant density on the surviving bins.
SpectralResult substochastic_leading(const UlamMatrix& M, double tol = 1e-10,
                                     long max_iter = 1000000);

// Deflated power iteration on the zero-mean subspace. Seed: +1 on bins left of
// 1/2, -1 on the rest. After each multiply the total-mass component is removed
// against the converged stationary vector; the eigenvalue is the signed Rayleigh
// ratio. Persistent sign alternation of the estimate is reported as
// non_real_dominant; |lambda| >= 1 is reported as not converged (reducible input).
SpectralResult second(const UlamMatrix& M, const SpectralResult& stationary,
                      double tol = 1e-10, long max_iter = 1000000);

} // namespace intermit
