#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "intermit/map.hpp"
#include "intermit/ulam.hpp"

namespace intermit {

// First-return structure over the base [x0, 1]: column i is the return-time-i
// set Delta_{0,i} = (gamma_i, gamma_{i-1}], gamma_0 = 1.
struct ReturnPartition {
    int n_max;
    std::vector<double> gamma;  // gamma[0..n_max]
    std::vector<double> masses; // masses[i-1] = gamma[i-1] - gamma[i]
};

ReturnPartition build_return_partition(const PMMap& map, int n_max);

// Tower truncated at depth n: everything above level 0 in columns i >= n+1 is
// the hole, so base mass on H_n^1 = [x0, gamma_n) escapes one step after it
// appears. return_matrices[i-1] is the Ulam projection (base bins, row-vector
// convention) of the return branch T^i restricted to Delta_{0,i}; its row sums
// encode the bin fraction lying in Delta_{0,i}, so no separate mask is needed.
struct TruncatedTower {
    int n;
    int base_resolution;
    UniformPartition base;
    double hole_boundary; // gamma_n
    std::vector<double> gamma;
    std::vector<Eigen::SparseMatrix<double, Eigen::RowMajor>> return_matrices;
};

TruncatedTower build_truncated_tower(const PMMap& map, int n, int M);

struct AccimResult {
    int n = 0;
    int M = 0;
    double lambda = 0.0;
    Eigen::VectorXd base_masses; // level-0 bin masses; total tower mass is 1
    UniformPartition base;       // M bins on [x0, 1]
    std::vector<double> gamma;   // gamma[0..n] for support reconstruction
    double hole_mass = 0.0;      // converged mass on H_n^1
    double identity_gap = 0.0;   // |(1 - lambda) - hole_mass|
    double mass_defect = 0.0;    // worst per-step |before - (after + escaped)|
    double residual = 0.0;       // last L1 change of the normalized base
    long iterations = 0;
    bool converged = false;
};

// Conditional fixed-point iteration on the truncated tower via a queue of the
// last n base functions: one step pushes new_base = sum_i q[i-1] * B_i and the
// eigenvalue estimate is (alive mass after)/(alive mass before). Level-l alive
// support is (gamma_n, gamma_l] for l >= 1 and all of [x0,1] for l = 0. The
// full tower eigenfunction is lambda^{-l} times the base on columns of height
// greater than l.
AccimResult accim_fixed_point(const PMMap& map, int n, int M, double tol = 1e-12,
                              long max_iter = 100000);

// Uniform-regularity report across hole depths at fixed M: extremes of the
// reconstructed tower eigenfunction (as density against Lebesgue on the base)
// and the escape-rate ratio -log(lambda_n)/nu(H_n^1).
struct BoundsReport {
    std::vector<int> ns;
    std::vector<double> eig_min;
    std::vector<double> eig_max;
    std::vector<double> escape_ratio;
};

BoundsReport accim_bounds_check(const std::vector<AccimResult>& results);

// Perturbation bookkeeping: minimal n with nu(union of columns past n) <= eps,
// the tail measures eps1 = gamma_n - x0 and eps2 = gamma_n - gamma_{n+1}, and
// the eigenvalue-drop bracket (eps2/eps1, 2*eps2/eps1).
struct TowerEpsilons {
    double eps = 0.0;
    int n = 0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double bound_lo = 0.0;
    double bound_hi = 0.0;
};

TowerEpsilons epsilons(const PMMap& map, double eps);

} // namespace intermit
