#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "intermit/map.hpp"
#include "intermit/ulam.hpp"

namespace intermit {

// Two-state Markov model over {[0,eps0], (eps0,1]} with Lebesgue-conditional
// transition rates; eigenvalues are exactly 1 and 1-a-b.
struct TwoStateModel {
    double eps0 = 0.0;
    double a = 0.0; // exit rate of [0,eps0]
    double b = 0.0; // entry rate from (eps0,1]
    Eigen::Matrix2d matrix;
    double lambda2 = 0.0;
    Eigen::Vector2d invariant; // proportional to (b, a), normalized to sum 1
};

TwoStateModel two_state(const PMMap& map, double eps0);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> log_points; // (log x, log y)
};

// Ordinary least squares on (log x, log y); requires >= 3 strictly positive points.
ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points);

// Half the L1 distance between two bin-mass probability vectors; when the sizes
// differ the coarser vector is refined by splitting each mass uniformly, so the
// coarse bin count must divide the fine one.
double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// Lebesgue measure of the k-step survivor set of [0, eps0] for k = 0..K, where
// eps0 must equal some x_j of the preimage sequence; entry k is x_{j+k}.
// Decay is polynomial (successive ratios tend to 1), never geometric.
std::vector<double> escape_profile(const PMMap& map, double eps0, int K);

// One row of the gap-versus-bracket comparison: the plain and averaged Ulam
// second-eigenvalue drops against the bracket (eps2/eps1, 2 eps2/eps1) at the
// paired perturbation eps = 1/(N T'(x0+)). M > 0 adds the truncated-tower
// eigenvalue drop at depth n(eps) as a cross-check column. ref_* columns carry
// published benchmark values (alpha = 1/2 grid only, NaN elsewhere); the
// original experiments used a different concrete map instance, so they match
// in scaling, not digits.
struct Table1Row {
    int N = 0;
    bool ok = false;
    std::string error;
    double one_minus_lambda2 = 0.0;
    double one_minus_lambda2_avg = 0.0;
    int n_eps = 0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double bound_lo = 0.0;
    double bound_hi = 0.0;
    double one_minus_lambda_tower = 0.0; // NaN when M == 0
    double ref_one_minus_lambda2 = 0.0;  // NaN when unknown
    double ref_bound_lo = 0.0;           // NaN when unknown
};

std::vector<Table1Row> table1(const PMMap& map, const std::vector<int>& Ns, int M,
                              double tol = 1e-10, long max_iter = 1000000);

// Log-log slope of per-bin density (mass/width) against bin midpoint over the
// window [first_bin, last_bin]; the window must start past bin 0 and span at
// least a decade of midpoints.
double density_tail_slope(const Eigen::VectorXd& masses, const UniformPartition& part,
                          int first_bin, int last_bin);

} // namespace intermit
