#pragma once

#include <vector>

#include "intermit/errors.hpp"

namespace intermit {

enum class Branch { left, right };
enum class Side { left, right };

// Two-branch intermittent interval map on [0,1]:
//   T(x) = x(1 + c_alpha x^alpha)        on [0, breakpoint)   (onto [0,1))
//   T(x) = (x - breakpoint)/(1 - breakpoint) on [breakpoint, 1] (affine onto [0,1])
// T(0) = 0 with T'(0) = 1: the fixed point at 0 is indifferent, so nearby orbits
// leave only polynomially fast. Consistency of the fields requires
// c_alpha = (1 - breakpoint)/breakpoint^{1+alpha} (left branch onto [0,1)).
struct PMMap {
    double alpha;
    double c_alpha;
    double breakpoint;

    // Canonical instance: breakpoint 1/2, c_alpha = 2^alpha,
    // i.e. T(x) = x(1 + 2^alpha x^alpha) and T(x) = 2x - 1.
    static PMMap lsv(double alpha);
};

double evaluate(const PMMap& map, double x);

// Unique x in the branch domain with T(x) = y, to absolute tolerance 1e-14.
// Right branch is closed-form; left branch uses bisection-guarded Newton.
double branch_inverse(const PMMap& map, double y, Branch branch);

// T'(x). The side flag selects the one-sided value at x = breakpoint and is
// ignored elsewhere; the two one-sided values differ there.
double derivative(const PMMap& map, double x, Side side_at_breakpoint);

// x_0 = breakpoint, T(x_k) = x_{k-1} via the left branch; strictly decreasing
// toward 0 with x_k ~ k^{-1/alpha}.
struct PreimageSequence {
    std::vector<double> values; // values[k] = x_k
    int length() const { return static_cast<int>(values.size()) - 1; }
};

PreimageSequence preimage_sequence(const PMMap& map, int n);

// gamma[k] = right-branch preimage of x_{k-1} for k = 1..n, so T(gamma_k) = x_{k-1};
// gamma[0] = 1 by convention. Strictly decreasing toward breakpoint.
std::vector<double> gamma_sequence(const PMMap& map, int n);

} // namespace intermit
