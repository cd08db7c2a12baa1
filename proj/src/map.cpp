#include "intermit/map.hpp"

#include <cmath>
#include <string>

namespace intermit {

PMMap PMMap::lsv(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw config_error("PMMap::lsv: alpha must lie in (0,1), got " + std::to_string(alpha));
    return PMMap{alpha, std::pow(2.0, alpha), 0.5};
}

double evaluate(const PMMap& map, double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw config_error("evaluate: x outside [0,1]");
    if (x < map.breakpoint)
        return x * (1.0 + map.c_alpha * std::pow(x, map.alpha));
    return (x - map.breakpoint) / (1.0 - map.breakpoint);
}

double branch_inverse(const PMMap& map, double y, Branch branch) {
    if (branch == Branch::right) {
        if (!(y >= 0.0 && y <= 1.0))
            throw config_error("branch_inverse: y outside [0,1]");
        return map.breakpoint + (1.0 - map.breakpoint) * y;
    }
    if (!(y >= 0.0 && y < 1.0))
        throw config_error("branch_inverse: left branch requires y in [0,1)");
    if (y == 0.0) return 0.0;

    // Bisection-guarded Newton on f(x) = x(1 + c x^a) - y, increasing on [0, x0].
    double lo = 0.0, hi = map.breakpoint;
    double x = 0.5 * hi;
    for (int it = 0; it < 200; ++it) {
        const double xa = std::pow(x, map.alpha);
        const double f = x * (1.0 + map.c_alpha * xa) - y;
        if (f > 0.0) hi = x; else lo = x;
        const double df = 1.0 + map.c_alpha * (1.0 + map.alpha) * xa;
        double xn = x - f / df;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) <= 1e-17 + 1e-16 * x) { x = xn; break; }
        x = xn;
    }
    if (std::abs(evaluate(map, x) - y) > 1e-12)
        throw numerical_error("branch_inverse: left-branch root finding failed to converge");
    return x;
}

double derivative(const PMMap& map, double x, Side side_at_breakpoint) {
    if (!(x >= 0.0 && x <= 1.0))
        throw config_error("derivative: x outside [0,1]");
    const bool left = (x < map.breakpoint) ||
                      (x == map.breakpoint && side_at_breakpoint == Side::left);
    if (left)
        return 1.0 + map.c_alpha * (1.0 + map.alpha) * std::pow(x, map.alpha);
    return 1.0 / (1.0 - map.breakpoint);
}

PreimageSequence preimage_sequence(const PMMap& map, int n) {
    if (n < 1)
        throw config_error("preimage_sequence: n must be >= 1");
    PreimageSequence seq;
    seq.values.reserve(static_cast<size_t>(n) + 1);
    seq.values.push_back(map.breakpoint);
    for (int k = 1; k <= n; ++k) {
        const double xk = branch_inverse(map, seq.values.back(), Branch::left);
        if (std::abs(evaluate(map, xk) - seq.values.back()) > 1e-12)
            throw numerical_error("preimage_sequence: inverse residual exceeds 1e-12");
        seq.values.push_back(xk);
    }
    return seq;
}

std::vector<double> gamma_sequence(const PMMap& map, int n) {
    if (n < 1)
        throw config_error("gamma_sequence: n must be >= 1");
    const PreimageSequence xs = preimage_sequence(map, n - 1 > 0 ? n - 1 : 1);
    std::vector<double> gamma(static_cast<size_t>(n) + 1);
    gamma[0] = 1.0;
    for (int k = 1; k <= n; ++k)
        gamma[k] = branch_inverse(map, xs.values[static_cast<size_t>(k) - 1], Branch::right);
    return gamma;
}

} // namespace intermit
