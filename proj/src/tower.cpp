#include "intermit/tower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace intermit {

ReturnPartition build_return_partition(const PMMap& map, int n_max) {
    if (n_max < 2) throw config_error("build_return_partition: n_max must be >= 2");
    ReturnPartition rp;
    rp.n_max = n_max;
    rp.gamma = gamma_sequence(map, n_max);
    rp.masses.resize(static_cast<size_t>(n_max));
    for (int i = 1; i <= n_max; ++i)
        rp.masses[static_cast<size_t>(i) - 1] =
            rp.gamma[static_cast<size_t>(i) - 1] - rp.gamma[static_cast<size_t>(i)];
    return rp;
}

TruncatedTower build_truncated_tower(const PMMap& map, int n, int M) {
    if (n < 2) throw config_error("build_truncated_tower: n must be >= 2");
    if (M < 16) throw config_error("build_truncated_tower: M must be >= 16");

    TruncatedTower tw;
    tw.n = n;
    tw.base_resolution = M;
    tw.base = UniformPartition{M, map.breakpoint, 1.0};
    tw.gamma = gamma_sequence(map, n);
    tw.hole_boundary = tw.gamma[static_cast<size_t>(n)];
    tw.return_matrices.reserve(static_cast<size_t>(n));

    // chain[j] = left-inverse iterates of base edge j; at column i the composed
    // return inverse is right_inverse(chain) and maps [x0,1] onto Delta_{0,i}
    std::vector<double> chain(static_cast<size_t>(M) + 1);
    for (int j = 0; j <= M; ++j) chain[static_cast<size_t>(j)] = tw.base.edge(j);

    for (int i = 1; i <= n; ++i) {
        if (i > 1) {
            for (int j = 0; j <= M; ++j) {
                double& z = chain[static_cast<size_t>(j)];
                z = (z >= 1.0) ? map.breakpoint : branch_inverse(map, z, Branch::left);
            }
        }
        std::vector<double> u(static_cast<size_t>(M) + 1);
        for (int j = 0; j <= M; ++j)
            u[static_cast<size_t>(j)] = branch_inverse(map, chain[static_cast<size_t>(j)],
                                                       Branch::right);
        // pin the exact column endpoints, clamp the interior
        u[0] = tw.gamma[static_cast<size_t>(i)];
        u[static_cast<size_t>(M)] = tw.gamma[static_cast<size_t>(i) - 1];
        for (int j = 1; j < M; ++j)
            u[static_cast<size_t>(j)] =
                std::clamp(u[static_cast<size_t>(j)], u[0], u[static_cast<size_t>(M)]);

        std::vector<Eigen::Triplet<double>> trip;
        detail::accumulate_preimage_overlaps(tw.base, u, trip);
        Eigen::SparseMatrix<double, Eigen::RowMajor> B(M, M);
        B.setFromTriplets(trip.begin(), trip.end());
        B.makeCompressed();
        tw.return_matrices.push_back(std::move(B));
    }
    return tw;
}

namespace {

long double dot_ld(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    long double s = 0.0L;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        s += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
    return s;
}

} // namespace

AccimResult accim_fixed_point(const PMMap& map, int n, int M, double tol, long max_iter) {
    const TruncatedTower tw = build_truncated_tower(map, n, M);
    const double w = tw.base.width();

    // Per-bin alive-support weights per level, accumulated backward so that
    // rowsum(B_{l+1}) + weight[l+1] == weight[l] holds exactly in floating point;
    // this makes the step-wise mass identity exact by construction.
    std::vector<Eigen::VectorXd> rowsum(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const auto& B = tw.return_matrices[static_cast<size_t>(i) - 1];
        Eigen::VectorXd rs = Eigen::VectorXd::Zero(M);
        for (int r = 0; r < M; ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(B, r); it; ++it)
                rs[r] += it.value();
        rowsum[static_cast<size_t>(i) - 1] = std::move(rs);
    }
    std::vector<Eigen::VectorXd> weight(static_cast<size_t>(n) + 1);
    weight[static_cast<size_t>(n)] = Eigen::VectorXd::Zero(M);
    for (int l = n - 1; l >= 1; --l)
        weight[static_cast<size_t>(l)] =
            rowsum[static_cast<size_t>(l)] + weight[static_cast<size_t>(l) + 1];
    const Eigen::VectorXd covered = rowsum[0] + weight[1]; // fraction not escaping
    weight[0] = Eigen::VectorXd::Ones(M);
    const Eigen::VectorXd hole_frac = Eigen::VectorXd::Ones(M) - covered;

    AccimResult res;
    res.n = n;
    res.M = M;
    res.base = tw.base;
    res.gamma = tw.gamma;

    std::vector<Eigen::VectorXd> q(static_cast<size_t>(n), Eigen::VectorXd::Constant(M, w));
    {
        long double tot = 0.0L;
        for (int l = 0; l < n; ++l) tot += dot_ld(q[static_cast<size_t>(l)], weight[static_cast<size_t>(l)]);
        for (auto& v : q) v /= static_cast<double>(tot);
    }

    Eigen::VectorXd prev_dir = q[0] / q[0].lpNorm<1>();
    double lambda_prev = 0.0;
    for (long it = 1; it <= max_iter; ++it) {
        long double before = 0.0L;
        for (int l = 0; l < n; ++l)
            before += dot_ld(q[static_cast<size_t>(l)], weight[static_cast<size_t>(l)]);
        const long double escaped = dot_ld(q[0], hole_frac);

        Eigen::VectorXd nb = Eigen::VectorXd::Zero(M);
        for (int i = 1; i <= n; ++i)
            nb += tw.return_matrices[static_cast<size_t>(i) - 1].transpose() *
                  q[static_cast<size_t>(i) - 1];
        // rotate the queue: new base in front, oldest level drops off
        for (int l = n - 1; l >= 1; --l) q[static_cast<size_t>(l)].swap(q[static_cast<size_t>(l) - 1]);
        q[0] = std::move(nb);

        long double after = 0.0L;
        for (int l = 0; l < n; ++l)
            after += dot_ld(q[static_cast<size_t>(l)], weight[static_cast<size_t>(l)]);

        res.mass_defect = std::max(res.mass_defect,
                                   std::abs(static_cast<double>(before - (after + escaped))));
        if (!(after > 0.0L))
            throw numerical_error("accim_fixed_point: tower mass underflow (hole too large)");
        const double lambda = static_cast<double>(after / before);
        for (auto& v : q) v /= static_cast<double>(after);

        Eigen::VectorXd dir = q[0] / q[0].lpNorm<1>();
        const double diff = (dir - prev_dir).lpNorm<1>();
        prev_dir.swap(dir);

        res.lambda = lambda;
        res.iterations = it;
        res.residual = diff;
        if (it > n + 2 && diff < tol && std::abs(lambda - lambda_prev) < tol) {
            res.converged = true;
            break;
        }
        lambda_prev = lambda;
    }

    res.hole_mass = static_cast<double>(dot_ld(q[0], hole_frac));
    res.identity_gap = std::abs((1.0 - res.lambda) - res.hole_mass);
    res.base_masses = q[0];
    return res;
}

BoundsReport accim_bounds_check(const std::vector<AccimResult>& results) {
    if (results.empty())
        throw config_error("accim_bounds_check: results must not be empty");
    BoundsReport rep;
    for (const AccimResult& r : results) {
        if (r.n < 2) throw config_error("accim_bounds_check: degenerate depth n < 2");
        const double w = r.base.width();
        const double gn = r.gamma[static_cast<size_t>(r.n)];
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        double factor = 1.0; // lambda^{-l}
        for (int l = 0; l < r.n; ++l) {
            const double a = (l == 0) ? r.base.lo : gn;
            const double b = r.gamma[static_cast<size_t>(l)];
            for (int j = 0; j < r.M; ++j) {
                const double overlap = std::min(b, r.base.edge(j + 1)) -
                                       std::max(a, r.base.edge(j));
                if (overlap <= 1e-15) continue;
                const double val = factor * r.base_masses[j] / w;
                lo = std::min(lo, val);
                hi = std::max(hi, val);
            }
            factor /= r.lambda;
        }
        rep.ns.push_back(r.n);
        rep.eig_min.push_back(lo);
        rep.eig_max.push_back(hi);
        rep.escape_ratio.push_back(-std::log(r.lambda) / (gn - r.base.lo));
    }
    return rep;
}

TowerEpsilons epsilons(const PMMap& map, double eps) {
    if (!(eps > 0.0 && eps < 1.0 - map.breakpoint))
        throw config_error("epsilons: eps must lie in (0, 1 - breakpoint)");
    TowerEpsilons te;
    te.eps = eps;
    // nu(columns past n) = gamma_n - x0 = (1-x0) x_{n-1}; walk the preimage
    // sequence until the tail measure drops to eps
    const double scale = 1.0 - map.breakpoint;
    double x = map.breakpoint; // x_0
    int n = 1;
    while (scale * x > eps) {
        x = branch_inverse(map, x, Branch::left);
        ++n;
        if (n > 100000000)
            throw numerical_error("epsilons: tail measure failed to reach eps");
    }
    // here x = x_{n-1} with (1-x0) x_{n-1} <= eps minimal
    if (n < 2) throw config_error("epsilons: eps too large (n < 2)");
    const double xn = branch_inverse(map, x, Branch::left); // x_n
    te.n = n;
    te.eps1 = scale * x;
    te.eps2 = scale * (x - xn);
    te.bound_lo = te.eps2 / te.eps1;
    te.bound_hi = 2.0 * te.eps2 / te.eps1;
    return te;
}

} // namespace intermit
