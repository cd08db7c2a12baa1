#include "intermit/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace intermit {

namespace detail {

void accumulate_preimage_overlaps(const UniformPartition& source,
                                  const std::vector<double>& u,
                                  std::vector<Eigen::Triplet<double>>& out) {
    const int N = source.n_bins;
    const double w = source.width();
    for (int j = 0; j + 1 < static_cast<int>(u.size()); ++j) {
        const double a = u[j], b = u[j + 1];
        if (!(b > a)) continue;
        int i0 = static_cast<int>((a - source.lo) / w);
        int i1 = static_cast<int>((b - source.lo) / w);
        i0 = std::clamp(i0, 0, N - 1);
        i1 = std::clamp(i1, 0, N - 1);
        for (int i = i0; i <= i1; ++i) {
            const double lo = std::max(a, source.edge(i));
            const double hi = std::min(b, source.edge(i + 1));
            if (hi > lo) out.emplace_back(i, j, (hi - lo) / w);
        }
    }
}

namespace {

// Branch inverses of all partition edges, clamped into [clip_lo, clip_hi].
// Exact at the range endpoints: left branch covers [0,1) so edge 1.0 maps to the
// breakpoint, right branch covers [0,1].
std::vector<double> inverse_edges(const PMMap& map, const UniformPartition& cols,
                                  Branch branch, double clip_lo, double clip_hi) {
    const int N = cols.n_bins;
    std::vector<double> u(static_cast<size_t>(N) + 1);
    for (int j = 0; j <= N; ++j) {
        const double y = cols.edge(j);
        double x;
        if (branch == Branch::left)
            x = (y >= 1.0) ? map.breakpoint : branch_inverse(map, y, Branch::left);
        else
            x = branch_inverse(map, y, Branch::right);
        u[static_cast<size_t>(j)] = std::clamp(x, clip_lo, clip_hi);
    }
    return u;
}

} // namespace

} // namespace detail

UlamMatrix assemble(const PMMap& map, int N) {
    if (N < 2) throw config_error("assemble: N must be >= 2");
    const UniformPartition part{N, 0.0, 1.0};
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(8) * N);
    for (Branch br : {Branch::left, Branch::right}) {
        const std::vector<double> u = detail::inverse_edges(map, part, br, 0.0, 1.0);
        detail::accumulate_preimage_overlaps(part, u, trip);
    }
    UlamMatrix M;
    M.partition = part;
    M.kind = MatrixKind::closed;
    M.map_alpha = map.alpha;
    M.P.resize(N, N);
    M.P.setFromTriplets(trip.begin(), trip.end());
    M.P.makeCompressed();
    return M;
}

UlamMatrix open_submatrix(const UlamMatrix& closed, const std::vector<int>& hole_bins) {
    if (hole_bins.empty()) return closed;
    const int N = closed.dim();
    std::vector<char> in_hole(static_cast<size_t>(N), 0);
    for (int b : hole_bins) {
        if (b < 0 || b >= N) throw config_error("open_submatrix: hole bin index out of range");
        in_hole[static_cast<size_t>(b)] = 1;
    }
    std::vector<int> surviving;
    std::vector<int> new_index(static_cast<size_t>(N), -1);
    for (int i = 0; i < N; ++i) {
        if (!in_hole[static_cast<size_t>(i)]) {
            new_index[static_cast<size_t>(i)] = static_cast<int>(surviving.size());
            surviving.push_back(i);
        }
    }
    if (surviving.empty()) throw config_error("open_submatrix: hole covers every bin");

    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < N; ++i) {
        if (in_hole[static_cast<size_t>(i)]) continue;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(closed.P, i); it; ++it) {
            const int j = static_cast<int>(it.col());
            if (in_hole[static_cast<size_t>(j)]) continue;
            trip.emplace_back(new_index[static_cast<size_t>(i)],
                              new_index[static_cast<size_t>(j)], it.value());
        }
    }
    UlamMatrix M;
    M.partition = closed.partition;
    M.kind = MatrixKind::open;
    M.map_alpha = closed.map_alpha;
    M.surviving = std::move(surviving);
    const int S = static_cast<int>(M.surviving.size());
    M.P.resize(S, S);
    M.P.setFromTriplets(trip.begin(), trip.end());
    M.P.makeCompressed();
    return M;
}

UlamMatrix averaged_operator(const UlamMatrix& closed, const PMMap& map, double eps0) {
    if (closed.kind != MatrixKind::closed)
        throw config_error("averaged_operator: input must be a closed matrix");
    const int N = closed.dim();
    const double k_real = eps0 * N;
    const int k = static_cast<int>(std::lround(k_real));
    if (std::abs(k_real - k) > 1e-9 * N)
        throw config_error("averaged_operator: eps0 is not aligned to a bin boundary");
    if (k < 0 || k >= N) throw config_error("averaged_operator: eps0 outside (0,1)");
    if (k == 0) return closed;

    // rho bin masses: pull [0,eps0) back through the right branch; eps1 is the
    // Lebesgue measure of that pullback.
    const double inv0 = branch_inverse(map, 0.0, Branch::right);
    const double eps1 = branch_inverse(map, eps0, Branch::right) - inv0;
    std::vector<double> rho(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) {
        const double a = branch_inverse(map, closed.partition.edge(j), Branch::right);
        const double b = branch_inverse(map, std::min(closed.partition.edge(j + 1), eps0),
                                        Branch::right);
        rho[static_cast<size_t>(j)] = (b - a) / eps1;
    }

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(closed.P.nonZeros()) + static_cast<size_t>(k) * N);
    for (int i = 0; i < N; ++i) {
        double pooled = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(closed.P, i); it; ++it) {
            if (static_cast<int>(it.col()) < k) pooled += it.value();
            else trip.emplace_back(i, static_cast<int>(it.col()), it.value());
        }
        if (pooled > 0.0)
            for (int j = 0; j < k; ++j)
                trip.emplace_back(i, j, pooled * rho[static_cast<size_t>(j)]);
    }
    UlamMatrix M;
    M.partition = closed.partition;
    M.kind = MatrixKind::averaged;
    M.map_alpha = closed.map_alpha;
    M.eps0 = eps0;
    M.P.resize(N, N);
    M.P.setFromTriplets(trip.begin(), trip.end());
    M.P.makeCompressed();
    return M;
}

UlamMatrix assemble_open_exact(const PMMap& map, int N, double hole_end) {
    if (N < 2) throw config_error("assemble_open_exact: N must be >= 2");
    if (!(hole_end > 0.0 && hole_end < 1.0))
        throw config_error("assemble_open_exact: hole_end must lie in (0,1)");
    const UniformPartition part{N, hole_end, 1.0};
    std::vector<Eigen::Triplet<double>> trip;
    for (Branch br : {Branch::left, Branch::right}) {
        // clamp into the survivor interval: preimage mass below hole_end escapes
        const std::vector<double> u = detail::inverse_edges(map, part, br, hole_end, 1.0);
        detail::accumulate_preimage_overlaps(part, u, trip);
    }
    UlamMatrix M;
    M.partition = part;
    M.kind = MatrixKind::open;
    M.map_alpha = map.alpha;
    M.P.resize(N, N);
    M.P.setFromTriplets(trip.begin(), trip.end());
    M.P.makeCompressed();
    return M;
}

namespace {

const char* kind_name(MatrixKind k) {
    switch (k) {
        case MatrixKind::closed: return "closed";
        case MatrixKind::open: return "open";
        case MatrixKind::averaged: return "averaged";
    }
    return "unknown";
}

MatrixKind kind_from(const std::string& s) {
    if (s == "closed") return MatrixKind::closed;
    if (s == "open") return MatrixKind::open;
    if (s == "averaged") return MatrixKind::averaged;
    throw io_error("load: unknown matrix kind '" + s + "'");
}

uint64_t fnv1a(uint64_t h, const std::string& line) {
    for (unsigned char c : line) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= '\n';
    h *= 1099511628211ULL;
    return h;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void save(const UlamMatrix& M, const std::string& path) {
    std::vector<std::string> data_lines;
    data_lines.reserve(static_cast<size_t>(M.P.nonZeros()) + 1);
    {
        std::ostringstream head;
        head << M.P.rows() << " " << M.P.cols() << " " << M.P.nonZeros();
        data_lines.push_back(head.str());
    }
    for (int i = 0; i < M.P.outerSize(); ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(M.P, i); it; ++it) {
            std::ostringstream line;
            line << (i + 1) << " " << (it.col() + 1) << " " << fmt17(it.value());
            data_lines.push_back(line.str());
        }
    uint64_t checksum = 14695981039346656037ULL;
    for (const std::string& l : data_lines) checksum = fnv1a(checksum, l);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("save: cannot open '" + path + "' for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << "% map=lsv alpha=" << fmt17(M.map_alpha) << " N=" << M.partition.n_bins
        << " kind=" << kind_name(M.kind) << "\n";
    out << "% domain=" << fmt17(M.partition.lo) << " " << fmt17(M.partition.hi) << "\n";
    if (M.kind == MatrixKind::averaged) out << "% eps0=" << fmt17(M.eps0) << "\n";
    char cs[32];
    std::snprintf(cs, sizeof(cs), "%016llx", static_cast<unsigned long long>(checksum));
    out << "% checksum=" << cs << "\n";
    for (const std::string& l : data_lines) out << l << "\n";
    if (!out) throw io_error("save: write to '" + path + "' failed");
}

UlamMatrix load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("load: cannot open '" + path + "'");
    UlamMatrix M;
    std::string line;
    int lineno = 0;
    auto parse_fail = [&](const std::string& why) -> io_error {
        return io_error("load: " + why + " at line " + std::to_string(lineno) +
                        " of '" + path + "'");
    };

    if (!std::getline(in, line)) throw parse_fail("empty file");
    ++lineno;
    if (line.rfind("%%MatrixMarket matrix coordinate real", 0) != 0)
        throw parse_fail("missing MatrixMarket banner");

    bool have_meta = false;
    uint64_t stored_checksum = 0;
    bool have_checksum = false;
    while (in.peek() == '%') {
        if (!std::getline(in, line)) break;
        ++lineno;
        std::istringstream ls(line.substr(1));
        std::string tok;
        while (ls >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "alpha") M.map_alpha = std::stod(val);
            else if (key == "N") { M.partition.n_bins = std::stoi(val); have_meta = true; }
            else if (key == "kind") M.kind = kind_from(val);
            else if (key == "eps0") M.eps0 = std::stod(val);
            else if (key == "domain") {
                M.partition.lo = std::stod(val);
                double hi;
                if (ls >> hi) M.partition.hi = hi;
            } else if (key == "checksum") {
                stored_checksum = std::stoull(val, nullptr, 16);
                have_checksum = true;
            }
        }
    }
    if (!have_meta) throw parse_fail("missing metadata header (N=...)");

    uint64_t checksum = 14695981039346656037ULL;
    if (!std::getline(in, line)) throw parse_fail("missing size line");
    ++lineno;
    checksum = fnv1a(checksum, line);
    long rows = 0, cols = 0, nnz = 0;
    {
        std::istringstream ls(line);
        if (!(ls >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 || nnz < 0)
            throw parse_fail("malformed size line");
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(nnz));
    for (long e = 0; e < nnz; ++e) {
        if (!std::getline(in, line)) throw parse_fail("truncated file (expected more entries)");
        ++lineno;
        checksum = fnv1a(checksum, line);
        long i = 0, j = 0;
        double v = 0.0;
        std::istringstream ls(line);
        if (!(ls >> i >> j >> v)) throw parse_fail("malformed entry");
        if (i < 1 || i > rows || j < 1 || j > cols) throw parse_fail("index out of bounds");
        trip.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    }
    if (have_checksum && checksum != stored_checksum)
        throw io_error("load: checksum mismatch in '" + path + "'");

    M.P.resize(rows, cols);
    M.P.setFromTriplets(trip.begin(), trip.end());
    M.P.makeCompressed();
    return M;
}

} // namespace intermit
