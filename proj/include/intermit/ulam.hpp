#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "intermit/map.hpp"

namespace intermit {

// N equal bins covering [lo, hi]; bin i = [edge(i), edge(i+1)), last bin closed.
struct UniformPartition {
    int n_bins;
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return (hi - lo) / n_bins; }
    double edge(int i) const { return lo + (hi - lo) * i / n_bins; }
    double midpoint(int i) const { return lo + (hi - lo) * (i + 0.5) / n_bins; }
};

enum class MatrixKind { closed, open, averaged };

// Row-stochastic (closed/averaged) or substochastic (open) Ulam matrix in the
// row-vector convention: densities are row vectors, one step is v <- v * P.
// For kind == open produced by open_submatrix, `surviving` maps matrix index to
// the original 0-based bin index; otherwise it is empty and rows are indexed by
// `partition` directly.
struct UlamMatrix {
    UniformPartition partition;
    Eigen::SparseMatrix<double, Eigen::RowMajor> P;
    MatrixKind kind = MatrixKind::closed;
    double map_alpha = 0.0;
    std::vector<int> surviving;
    double eps0 = 0.0; // right edge of the averaging region (averaged only)

    int dim() const { return static_cast<int>(P.rows()); }
};

// Exact assembly, no quadrature: P_ij = leb(J_i ∩ T^{-1}J_j)/leb(J_i), where per
// branch T^{-1}J_j is the interval between branch inverses of the bin edges.
UlamMatrix assemble(const PMMap& map, int N);

// Restriction to surviving rows and columns; hole_bins are 0-based bin indices.
// Empty hole returns the input unchanged; a hole covering every bin is invalid.
UlamMatrix open_submatrix(const UlamMatrix& closed, const std::vector<int>& hole_bins);

// One transfer step followed by averaging over [0, eps0): column mass landing in
// the region is pooled per row and redistributed across the region bins with
// weights leb(T_right^{-1}(J_j ∩ [0,eps0)))/eps1, eps1 = leb(T_right^{-1}[0,eps0)).
// eps0 must sit on a bin boundary. Result stays row-stochastic.
UlamMatrix averaged_operator(const UlamMatrix& closed, const PMMap& map, double eps0);

// Substochastic Ulam matrix of the open system with exact hole [0, hole_end):
// uniform bins on the survivor interval [hole_end, 1], preimage mass that falls
// in the hole is dropped.
UlamMatrix assemble_open_exact(const PMMap& map, int N, double hole_end);

// Matrix Market coordinate text with a metadata comment header; 17 significant
// digits, 1-based indices, FNV-1a checksum over the data lines.
void save(const UlamMatrix& M, const std::string& path);
UlamMatrix load(const std::string& path);

namespace detail {

// Append overlap fractions (row, col, leb(J_i ∩ [u_j, u_{j+1}])/width) for an
// increasing endpoint sequence u of column preimages against `source` bins.
// u values must already be clamped into [source.lo, source.hi].
void accumulate_preimage_overlaps(const UniformPartition& source,
                                  const std::vector<double>& u,
                                  std::vector<Eigen::Triplet<double>>& out);

} // namespace detail

} // namespace intermit
