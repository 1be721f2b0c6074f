#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "parwb/netsim.hpp"

namespace parwb::apps {

struct AppOpts {
  double alpha = 1.0;
  double beta = 1.0;
  std::int64_t eager = 0;
};

// Fully connected topology with a direct-transfer cost model.
net::SimConfig make_config(std::int64_t p, const AppOpts& opts);

struct IntDist {
  std::vector<std::vector<std::int64_t>> per_rank;
  std::vector<std::int64_t> global;
  net::SimResult sim;
};

struct RealDist {
  std::vector<std::vector<double>> per_rank;
  std::vector<double> global;
  net::SimResult sim;
};

inline constexpr std::int64_t BFS_UNREACHABLE = std::numeric_limits<std::int64_t>::max();
inline constexpr std::int64_t FW_INF = std::numeric_limits<std::int64_t>::max();

// y = A*x with A in p row blocks and x in p blocks; one allgather of x, then
// (m/p)*n local multiply-adds per rank. Requires p | m and p | n.
IntDist matvec_rowwise(const std::vector<std::int64_t>& A, std::int64_t m, std::int64_t n,
                       const std::vector<std::int64_t>& x, std::int64_t p,
                       const AppOpts& opts = {});

// y = A*x with A in p column blocks; local partials of length m reduced and
// scattered by one reduce_scatter_block. Requires p | m and p | n.
IntDist matvec_colwise(const std::vector<std::int64_t>& A, std::int64_t m, std::int64_t n,
                       const std::vector<std::int64_t>& x, std::int64_t p,
                       const AppOpts& opts = {});

// C = A*B on a sqrt(p) x sqrt(p) grid of blocks; sqrt(p) iterations of one
// row-communicator and one column-communicator bcast plus a local fused
// multiply-add. A is m x l, B is l x n. Requires square p with sqrt(p)
// dividing m, l and n.
IntDist summa(const std::vector<std::int64_t>& A, const std::vector<std::int64_t>& B,
              std::int64_t m, std::int64_t l, std::int64_t n, std::int64_t p,
              const AppOpts& opts = {});

// Hypercube-style quicksort: log2(p) levels of pivot selection (median of the
// gathered per-rank medians, bcast from rank 0), pairwise exchange with rank
// +- p/2 (counts then payload), then communicator split. p must be a power of
// two. Output per rank is sorted and globally ordered across ranks.
IntDist dist_quicksort(const std::vector<std::vector<std::int64_t>>& locals,
                       const AppOpts& opts = {});

// Stable distributed counting sort of integer keys in [0, range): one
// Allreduce(Sum) and one Exscan(Sum) over length-range count vectors, then a
// pairwise rotation redistribution into balanced output blocks.
IntDist counting_sort(const std::vector<std::vector<std::int64_t>>& locals, std::int64_t range,
                      const AppOpts& opts = {});

enum class Boundary {
  FixedValues,  // outermost global ring held fixed
  Reflecting    // outside neighbors mirror the cell itself
};

// iters steps of the 5-point average on an n x n grid of reals over a
// sqrt(p) x sqrt(p) block grid; per iteration 4 halo sendrecv exchanges
// (left/right then up/down). eps > 0 adds an Allreduce(LAnd) convergence
// check on local max deltas. Matches stencil_seq bit for bit.
RealDist stencil_iterate(const std::vector<double>& grid, std::int64_t n, std::int64_t p,
                         std::int64_t iters, Boundary boundary = Boundary::FixedValues,
                         double eps = 0.0, const AppOpts& opts = {});

// Single-process reference with the identical summation order
// ((((W+E)+N)+S)+C)/5 and the same convergence rule.
std::vector<double> stencil_seq(std::vector<double> grid, std::int64_t n, std::int64_t iters,
                                Boundary boundary = Boundary::FixedValues, double eps = 0.0);

// Level-wise BFS on an undirected graph with vertices split in p blocks; one
// Allreduce(BOr) frontier-bitmap union per level (K+1 calls for eccentricity
// K). Unreachable vertices get BFS_UNREACHABLE. Requires p | n.
IntDist bfs_levelwise(std::int64_t n,
                      const std::vector<std::pair<std::int64_t, std::int64_t>>& edges,
                      std::int64_t src, std::int64_t p, const AppOpts& opts = {});

// In-place Floyd-Warshall reference on an n x n weight matrix with FW_INF for
// absent edges.
std::vector<std::int64_t> fw_seq(std::vector<std::int64_t> W, std::int64_t n);

}  // namespace parwb::apps
