#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "parwb/netsim.hpp"

namespace parwb::coll {

using net::Comm;
using net::ProcCtx;

enum class ReduceOp { Sum, Prod, Min, Max, LAnd, LOr, BAnd, BOr, BXor };

std::int64_t apply_op(ReduceOp op, std::int64_t a, std::int64_t b);
std::int64_t identity_of(ReduceOp op);

// Reduction over whole payload vectors; fn must be associative but may be
// non-commutative (algorithms only ever combine adjacent rank ranges in rank
// order).
struct VecOp {
  std::function<std::vector<std::int64_t>(const std::vector<std::int64_t>&,
                                          const std::vector<std::int64_t>&)>
      fn;
  std::function<std::vector<std::int64_t>(std::int64_t len)> identity;
};

// Elementwise lift of a scalar operator; throws DomainError on length
// mismatch.
VecOp vec_op(ReduceOp op);

enum class BcastAlg { Flat, Ring, Binomial };
enum class ScanAlg { Linear, Binomial };

// Every member of comm must call each collective in the same order. Data
// units transferred equal the payload vector lengths.

// Returns root's data everywhere.
std::vector<std::int64_t> bcast(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                std::vector<std::int64_t> data, BcastAlg alg = BcastAlg::Binomial);

// Root returns all blocks concatenated in comm rank order; others empty.
// Local blocks must share one size.
std::vector<std::int64_t> gather(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                 const std::vector<std::int64_t>& local);

// Root supplies p equal blocks of size `block`; every rank returns its own.
std::vector<std::int64_t> scatter(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                  const std::vector<std::int64_t>& data, std::int64_t block);

// All ranks return all blocks in rank order (ring algorithm, p-1 rounds).
std::vector<std::int64_t> allgather(ProcCtx& ctx, const Comm& comm,
                                    const std::vector<std::int64_t>& local);

// local holds p send blocks of size `block`; returns the p received blocks in
// rank order. Pairwise exchange: XOR pairing when p is a power of two,
// rotation otherwise.
std::vector<std::int64_t> alltoall(ProcCtx& ctx, const Comm& comm,
                                   const std::vector<std::int64_t>& local, std::int64_t block);

// Binomial tree over adjacent rank ranges; result in rank fold order at root
// (others empty).
std::vector<std::int64_t> reduce(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                 const std::vector<std::int64_t>& local, const VecOp& op);

// Reduce to rank 0 then binomial bcast.
std::vector<std::int64_t> allreduce(ProcCtx& ctx, const Comm& comm,
                                    const std::vector<std::int64_t>& local, const VecOp& op);

// Reduce to rank 0 then scatter of the p blocks.
std::vector<std::int64_t> reduce_scatter_block(ProcCtx& ctx, const Comm& comm,
                                               const std::vector<std::int64_t>& local,
                                               std::int64_t block, const VecOp& op);

// Rank i returns fold of ranks 0..i.
std::vector<std::int64_t> scan(ProcCtx& ctx, const Comm& comm,
                               const std::vector<std::int64_t>& local, const VecOp& op,
                               ScanAlg alg = ScanAlg::Binomial);

// Rank i returns fold of ranks 0..i-1; rank 0 returns op.identity.
std::vector<std::int64_t> exscan(ProcCtx& ctx, const Comm& comm,
                                 const std::vector<std::int64_t>& local, const VecOp& op,
                                 ScanAlg alg = ScanAlg::Binomial);

// Dissemination barrier, ceil(log2 p) sendrecv rounds; no process exits
// before every process has entered.
void barrier(ProcCtx& ctx, const Comm& comm);

struct Bounds {
  std::int64_t bcast_rounds_lower = 0;  // ceil(log_{k+1} p)
  double alltoall_rounds_lower = 0.0;   // p^2 / (4 * bisection)
};

Bounds collective_bounds(std::int64_t p, std::int64_t k_ports, std::int64_t bisection);

}  // namespace parwb::coll
