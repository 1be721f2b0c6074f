#include "parwb/collectives.hpp"

#include <algorithm>
#include <limits>

#include "parwb/errors.hpp"

namespace parwb::coll {

namespace {

using net::ANY_TAG;
using net::Payload;
using net::PROC_NULL;
using net::Status;

std::int64_t ceil_log2(std::int64_t n) {
  std::int64_t r = 0, v = 1;
  while (v < n) {
    v <<= 1;
    ++r;
  }
  return r;
}

std::int64_t my_rank(ProcCtx& ctx, const Comm& comm) {
  std::int64_t r = comm.rank_of_world(ctx.world_rank());
  require(r >= 0, "collective: caller not a member of the communicator");
  return r;
}

Payload ints(std::vector<std::int64_t> v) {
  Payload p;
  p.ints = std::move(v);
  return p;
}

// -- unmarked algorithm bodies; composites reuse them under one marker -------

std::vector<std::int64_t> bcast_impl(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                     std::vector<std::int64_t> data, BcastAlg alg,
                                     std::int64_t tag) {
  std::int64_t p = comm.size();
  require(root >= 0 && root < p, "bcast: invalid root");
  std::int64_t r = my_rank(ctx, comm);
  std::int64_t vr = (r - root + p) % p;  // virtual rank: root becomes 0
  auto real = [&](std::int64_t v) { return (v + root) % p; };
  std::vector<std::int64_t> buf = r == root ? std::move(data) : std::vector<std::int64_t>{};
  std::int64_t m = 0;
  if (r == root) m = static_cast<std::int64_t>(buf.size());

  switch (alg) {
    case BcastAlg::Flat:
      if (r == root) {
        for (std::int64_t v = 1; v < p; ++v) ctx.send(comm, real(v), tag, m, ints(buf));
      } else {
        buf = ctx.recv(comm, root, tag).payload.ints;
      }
      break;
    case BcastAlg::Ring:
      if (vr > 0) buf = ctx.recv(comm, real(vr - 1), tag).payload.ints;
      if (vr + 1 < p)
        ctx.send(comm, real(vr + 1), tag, static_cast<std::int64_t>(buf.size()), ints(buf));
      break;
    case BcastAlg::Binomial:
      for (std::int64_t step = 1; step < p; step <<= 1) {
        if (vr < step) {
          if (vr + step < p)
            ctx.send(comm, real(vr + step), tag, static_cast<std::int64_t>(buf.size()),
                     ints(buf));
        } else if (vr < 2 * step) {
          buf = ctx.recv(comm, real(vr - step), tag).payload.ints;
        }
      }
      break;
  }
  return buf;
}

std::vector<std::int64_t> gather_impl(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                      const std::vector<std::int64_t>& local, std::int64_t tag) {
  std::int64_t p = comm.size();
  require(root >= 0 && root < p, "gather: invalid root");
  std::int64_t r = my_rank(ctx, comm);
  std::int64_t vr = (r - root + p) % p;
  auto real = [&](std::int64_t v) { return (v + root) % p; };
  std::int64_t block = static_cast<std::int64_t>(local.size());
  std::vector<std::int64_t> buf = local;  // contiguous virtual-rank range starting at vr
  for (std::int64_t step = 1; step < p; step <<= 1) {
    if (vr % (2 * step) == step) {
      ctx.send(comm, real(vr - step), tag, static_cast<std::int64_t>(buf.size()), ints(buf));
      buf.clear();
      break;
    }
    if (vr % (2 * step) == 0 && vr + step < p) {
      std::vector<std::int64_t> upper = ctx.recv(comm, real(vr + step), tag).payload.ints;
      buf.insert(buf.end(), upper.begin(), upper.end());
    }
  }
  if (r != root) return {};
  // buf holds blocks in virtual rank order; rotate into comm rank order.
  require(static_cast<std::int64_t>(buf.size()) == p * block, "gather: block size mismatch");
  std::vector<std::int64_t> out(buf.size());
  for (std::int64_t v = 0; v < p; ++v)
    std::copy(buf.begin() + v * block, buf.begin() + (v + 1) * block,
              out.begin() + real(v) * block);
  return out;
}

std::vector<std::int64_t> scatter_impl(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                       const std::vector<std::int64_t>& data, std::int64_t block,
                                       std::int64_t tag) {
  std::int64_t p = comm.size();
  require(root >= 0 && root < p, "scatter: invalid root");
  require(block >= 0, "scatter: negative block");
  std::int64_t r = my_rank(ctx, comm);
  std::int64_t vr = (r - root + p) % p;
  auto real = [&](std::int64_t v) { return (v + root) % p; };
  std::vector<std::int64_t> buf;
  if (r == root) {
    require(static_cast<std::int64_t>(data.size()) == p * block, "scatter: data size mismatch");
    buf.resize(data.size());
    for (std::int64_t v = 0; v < p; ++v)
      std::copy(data.begin() + real(v) * block, data.begin() + (real(v) + 1) * block,
                buf.begin() + v * block);
  }
  std::int64_t top = ceil_log2(std::max<std::int64_t>(1, p));
  for (std::int64_t s = top - 1; s >= 0; --s) {
    std::int64_t step = std::int64_t{1} << s;
    if (vr % (2 * step) == 0) {
      if (vr + step < p && !buf.empty()) {
        std::int64_t len = std::min(2 * step, p - vr);  // blocks currently held
        std::vector<std::int64_t> upper(buf.begin() + step * block, buf.begin() + len * block);
        ctx.send(comm, real(vr + step), tag, static_cast<std::int64_t>(upper.size()),
                 ints(upper));
        buf.resize(step * block);
      }
    } else if (vr % (2 * step) == step) {
      buf = ctx.recv(comm, real(vr - step), tag).payload.ints;
    }
  }
  return buf;
}

std::vector<std::int64_t> reduce_impl(ProcCtx& ctx, const Comm& comm,
                                      const std::vector<std::int64_t>& local, const VecOp& op,
                                      std::int64_t tag) {
  // Adjacent-range binomial combine; rank 0 ends with the rank-order fold.
  std::int64_t p = comm.size();
  std::int64_t r = my_rank(ctx, comm);
  std::vector<std::int64_t> acc = local;
  for (std::int64_t step = 1; step < p; step <<= 1) {
    if (r % (2 * step) == step) {
      ctx.send(comm, r - step, tag, static_cast<std::int64_t>(acc.size()), ints(acc));
      acc.clear();
      break;
    }
    if (r % (2 * step) == 0 && r + step < p) {
      std::vector<std::int64_t> right = ctx.recv(comm, r + step, tag).payload.ints;
      acc = op.fn(acc, right);  // own range is the lower-rank (left) operand
    }
  }
  return acc;  // meaningful at rank 0 only
}

}  // namespace

std::int64_t apply_op(ReduceOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case ReduceOp::Sum:
      return a + b;
    case ReduceOp::Prod:
      return a * b;
    case ReduceOp::Min:
      return std::min(a, b);
    case ReduceOp::Max:
      return std::max(a, b);
    case ReduceOp::LAnd:
      return (a != 0 && b != 0) ? 1 : 0;
    case ReduceOp::LOr:
      return (a != 0 || b != 0) ? 1 : 0;
    case ReduceOp::BAnd:
      return a & b;
    case ReduceOp::BOr:
      return a | b;
    case ReduceOp::BXor:
      return a ^ b;
  }
  return 0;
}

std::int64_t identity_of(ReduceOp op) {
  switch (op) {
    case ReduceOp::Sum:
      return 0;
    case ReduceOp::Prod:
      return 1;
    case ReduceOp::Min:
      return std::numeric_limits<std::int64_t>::max();
    case ReduceOp::Max:
      return std::numeric_limits<std::int64_t>::min();
    case ReduceOp::LAnd:
      return 1;
    case ReduceOp::LOr:
      return 0;
    case ReduceOp::BAnd:
      return -1;
    case ReduceOp::BOr:
      return 0;
    case ReduceOp::BXor:
      return 0;
  }
  return 0;
}

VecOp vec_op(ReduceOp op) {
  VecOp v;
  v.fn = [op](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    require(a.size() == b.size(), "reduction: length mismatch");
    std::vector<std::int64_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = apply_op(op, a[i], b[i]);
    return out;
  };
  v.identity = [op](std::int64_t len) {
    return std::vector<std::int64_t>(static_cast<std::size_t>(len), identity_of(op));
  };
  return v;
}

std::vector<std::int64_t> bcast(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                std::vector<std::int64_t> data, BcastAlg alg) {
  std::int64_t tag = ctx.coll_begin(comm, "bcast");
  auto out = bcast_impl(ctx, comm, root, std::move(data), alg, tag);
  ctx.coll_end(comm, "bcast", tag);
  return out;
}

std::vector<std::int64_t> gather(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                 const std::vector<std::int64_t>& local) {
  std::int64_t tag = ctx.coll_begin(comm, "gather");
  auto out = gather_impl(ctx, comm, root, local, tag);
  ctx.coll_end(comm, "gather", tag);
  return out;
}

std::vector<std::int64_t> scatter(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                  const std::vector<std::int64_t>& data, std::int64_t block) {
  std::int64_t tag = ctx.coll_begin(comm, "scatter");
  auto out = scatter_impl(ctx, comm, root, data, block, tag);
  ctx.coll_end(comm, "scatter", tag);
  return out;
}

std::vector<std::int64_t> allgather(ProcCtx& ctx, const Comm& comm,
                                    const std::vector<std::int64_t>& local) {
  std::int64_t tag = ctx.coll_begin(comm, "allgather");
  std::int64_t p = comm.size();
  std::int64_t r = my_rank(ctx, comm);
  std::int64_t block = static_cast<std::int64_t>(local.size());
  std::vector<std::int64_t> out(p * block);
  std::copy(local.begin(), local.end(), out.begin() + r * block);
  std::vector<std::int64_t> cur = local;
  for (std::int64_t t = 0; t + 1 < p; ++t) {
    std::int64_t recv_idx = ((r - t - 1) % p + p) % p;
    Status st = ctx.sendrecv(comm, (r + 1) % p, tag, block, ints(cur), (r - 1 + p) % p, tag);
    cur = std::move(st.payload.ints);
    require(static_cast<std::int64_t>(cur.size()) == block, "allgather: block size mismatch");
    std::copy(cur.begin(), cur.end(), out.begin() + recv_idx * block);
  }
  ctx.coll_end(comm, "allgather", tag);
  return out;
}

std::vector<std::int64_t> alltoall(ProcCtx& ctx, const Comm& comm,
                                   const std::vector<std::int64_t>& local, std::int64_t block) {
  std::int64_t tag = ctx.coll_begin(comm, "alltoall");
  std::int64_t p = comm.size();
  std::int64_t r = my_rank(ctx, comm);
  require(block >= 0 && static_cast<std::int64_t>(local.size()) == p * block,
          "alltoall: data size mismatch");
  std::vector<std::int64_t> out(p * block);
  std::copy(local.begin() + r * block, local.begin() + (r + 1) * block, out.begin() + r * block);
  bool pow2 = (p & (p - 1)) == 0;
  for (std::int64_t round = 1; round < p; ++round) {
    std::int64_t dst, src;
    if (pow2) {
      dst = src = r ^ round;
    } else {
      dst = (r + round) % p;
      src = (r - round % p + p) % p;
    }
    std::vector<std::int64_t> sendblk(local.begin() + dst * block,
                                      local.begin() + (dst + 1) * block);
    Status st = ctx.sendrecv(comm, dst, tag, block, ints(std::move(sendblk)), src, tag);
    require(static_cast<std::int64_t>(st.payload.ints.size()) == block,
            "alltoall: block size mismatch");
    std::copy(st.payload.ints.begin(), st.payload.ints.end(), out.begin() + src * block);
  }
  ctx.coll_end(comm, "alltoall", tag);
  return out;
}

std::vector<std::int64_t> reduce(ProcCtx& ctx, const Comm& comm, std::int64_t root,
                                 const std::vector<std::int64_t>& local, const VecOp& op) {
  std::int64_t tag = ctx.coll_begin(comm, "reduce");
  std::int64_t p = comm.size();
  require(root >= 0 && root < p, "reduce: invalid root");
  std::int64_t r = my_rank(ctx, comm);
  std::vector<std::int64_t> acc = reduce_impl(ctx, comm, local, op, tag);
  std::vector<std::int64_t> out;
  if (root == 0) {
    if (r == 0) out = std::move(acc);
  } else {
    if (r == 0) ctx.send(comm, root, tag, static_cast<std::int64_t>(acc.size()), ints(acc));
    if (r == root) out = ctx.recv(comm, 0, tag).payload.ints;
  }
  ctx.coll_end(comm, "reduce", tag);
  return out;
}

std::vector<std::int64_t> allreduce(ProcCtx& ctx, const Comm& comm,
                                    const std::vector<std::int64_t>& local, const VecOp& op) {
  std::int64_t tag = ctx.coll_begin(comm, "allreduce");
  std::int64_t r = my_rank(ctx, comm);
  std::vector<std::int64_t> acc = reduce_impl(ctx, comm, local, op, tag);
  if (r != 0) acc.clear();
  auto out = bcast_impl(ctx, comm, 0, std::move(acc), BcastAlg::Binomial, tag);
  ctx.coll_end(comm, "allreduce", tag);
  return out;
}

std::vector<std::int64_t> reduce_scatter_block(ProcCtx& ctx, const Comm& comm,
                                               const std::vector<std::int64_t>& local,
                                               std::int64_t block, const VecOp& op) {
  std::int64_t tag = ctx.coll_begin(comm, "reduce_scatter_block");
  std::int64_t p = comm.size();
  require(block >= 0 && static_cast<std::int64_t>(local.size()) == p * block,
          "reduce_scatter_block: data size mismatch");
  std::vector<std::int64_t> acc = reduce_impl(ctx, comm, local, op, tag);
  auto out = scatter_impl(ctx, comm, 0, acc, block, tag);
  ctx.coll_end(comm, "reduce_scatter_block", tag);
  return out;
}

namespace {

std::vector<std::int64_t> scan_linear(ProcCtx& ctx, const Comm& comm,
                                      const std::vector<std::int64_t>& local, const VecOp& op,
                                      bool exclusive, std::int64_t tag) {
  std::int64_t p = comm.size();
  std::int64_t r = my_rank(ctx, comm);
  std::vector<std::int64_t> prev;  // inclusive fold of ranks 0..r-1
  if (r > 0) prev = ctx.recv(comm, r - 1, tag).payload.ints;
  std::vector<std::int64_t> incl = r == 0 ? local : op.fn(prev, local);
  if (r + 1 < p)
    ctx.send(comm, r + 1, tag, static_cast<std::int64_t>(incl.size()), ints(incl));
  if (!exclusive) return incl;
  return r == 0 ? op.identity(static_cast<std::int64_t>(local.size())) : prev;
}

std::vector<std::int64_t> scan_binomial(ProcCtx& ctx, const Comm& comm,
                                        const std::vector<std::int64_t>& local, const VecOp& op,
                                        bool exclusive, std::int64_t tag) {
  std::int64_t p = comm.size();
  std::int64_t r = my_rank(ctx, comm);
  std::vector<std::int64_t> incl = local;
  std::vector<std::int64_t> excl;
  bool have_excl = false;
  for (std::int64_t step = 1; step < p; step <<= 1) {
    std::int64_t dst = r + step < p ? r + step : PROC_NULL;
    std::int64_t src = r - step >= 0 ? r - step : PROC_NULL;
    Status st = ctx.sendrecv(comm, dst, tag, static_cast<std::int64_t>(incl.size()), ints(incl),
                             src, tag);
    if (src != PROC_NULL) {
      const std::vector<std::int64_t>& x = st.payload.ints;  // fold of lower ranks
      excl = have_excl ? op.fn(x, excl) : x;
      have_excl = true;
      incl = op.fn(x, incl);
    }
  }
  if (!exclusive) return incl;
  return have_excl ? excl : op.identity(static_cast<std::int64_t>(local.size()));
}

}  // namespace

std::vector<std::int64_t> scan(ProcCtx& ctx, const Comm& comm,
                               const std::vector<std::int64_t>& local, const VecOp& op,
                               ScanAlg alg) {
  std::int64_t tag = ctx.coll_begin(comm, "scan");
  auto out = alg == ScanAlg::Linear ? scan_linear(ctx, comm, local, op, false, tag)
                                    : scan_binomial(ctx, comm, local, op, false, tag);
  ctx.coll_end(comm, "scan", tag);
  return out;
}

std::vector<std::int64_t> exscan(ProcCtx& ctx, const Comm& comm,
                                 const std::vector<std::int64_t>& local, const VecOp& op,
                                 ScanAlg alg) {
  std::int64_t tag = ctx.coll_begin(comm, "exscan");
  auto out = alg == ScanAlg::Linear ? scan_linear(ctx, comm, local, op, true, tag)
                                    : scan_binomial(ctx, comm, local, op, true, tag);
  ctx.coll_end(comm, "exscan", tag);
  return out;
}

void barrier(ProcCtx& ctx, const Comm& comm) {
  std::int64_t tag = ctx.coll_begin(comm, "barrier");
  std::int64_t p = comm.size();
  std::int64_t r = my_rank(ctx, comm);
  for (std::int64_t step = 1; step < p; step <<= 1) {
    std::int64_t dst = (r + step) % p;
    std::int64_t src = ((r - step) % p + p) % p;
    ctx.sendrecv(comm, dst, tag, 1, ints({1}), src, tag);
  }
  ctx.coll_end(comm, "barrier", tag);
}

Bounds collective_bounds(std::int64_t p, std::int64_t k_ports, std::int64_t bisection) {
  require(p >= 1, "collective_bounds: p < 1");
  require(k_ports >= 1, "collective_bounds: k < 1");
  require(bisection >= 1, "collective_bounds: bisection < 1");
  Bounds b;
  std::int64_t reach = 1;
  while (reach < p) {
    reach *= (k_ports + 1);
    b.bcast_rounds_lower++;
  }
  b.alltoall_rounds_lower =
      static_cast<double>(p) * static_cast<double>(p) / (4.0 * static_cast<double>(bisection));
  return b;
}

}  // namespace parwb::coll
