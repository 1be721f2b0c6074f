#include "parwb/distapps.hpp"

#include <algorithm>
#include <cmath>

#include "parwb/collectives.hpp"
#include "parwb/errors.hpp"

namespace parwb::apps {

using net::Comm;
using net::Payload;
using net::ProcCtx;
using net::ProcessFn;
using net::PROC_NULL;
using net::SimConfig;
using net::Status;

namespace {

Payload ints(std::vector<std::int64_t> v) {
  Payload p;
  p.ints = std::move(v);
  return p;
}

Payload reals(std::vector<double> v) {
  Payload p;
  p.reals = std::move(v);
  return p;
}

std::int64_t isqrt(std::int64_t p) {
  std::int64_t q = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(p))));
  while (q * q > p) --q;
  while ((q + 1) * (q + 1) <= p) ++q;
  return q;
}

std::vector<std::int64_t> concat(const std::vector<std::vector<std::int64_t>>& parts) {
  std::vector<std::int64_t> out;
  for (const auto& v : parts) out.insert(out.end(), v.begin(), v.end());
  return out;
}

// Blocks of nb x nb in row-major grid order into an n x n matrix.
template <class T>
std::vector<T> assemble_grid(const std::vector<std::vector<T>>& blocks, std::int64_t n,
                             std::int64_t q) {
  std::int64_t nb = n / q;
  std::vector<T> out(n * n);
  for (std::int64_t r = 0; r < q * q; ++r) {
    std::int64_t row = r / q, col = r % q;
    for (std::int64_t i = 0; i < nb; ++i)
      for (std::int64_t j = 0; j < nb; ++j)
        out[(row * nb + i) * n + (col * nb + j)] = blocks[r][i * nb + j];
  }
  return out;
}

}  // namespace

SimConfig make_config(std::int64_t p, const AppOpts& opts) {
  SimConfig cfg;
  cfg.topology = net::Topology::fully_connected(p);
  cfg.cost.alpha = opts.alpha;
  cfg.cost.beta = opts.beta;
  cfg.cost.switching = net::CostModel::Switching::Direct;
  cfg.eager_threshold = opts.eager;
  return cfg;
}

IntDist matvec_rowwise(const std::vector<std::int64_t>& A, std::int64_t m, std::int64_t n,
                       const std::vector<std::int64_t>& x, std::int64_t p, const AppOpts& opts) {
  require(m >= 1 && n >= 1 && p >= 1, "matvec_rowwise: bad sizes");
  require(static_cast<std::int64_t>(A.size()) == m * n, "matvec_rowwise: matrix size mismatch");
  require(static_cast<std::int64_t>(x.size()) == n, "matvec_rowwise: vector size mismatch");
  require(m % p == 0 && n % p == 0, "matvec_rowwise: p must divide m and n");
  std::int64_t mb = m / p, nb = n / p;
  IntDist res;
  res.per_rank.resize(p);
  std::vector<ProcessFn> progs;
  for (std::int64_t r = 0; r < p; ++r) {
    progs.push_back([&, r](ProcCtx& ctx) {
      std::vector<std::int64_t> xloc(x.begin() + r * nb, x.begin() + (r + 1) * nb);
      std::vector<std::int64_t> xf = coll::allgather(ctx, ctx.world(), xloc);
      std::vector<std::int64_t> y(mb, 0);
      for (std::int64_t i = 0; i < mb; ++i)
        for (std::int64_t j = 0; j < n; ++j) y[i] += A[(r * mb + i) * n + j] * xf[j];
      ctx.compute(static_cast<double>(mb * n));
      res.per_rank[r] = std::move(y);
    });
  }
  res.sim = net::sim_run(make_config(p, opts), progs);
  res.global = concat(res.per_rank);
  return res;
}

IntDist matvec_colwise(const std::vector<std::int64_t>& A, std::int64_t m, std::int64_t n,
                       const std::vector<std::int64_t>& x, std::int64_t p, const AppOpts& opts) {
  require(m >= 1 && n >= 1 && p >= 1, "matvec_colwise: bad sizes");
  require(static_cast<std::int64_t>(A.size()) == m * n, "matvec_colwise: matrix size mismatch");
  require(static_cast<std::int64_t>(x.size()) == n, "matvec_colwise: vector size mismatch");
  require(m % p == 0 && n % p == 0, "matvec_colwise: p must divide m and n");
  std::int64_t mb = m / p, nb = n / p;
  IntDist res;
  res.per_rank.resize(p);
  std::vector<ProcessFn> progs;
  coll::VecOp sum = coll::vec_op(coll::ReduceOp::Sum);
  for (std::int64_t r = 0; r < p; ++r) {
    progs.push_back([&, r](ProcCtx& ctx) {
      std::vector<std::int64_t> partial(m, 0);
      for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < nb; ++j)
          partial[i] += A[i * n + (r * nb + j)] * x[r * nb + j];
      ctx.compute(static_cast<double>(m * nb));
      res.per_rank[r] = coll::reduce_scatter_block(ctx, ctx.world(), partial, mb, sum);
    });
  }
  res.sim = net::sim_run(make_config(p, opts), progs);
  res.global = concat(res.per_rank);
  return res;
}

IntDist summa(const std::vector<std::int64_t>& A, const std::vector<std::int64_t>& B,
              std::int64_t m, std::int64_t l, std::int64_t n, std::int64_t p,
              const AppOpts& opts) {
  require(m >= 1 && l >= 1 && n >= 1 && p >= 1, "summa: bad sizes");
  std::int64_t q = isqrt(p);
  require(q * q == p, "summa: p must be a perfect square");
  require(m % q == 0 && l % q == 0 && n % q == 0, "summa: sqrt(p) must divide m, l and n");
  require(static_cast<std::int64_t>(A.size()) == m * l, "summa: A size mismatch");
  require(static_cast<std::int64_t>(B.size()) == l * n, "summa: B size mismatch");
  std::int64_t mb = m / q, lb = l / q, nb = n / q;
  IntDist res;
  res.per_rank.resize(p);
  std::vector<ProcessFn> progs;
  for (std::int64_t r = 0; r < p; ++r) {
    progs.push_back([&, r](ProcCtx& ctx) {
      std::int64_t row = r / q, col = r % q;
      Comm rowcomm = *ctx.comm_split(ctx.world(), row, col);
      Comm colcomm = *ctx.comm_split(ctx.world(), col, row);
      std::vector<std::int64_t> Aloc(mb * lb), Bloc(lb * nb);
      for (std::int64_t i = 0; i < mb; ++i)
        for (std::int64_t j = 0; j < lb; ++j)
          Aloc[i * lb + j] = A[(row * mb + i) * l + (col * lb + j)];
      for (std::int64_t i = 0; i < lb; ++i)
        for (std::int64_t j = 0; j < nb; ++j)
          Bloc[i * nb + j] = B[(row * lb + i) * n + (col * nb + j)];
      std::vector<std::int64_t> C(mb * nb, 0);
      for (std::int64_t k = 0; k < q; ++k) {
        std::vector<std::int64_t> Ak =
            coll::bcast(ctx, rowcomm, k, col == k ? Aloc : std::vector<std::int64_t>{});
        std::vector<std::int64_t> Bk =
            coll::bcast(ctx, colcomm, k, row == k ? Bloc : std::vector<std::int64_t>{});
        for (std::int64_t i = 0; i < mb; ++i)
          for (std::int64_t t = 0; t < lb; ++t)
            for (std::int64_t j = 0; j < nb; ++j) C[i * nb + j] += Ak[i * lb + t] * Bk[t * nb + j];
        ctx.compute(static_cast<double>(mb * lb * nb));
      }
      res.per_rank[r] = std::move(C);
    });
  }
  res.sim = net::sim_run(make_config(p, opts), progs);
  // Assemble the m x n product from the grid of mb x nb blocks.
  res.global.assign(m * n, 0);
  for (std::int64_t r = 0; r < p; ++r) {
    std::int64_t row = r / q, col = r % q;
    for (std::int64_t i = 0; i < mb; ++i)
      for (std::int64_t j = 0; j < nb; ++j)
        res.global[(row * mb + i) * n + (col * nb + j)] = res.per_rank[r][i * nb + j];
  }
  return res;
}

IntDist dist_quicksort(const std::vector<std::vector<std::int64_t>>& locals,
                       const AppOpts& opts) {
  std::int64_t p = static_cast<std::int64_t>(locals.size());
  require(p >= 1 && (p & (p - 1)) == 0, "dist_quicksort: p must be a power of two");
  IntDist res;
  res.per_rank.resize(p);
  std::vector<ProcessFn> progs;
  for (std::int64_t r = 0; r < p; ++r) {
    progs.push_back([&, r](ProcCtx& ctx) {
      std::vector<std::int64_t> a = locals[r];
      Comm comm = ctx.world();
      while (comm.size() > 1) {
        std::int64_t cs = comm.size(), half = cs / 2;
        std::int64_t rc = comm.rank_of_world(ctx.world_rank());
        std::int64_t have = a.empty() ? 0 : 1, med = 0;
        if (have) {
          std::vector<std::int64_t> tmp = a;
          std::nth_element(tmp.begin(), tmp.begin() + tmp.size() / 2, tmp.end());
          med = tmp[tmp.size() / 2];
        }
        std::vector<std::int64_t> gathered = coll::gather(ctx, comm, 0, {have, med});
        std::int64_t pivot = 0;
        if (rc == 0) {
          std::vector<std::int64_t> ms;
          for (std::int64_t i = 0; i < cs; ++i)
            if (gathered[2 * i]) ms.push_back(gathered[2 * i + 1]);
          if (!ms.empty()) {
            std::nth_element(ms.begin(), ms.begin() + ms.size() / 2, ms.end());
            pivot = ms[ms.size() / 2];
          }
        }
        pivot = coll::bcast(ctx, comm, 0, {pivot})[0];
        std::vector<std::int64_t> le, gt;
        for (std::int64_t v : a) (v <= pivot ? le : gt).push_back(v);
        bool low = rc < half;
        std::vector<std::int64_t>& keep = low ? le : gt;
        std::vector<std::int64_t>& give = low ? gt : le;
        std::int64_t partner = low ? rc + half : rc - half;
        ctx.sendrecv(comm, partner, 1, 1, ints({static_cast<std::int64_t>(give.size())}),
                     partner, 1);
        Status st = ctx.sendrecv(comm, partner, 2, static_cast<std::int64_t>(give.size()),
                                 ints(give), partner, 2);
        keep.insert(keep.end(), st.payload.ints.begin(), st.payload.ints.end());
        a = std::move(keep);
        comm = *ctx.comm_split(comm, low ? 0 : 1, 0);
      }
      std::sort(a.begin(), a.end());
      ctx.compute(static_cast<double>(a.size()));
      res.per_rank[r] = std::move(a);
    });
  }
  res.sim = net::sim_run(make_config(p, opts), progs);
  res.global = concat(res.per_rank);
  return res;
}

IntDist counting_sort(const std::vector<std::vector<std::int64_t>>& locals, std::int64_t range,
                      const AppOpts& opts) {
  std::int64_t p = static_cast<std::int64_t>(locals.size());
  require(p >= 1, "counting_sort: no ranks");
  require(range >= 1, "counting_sort: range < 1");
  for (const auto& v : locals)
    for (std::int64_t k : v) require(k >= 0 && k < range, "counting_sort: key out of range");
  IntDist res;
  res.per_rank.resize(p);
  std::vector<ProcessFn> progs;
  coll::VecOp sum = coll::vec_op(coll::ReduceOp::Sum);
  for (std::int64_t r = 0; r < p; ++r) {
    progs.push_back([&, r](ProcCtx& ctx) {
      const std::vector<std::int64_t>& keys = locals[r];
      std::vector<std::int64_t> counts(range, 0);
      for (std::int64_t k : keys) counts[k]++;
      std::vector<std::int64_t> allsize = coll::allreduce(ctx, ctx.world(), counts, sum);
      std::vector<std::int64_t> presize = coll::exscan(ctx, ctx.world(), counts, sum);
      std::int64_t N = 0;
      std::vector<std::int64_t> start(range, 0);
      for (std::int64_t k = 0; k < range; ++k) {
        start[k] = N;
        N += allsize[k];
      }
      auto block_lo = [&](std::int64_t t) { return t * N / p; };
      // Global position of each local element, stable by (key, rank, index).
      std::vector<std::vector<std::int64_t>> outgoing(p);  // flattened (pos, val) pairs
      std::vector<std::int64_t> seen(range, 0);
      for (std::size_t i = 0; i < keys.size(); ++i) {
        std::int64_t k = keys[i];
        std::int64_t pos = start[k] + presize[k] + seen[k]++;
        std::int64_t t = std::min<std::int64_t>(p - 1, pos * p / std::max<std::int64_t>(1, N));
        while (t > 0 && pos < block_lo(t)) --t;
        while (t + 1 < p && pos >= block_lo(t + 1)) ++t;
        outgoing[t].push_back(pos);
        outgoing[t].push_back(k);
      }
      ctx.compute(static_cast<double>(keys.size() + range));
      std::int64_t lo = block_lo(r), hi = block_lo(r + 1);
      std::vector<std::int64_t> mine(hi - lo, 0);
      auto place = [&](const std::vector<std::int64_t>& flat) {
        for (std::size_t i = 0; i + 1 < flat.size(); i += 2) mine[flat[i] - lo] = flat[i + 1];
      };
      // Pairwise rotation redistribution (point-to-point, not a collective).
      for (std::int64_t round = 0; round < p; ++round) {
        if (round == 0) {
          place(outgoing[r]);
          continue;
        }
        std::int64_t dst = (r + round) % p;
        std::int64_t src = (r - round % p + p) % p;
        Status st = ctx.sendrecv(ctx.world(), dst, 3,
                                 static_cast<std::int64_t>(outgoing[dst].size()),
                                 ints(outgoing[dst]), src, 3);
        place(st.payload.ints);
      }
      res.per_rank[r] = std::move(mine);
    });
  }
  res.sim = net::sim_run(make_config(p, opts), progs);
  res.global = concat(res.per_rank);
  return res;
}

namespace {

// One 5-point step on a halo-padded (nb+2) x (nb+2) buffer; row0/col0 are
// halos. Cells with keep set are copied unchanged (fixed global boundary).
void stencil_step(const std::vector<double>& cur, std::vector<double>& next, std::int64_t nb,
                  const std::vector<char>& keep) {
  std::int64_t w = nb + 2;
  for (std::int64_t i = 1; i <= nb; ++i)
    for (std::int64_t j = 1; j <= nb; ++j) {
      if (keep[(i - 1) * nb + (j - 1)]) {
        next[i * w + j] = cur[i * w + j];
        continue;
      }
      double W = cur[i * w + (j - 1)], E = cur[i * w + (j + 1)];
      double N = cur[(i - 1) * w + j], S = cur[(i + 1) * w + j];
      double C = cur[i * w + j];
      next[i * w + j] = ((((W + E) + N) + S) + C) / 5.0;
    }
}

}  // namespace

std::vector<double> stencil_seq(std::vector<double> grid, std::int64_t n, std::int64_t iters,
                                Boundary boundary, double eps) {
  require(n >= 1, "stencil_seq: n < 1");
  require(static_cast<std::int64_t>(grid.size()) == n * n, "stencil_seq: grid size mismatch");
  std::int64_t w = n + 2;
  std::vector<double> cur(w * w, 0.0), next(w * w, 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) cur[(i + 1) * w + (j + 1)] = grid[i * n + j];
  std::vector<char> keep(n * n, 0);
  if (boundary == Boundary::FixedValues)
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j)
        keep[i * n + j] = (i == 0 || i == n - 1 || j == 0 || j == n - 1) ? 1 : 0;
  for (std::int64_t it = 0; it < iters; ++it) {
    if (boundary == Boundary::Reflecting) {
      for (std::int64_t i = 1; i <= n; ++i) {
        cur[i * w + 0] = cur[i * w + 1];
        cur[i * w + (n + 1)] = cur[i * w + n];
      }
      for (std::int64_t j = 1; j <= n; ++j) {
        cur[0 * w + j] = cur[1 * w + j];
        cur[(n + 1) * w + j] = cur[n * w + j];
      }
    }
    stencil_step(cur, next, n, keep);
    bool converged = false;
    if (eps > 0.0) {
      double delta = 0.0;
      for (std::int64_t i = 1; i <= n; ++i)
        for (std::int64_t j = 1; j <= n; ++j)
          delta = std::max(delta, std::abs(next[i * w + j] - cur[i * w + j]));
      converged = delta < eps;
    }
    std::swap(cur, next);
    if (converged) break;
  }
  std::vector<double> out(n * n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) out[i * n + j] = cur[(i + 1) * w + (j + 1)];
  return out;
}

RealDist stencil_iterate(const std::vector<double>& grid, std::int64_t n, std::int64_t p,
                         std::int64_t iters, Boundary boundary, double eps, const AppOpts& opts) {
  require(n >= 1, "stencil_iterate: n < 1");
  require(static_cast<std::int64_t>(grid.size()) == n * n, "stencil_iterate: grid size mismatch");
  std::int64_t q = isqrt(p);
  require(q * q == p, "stencil_iterate: p must be a perfect square");
  require(n % q == 0, "stencil_iterate: sqrt(p) must divide n");
  std::int64_t nb = n / q;
  RealDist res;
  res.per_rank.resize(p);
  std::vector<ProcessFn> progs;
  coll::VecOp land = coll::vec_op(coll::ReduceOp::LAnd);
  for (std::int64_t r = 0; r < p; ++r) {
    progs.push_back([&, r](ProcCtx& ctx) {
      std::int64_t row = r / q, col = r % q;
      std::int64_t w = nb + 2;
      std::vector<double> cur(w * w, 0.0), next(w * w, 0.0);
      for (std::int64_t i = 0; i < nb; ++i)
        for (std::int64_t j = 0; j < nb; ++j)
          cur[(i + 1) * w + (j + 1)] = grid[(row * nb + i) * n + (col * nb + j)];
      std::vector<char> keep(nb * nb, 0);
      if (boundary == Boundary::FixedValues)
        for (std::int64_t i = 0; i < nb; ++i)
          for (std::int64_t j = 0; j < nb; ++j) {
            std::int64_t gi = row * nb + i, gj = col * nb + j;
            keep[i * nb + j] = (gi == 0 || gi == n - 1 || gj == 0 || gj == n - 1) ? 1 : 0;
          }
      std::int64_t left = col > 0 ? r - 1 : PROC_NULL;
      std::int64_t right = col + 1 < q ? r + 1 : PROC_NULL;
      std::int64_t up = row > 0 ? r - q : PROC_NULL;
      std::int64_t down = row + 1 < q ? r + q : PROC_NULL;
      for (std::int64_t it = 0; it < iters; ++it) {
        // Left/right halo exchange, then up/down.
        std::vector<double> edge(nb);
        for (std::int64_t i = 0; i < nb; ++i) edge[i] = cur[(i + 1) * w + 1];
        Status st = ctx.sendrecv(ctx.world(), left, 10, nb, reals(edge), right, 10);
        if (right != PROC_NULL)
          for (std::int64_t i = 0; i < nb; ++i) cur[(i + 1) * w + (nb + 1)] = st.payload.reals[i];
        for (std::int64_t i = 0; i < nb; ++i) edge[i] = cur[(i + 1) * w + nb];
        st = ctx.sendrecv(ctx.world(), right, 11, nb, reals(edge), left, 11);
        if (left != PROC_NULL)
          for (std::int64_t i = 0; i < nb; ++i) cur[(i + 1) * w + 0] = st.payload.reals[i];
        for (std::int64_t j = 0; j < nb; ++j) edge[j] = cur[1 * w + (j + 1)];
        st = ctx.sendrecv(ctx.world(), up, 12, nb, reals(edge), down, 12);
        if (down != PROC_NULL)
          for (std::int64_t j = 0; j < nb; ++j) cur[(nb + 1) * w + (j + 1)] = st.payload.reals[j];
        for (std::int64_t j = 0; j < nb; ++j) edge[j] = cur[nb * w + (j + 1)];
        st = ctx.sendrecv(ctx.world(), down, 13, nb, reals(edge), up, 13);
        if (up != PROC_NULL)
          for (std::int64_t j = 0; j < nb; ++j) cur[0 * w + (j + 1)] = st.payload.reals[j];
        // Mirror the global edges when reflecting.
        if (boundary == Boundary::Reflecting) {
          if (col == 0)
            for (std::int64_t i = 1; i <= nb; ++i) cur[i * w + 0] = cur[i * w + 1];
          if (col == q - 1)
            for (std::int64_t i = 1; i <= nb; ++i) cur[i * w + (nb + 1)] = cur[i * w + nb];
          if (row == 0)
            for (std::int64_t j = 1; j <= nb; ++j) cur[0 * w + j] = cur[1 * w + j];
          if (row == q - 1)
            for (std::int64_t j = 1; j <= nb; ++j) cur[(nb + 1) * w + j] = cur[nb * w + j];
        }
        stencil_step(cur, next, nb, keep);
        ctx.compute(static_cast<double>(nb * nb));
        bool converged = false;
        if (eps > 0.0) {
          double delta = 0.0;
          for (std::int64_t i = 1; i <= nb; ++i)
            for (std::int64_t j = 1; j <= nb; ++j)
              delta = std::max(delta, std::abs(next[i * w + j] - cur[i * w + j]));
          std::vector<std::int64_t> flag{delta < eps ? 1 : 0};
          converged = coll::allreduce(ctx, ctx.world(), flag, land)[0] != 0;
        }
        std::swap(cur, next);
        if (converged) break;
      }
      std::vector<double> out(nb * nb);
      for (std::int64_t i = 0; i < nb; ++i)
        for (std::int64_t j = 0; j < nb; ++j) out[i * nb + j] = cur[(i + 1) * w + (j + 1)];
      res.per_rank[r] = std::move(out);
    });
  }
  res.sim = net::sim_run(make_config(p, opts), progs);
  res.global = assemble_grid(res.per_rank, n, q);
  return res;
}

IntDist bfs_levelwise(std::int64_t n,
                      const std::vector<std::pair<std::int64_t, std::int64_t>>& edges,
                      std::int64_t src, std::int64_t p, const AppOpts& opts) {
  require(n >= 1 && p >= 1, "bfs_levelwise: bad sizes");
  require(n % p == 0, "bfs_levelwise: p must divide n");
  require(src >= 0 && src < n, "bfs_levelwise: source out of range");
  std::int64_t nb = n / p;
  std::vector<std::vector<std::vector<std::int64_t>>> adj(p);
  for (std::int64_t r = 0; r < p; ++r) adj[r].resize(nb);
  auto add_arc = [&](std::int64_t u, std::int64_t v) {
    require(u >= 0 && u < n && v >= 0 && v < n, "bfs_levelwise: vertex out of range");
    adj[u / nb][u % nb].push_back(v);
  };
  for (auto [u, v] : edges) {
    add_arc(u, v);
    if (u != v) add_arc(v, u);
  }
  std::int64_t words = (n + 63) / 64;
  IntDist res;
  res.per_rank.resize(p);
  std::vector<ProcessFn> progs;
  coll::VecOp bor = coll::vec_op(coll::ReduceOp::BOr);
  for (std::int64_t r = 0; r < p; ++r) {
    progs.push_back([&, r](ProcCtx& ctx) {
      auto get = [](const std::vector<std::int64_t>& bits, std::int64_t v) {
        return (static_cast<std::uint64_t>(bits[v / 64]) >> (v % 64)) & 1u;
      };
      auto set = [](std::vector<std::int64_t>& bits, std::int64_t v) {
        bits[v / 64] = static_cast<std::int64_t>(static_cast<std::uint64_t>(bits[v / 64]) |
                                                 (std::uint64_t{1} << (v % 64)));
      };
      std::vector<std::int64_t> visited(words, 0), frontier(words, 0);
      set(visited, src);
      set(frontier, src);
      std::vector<std::int64_t> dist(nb, BFS_UNREACHABLE);
      if (src / nb == r) dist[src % nb] = 0;
      std::int64_t level = 0;
      for (;;) {
        std::vector<std::int64_t> next(words, 0);
        std::int64_t scanned = 0;
        for (std::int64_t i = 0; i < nb; ++i) {
          if (!get(frontier, r * nb + i)) continue;
          for (std::int64_t u : adj[r][i]) {
            set(next, u);
            ++scanned;
          }
        }
        ctx.compute(static_cast<double>(scanned + words));
        next = coll::allreduce(ctx, ctx.world(), next, bor);
        bool any = false;
        for (std::int64_t wd = 0; wd < words; ++wd) {
          next[wd] = static_cast<std::int64_t>(static_cast<std::uint64_t>(next[wd]) &
                                               ~static_cast<std::uint64_t>(visited[wd]));
          if (next[wd] != 0) any = true;
        }
        if (!any) break;
        ++level;
        for (std::int64_t wd = 0; wd < words; ++wd)
          visited[wd] = static_cast<std::int64_t>(static_cast<std::uint64_t>(visited[wd]) |
                                                  static_cast<std::uint64_t>(next[wd]));
        for (std::int64_t i = 0; i < nb; ++i)
          if (get(next, r * nb + i)) dist[i] = level;
        frontier = next;
      }
      res.per_rank[r] = std::move(dist);
    });
  }
  res.sim = net::sim_run(make_config(p, opts), progs);
  res.global = concat(res.per_rank);
  return res;
}

std::vector<std::int64_t> fw_seq(std::vector<std::int64_t> W, std::int64_t n) {
  require(static_cast<std::int64_t>(W.size()) == n * n, "fw_seq: matrix size mismatch");
  for (std::int64_t k = 0; k < n; ++k)
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t ik = W[i * n + k];
      if (ik == FW_INF) continue;
      for (std::int64_t j = 0; j < n; ++j) {
        std::int64_t kj = W[k * n + j];
        if (kj == FW_INF) continue;
        W[i * n + j] = std::min(W[i * n + j], ik + kj);
      }
    }
  return W;
}

}  // namespace parwb::apps
