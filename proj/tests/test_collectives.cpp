#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "parwb/collectives.hpp"
#include "parwb/errors.hpp"
#include "parwb/netsim.hpp"
#include "support.hpp"

using namespace parwb::net;
using namespace parwb::coll;
using parwb::DomainError;

namespace {

constexpr double kAlpha = 1.0;
constexpr double kBeta = 0.5;

struct CollRun {
  std::vector<std::vector<std::int64_t>> out;
  SimResult sim;
};

CollRun run_ranks(std::int64_t p,
                  std::function<std::vector<std::int64_t>(ProcCtx&, std::int64_t)> body) {
  SimConfig cfg;
  cfg.topology = Topology::fully_connected(p);
  cfg.cost.alpha = kAlpha;
  cfg.cost.beta = kBeta;
  cfg.eager_threshold = 0;
  CollRun result;
  result.out.resize(p);
  std::vector<ProcessFn> progs(p);
  for (std::int64_t r = 0; r < p; ++r)
    progs[r] = [&, r](ProcCtx& ctx) { result.out[r] = body(ctx, r); };
  result.sim = sim_run(cfg, progs);
  REQUIRE(!result.sim.deadlock);
  return result;
}

std::vector<std::int64_t> block_of(std::int64_t rank, std::int64_t len) {
  std::vector<std::int64_t> v(len);
  for (std::int64_t i = 0; i < len; ++i) v[i] = 100 * (rank + 1) + i;
  return v;
}

// Pairs (a,b) as affine maps a*x+b, flattened two slots per map; composition
// is associative and order-sensitive, so rank-order folds are observable.
VecOp affine_op() {
  constexpr std::int64_t kMod = 1000000007;
  VecOp op;
  op.fn = [](const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
    if (x.size() != y.size() || x.size() % 2 != 0) throw DomainError("affine: bad lengths");
    std::vector<std::int64_t> r(x.size());
    for (std::size_t i = 0; i < x.size(); i += 2) {
      r[i] = (x[i] * y[i]) % kMod;
      r[i + 1] = (x[i] * y[i + 1] + x[i + 1]) % kMod;
    }
    return r;
  };
  op.identity = [](std::int64_t len) {
    std::vector<std::int64_t> r(len, 0);
    for (std::int64_t i = 0; i < len; i += 2) r[i] = 1;
    return r;
  };
  return op;
}

std::vector<std::int64_t> affine_of(std::int64_t rank) {
  return {2 + rank % 5, 3 + 7 * rank};
}

std::vector<std::int64_t> fold_affine(std::int64_t lo, std::int64_t hi) {
  VecOp op = affine_op();
  std::vector<std::int64_t> acc = op.identity(2);
  for (std::int64_t r = lo; r < hi; ++r) acc = op.fn(acc, affine_of(r));
  return acc;
}

}  // namespace

TEST_CASE("broadcast delivers the root block under every algorithm") {
  for (std::int64_t p = 1; p <= 16; ++p)
    for (BcastAlg alg : {BcastAlg::Flat, BcastAlg::Ring, BcastAlg::Binomial})
      for (std::int64_t root : {std::int64_t{0}, p - 1, p / 2}) {
        std::vector<std::int64_t> data = block_of(root, 3);
        CollRun r = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
          return bcast(ctx, ctx.world(), root, rank == root ? data : std::vector<std::int64_t>{},
                       alg);
        });
        for (std::int64_t rank = 0; rank < p; ++rank) CHECK(r.out[rank] == data);
      }
}

TEST_CASE("binomial broadcast meets the round lower bound up to p=64") {
  for (std::int64_t p = 1; p <= 64; ++p) {
    CollRun r = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
      return bcast(ctx, ctx.world(), 0, rank == 0 ? std::vector<std::int64_t>{5, 6} :
                                                    std::vector<std::int64_t>{});
    });
    std::int64_t logp = testutil::ilog2_ceil(p);
    CHECK(dependent_rounds(r.sim.transcript) == logp);
    CHECK(collective_bounds(p, 1, 1).bcast_rounds_lower == logp);
    CHECK(r.sim.total_time <= doctest::Approx(logp * (kAlpha + kBeta * 2)));
  }
}

TEST_CASE("ring broadcast pipelines through p-1 dependent rounds") {
  for (std::int64_t p : {2, 3, 5, 8, 13}) {
    CollRun r = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
      return bcast(ctx, ctx.world(), 0, rank == 0 ? std::vector<std::int64_t>{9} :
                                                    std::vector<std::int64_t>{}, BcastAlg::Ring);
    });
    CHECK(dependent_rounds(r.sim.transcript) == p - 1);
  }
}

TEST_CASE("gather and scatter move rank blocks to and from the root") {
  for (std::int64_t p = 1; p <= 16; ++p) {
    std::int64_t root = (p - 1) / 2;
    std::vector<std::int64_t> all;
    for (std::int64_t rank = 0; rank < p; ++rank) {
      std::vector<std::int64_t> b = block_of(rank, 2);
      all.insert(all.end(), b.begin(), b.end());
    }
    CollRun g = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
      return gather(ctx, ctx.world(), root, block_of(rank, 2));
    });
    for (std::int64_t rank = 0; rank < p; ++rank)
      CHECK(g.out[rank] == (rank == root ? all : std::vector<std::int64_t>{}));

    CollRun s = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
      return scatter(ctx, ctx.world(), root, rank == root ? all : std::vector<std::int64_t>{}, 2);
    });
    for (std::int64_t rank = 0; rank < p; ++rank) CHECK(s.out[rank] == block_of(rank, 2));
  }
}

TEST_CASE("allgather concatenates every block everywhere") {
  for (std::int64_t p = 1; p <= 16; ++p) {
    std::vector<std::int64_t> all;
    for (std::int64_t rank = 0; rank < p; ++rank) {
      std::vector<std::int64_t> b = block_of(rank, 2);
      all.insert(all.end(), b.begin(), b.end());
    }
    CollRun r = run_ranks(
        p, [&](ProcCtx& ctx, std::int64_t rank) { return allgather(ctx, ctx.world(), block_of(rank, 2)); });
    for (std::int64_t rank = 0; rank < p; ++rank) CHECK(r.out[rank] == all);
    if (p >= 2) CHECK(dependent_rounds(r.sim.transcript) == p - 1);
  }
}

TEST_CASE("alltoall transposes blocks for both pairing schemes") {
  for (std::int64_t p = 1; p <= 16; ++p) {  // covers powers of two and not
    CollRun r = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
      std::vector<std::int64_t> local(p);
      for (std::int64_t d = 0; d < p; ++d) local[d] = 1000 * rank + d;
      return alltoall(ctx, ctx.world(), local, 1);
    });
    for (std::int64_t rank = 0; rank < p; ++rank) {
      REQUIRE(static_cast<std::int64_t>(r.out[rank].size()) == p);
      for (std::int64_t s = 0; s < p; ++s) CHECK(r.out[rank][s] == 1000 * s + rank);
    }
    if (p >= 2) CHECK(dependent_rounds(r.sim.transcript) == p - 1);
  }
}

TEST_CASE("reductions fold payloads in rank order") {
  for (std::int64_t p = 1; p <= 16; ++p) {
    std::int64_t root = p / 2;
    std::vector<std::int64_t> want = fold_affine(0, p);

    CollRun rd = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
      return reduce(ctx, ctx.world(), root, affine_of(rank), affine_op());
    });
    for (std::int64_t rank = 0; rank < p; ++rank)
      CHECK(rd.out[rank] == (rank == root ? want : std::vector<std::int64_t>{}));

    CollRun ar = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
      return allreduce(ctx, ctx.world(), affine_of(rank), affine_op());
    });
    for (std::int64_t rank = 0; rank < p; ++rank) CHECK(ar.out[rank] == want);
  }
}

TEST_CASE("sum reduction agrees with an elementwise oracle") {
  std::mt19937_64 g = testutil::rng(61);
  for (std::int64_t p : {1, 2, 5, 9, 16}) {
    std::vector<std::vector<std::int64_t>> locals(p);
    std::vector<std::int64_t> want(4, 0);
    for (std::int64_t rank = 0; rank < p; ++rank) {
      locals[rank] = testutil::rand_ints(g, 4, -50, 50);
      for (int i = 0; i < 4; ++i) want[i] += locals[rank][i];
    }
    CollRun r = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
      return allreduce(ctx, ctx.world(), locals[rank], vec_op(ReduceOp::Sum));
    });
    for (std::int64_t rank = 0; rank < p; ++rank) CHECK(r.out[rank] == want);
  }
}

TEST_CASE("reduce_scatter_block hands each rank its block of the total") {
  for (std::int64_t p = 1; p <= 16; ++p) {
    std::vector<std::int64_t> total(2 * p, 0);
    std::vector<std::vector<std::int64_t>> locals(p);
    for (std::int64_t rank = 0; rank < p; ++rank) {
      locals[rank].resize(2 * p);
      for (std::int64_t i = 0; i < 2 * p; ++i) {
        locals[rank][i] = rank + 10 * i;
        total[i] += locals[rank][i];
      }
    }
    CollRun r = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
      return reduce_scatter_block(ctx, ctx.world(), locals[rank], 2, vec_op(ReduceOp::Sum));
    });
    for (std::int64_t rank = 0; rank < p; ++rank) {
      std::vector<std::int64_t> want(total.begin() + 2 * rank, total.begin() + 2 * rank + 2);
      CHECK(r.out[rank] == want);
    }
  }
}

TEST_CASE("scan and exscan produce prefix folds of a non-commutative operator") {
  for (std::int64_t p = 1; p <= 16; ++p)
    for (ScanAlg alg : {ScanAlg::Linear, ScanAlg::Binomial}) {
      CollRun inc = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
        return scan(ctx, ctx.world(), affine_of(rank), affine_op(), alg);
      });
      CollRun exc = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
        return exscan(ctx, ctx.world(), affine_of(rank), affine_op(), alg);
      });
      for (std::int64_t rank = 0; rank < p; ++rank) {
        CHECK(inc.out[rank] == fold_affine(0, rank + 1));
        CHECK(exc.out[rank] == fold_affine(0, rank));  // rank 0 gets the identity
      }
    }
}

TEST_CASE("no process leaves a barrier before the last one arrives") {
  for (std::int64_t p : {2, 5, 8}) {
    std::vector<double> left(p, -1.0);
    run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
      ctx.compute(3.0 * rank);
      barrier(ctx, ctx.world());
      left[rank] = ctx.now();
      return std::vector<std::int64_t>{};
    });
    double latest_entry = 3.0 * (p - 1);
    for (std::int64_t rank = 0; rank < p; ++rank) CHECK(left[rank] >= latest_entry);
  }
}

TEST_CASE("every collective emits exactly one marker per rank") {
  std::int64_t p = 6;
  CollRun r = run_ranks(p, [&](ProcCtx& ctx, std::int64_t rank) {
    bcast(ctx, ctx.world(), 0, rank == 0 ? std::vector<std::int64_t>{1} :
                                           std::vector<std::int64_t>{});
    allreduce(ctx, ctx.world(), {rank}, vec_op(ReduceOp::Max));
    exscan(ctx, ctx.world(), {rank}, vec_op(ReduceOp::Sum));
    barrier(ctx, ctx.world());
    return std::vector<std::int64_t>{};
  });
  for (std::int64_t rank = 0; rank < p; ++rank) {
    CHECK(collective_count(r.sim.transcript, rank) == 4);
    CHECK(collective_count(r.sim.transcript, rank, "bcast") == 1);
    CHECK(collective_count(r.sim.transcript, rank, "allreduce") == 1);
    CHECK(collective_count(r.sim.transcript, rank, "exscan") == 1);
    CHECK(collective_count(r.sim.transcript, rank, "barrier") == 1);
    CHECK(collective_count(r.sim.transcript, rank, "reduce") == 0);  // composite is opaque
  }
}

TEST_CASE("round lower bounds") {
  Bounds b81 = collective_bounds(8, 1, 16);
  CHECK(b81.bcast_rounds_lower == 3);
  CHECK(b81.alltoall_rounds_lower == doctest::Approx(64.0 / 64.0));
  Bounds b92 = collective_bounds(9, 2, 2);
  CHECK(b92.bcast_rounds_lower == 2);  // ceil(log3 9)
  CHECK(b92.alltoall_rounds_lower == doctest::Approx(81.0 / 8.0));
  CHECK(collective_bounds(1, 1, 1).bcast_rounds_lower == 0);
  CHECK(collective_bounds(64, 1, 2).bcast_rounds_lower == 6);
  CHECK_THROWS_AS(collective_bounds(0, 1, 1), DomainError);
  CHECK_THROWS_AS(collective_bounds(4, 0, 1), DomainError);
  CHECK_THROWS_AS(collective_bounds(4, 1, 0), DomainError);
}

TEST_CASE("scalar operator table and validation") {
  CHECK(apply_op(ReduceOp::Sum, 3, 4) == 7);
  CHECK(apply_op(ReduceOp::Prod, 3, 4) == 12);
  CHECK(apply_op(ReduceOp::Min, 3, 4) == 3);
  CHECK(apply_op(ReduceOp::Max, 3, 4) == 4);
  CHECK(apply_op(ReduceOp::LAnd, 2, 0) == 0);
  CHECK(apply_op(ReduceOp::LOr, 0, 2) == 1);
  CHECK(apply_op(ReduceOp::BAnd, 6, 3) == 2);
  CHECK(apply_op(ReduceOp::BOr, 6, 3) == 7);
  CHECK(apply_op(ReduceOp::BXor, 6, 3) == 5);
  for (ReduceOp op : {ReduceOp::Sum, ReduceOp::Prod, ReduceOp::Min, ReduceOp::Max, ReduceOp::BAnd,
                      ReduceOp::BOr, ReduceOp::BXor})
    CHECK(apply_op(op, identity_of(op), 17) == 17);
  // Logical operators normalize to 0/1, so the identity preserves truth only.
  CHECK(apply_op(ReduceOp::LAnd, identity_of(ReduceOp::LAnd), 17) == 1);
  CHECK(apply_op(ReduceOp::LOr, identity_of(ReduceOp::LOr), 17) == 1);
  CHECK(apply_op(ReduceOp::LOr, identity_of(ReduceOp::LOr), 0) == 0);

  VecOp sum = vec_op(ReduceOp::Sum);
  CHECK_THROWS_AS(sum.fn({1, 2}, {1}), DomainError);
  CHECK(sum.identity(3) == std::vector<std::int64_t>{0, 0, 0});
}
