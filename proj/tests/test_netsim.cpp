#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "parwb/errors.hpp"
#include "parwb/netsim.hpp"
#include "support.hpp"

using namespace parwb::net;
using parwb::DomainError;

namespace {

SimConfig fc_config(std::int64_t p, double alpha, double beta, std::int64_t eager) {
  SimConfig cfg;
  cfg.topology = Topology::fully_connected(p);
  cfg.cost.alpha = alpha;
  cfg.cost.beta = beta;
  cfg.eager_threshold = eager;
  return cfg;
}

std::int64_t count_kind(const SimResult& r, TranscriptEvent::Kind k) {
  return std::count_if(r.transcript.begin(), r.transcript.end(),
                       [&](const TranscriptEvent& e) { return e.kind == k; });
}

}  // namespace

TEST_CASE("transfer cost formulas") {
  CostModel m;
  m.alpha = 3.0;
  m.beta = 0.5;

  m.switching = CostModel::Switching::Direct;
  CHECK(transfer_cost(m, 10, 1) == doctest::Approx(8.0));
  CHECK(transfer_cost(m, 10, 4) == doctest::Approx(8.0));  // distance free

  m.switching = CostModel::Switching::StoreAndForward;
  CHECK(transfer_cost(m, 10, 4) == doctest::Approx(4 * 8.0));

  m.switching = CostModel::Switching::Pipelined;
  m.packet = 2;
  // l + ceil(m/b) - 1 packet hops, each alpha + beta*b.
  CHECK(transfer_cost(m, 10, 4) == doctest::Approx((4 + 5 - 1) * (3.0 + 0.5 * 2)));
  m.packet = 10;
  CHECK(transfer_cost(m, 10, 4) == doctest::Approx(4 * 8.0));  // one whole-message packet
}

TEST_CASE("optimal packet size beats brute force and tracks the closed form") {
  std::mt19937_64 g = testutil::rng(51);
  {
    // Pinned instance: b = round(sqrt(250)*sqrt(10)) = 50 and the cost comes
    // out at exactly the closed form, 24 * 60 = 1440.
    CHECK(optimal_packet_size(1000, 5, 10.0, 1.0) == 50);
    CostModel cm;
    cm.alpha = 10.0;
    cm.beta = 1.0;
    cm.switching = CostModel::Switching::Pipelined;
    cm.packet = 50;
    CHECK(transfer_cost(cm, 1000, 5) == doctest::Approx(1440.0));
  }
  for (int c = 0; c < 50; ++c) {
    // Latency-dominated draws (alpha >= (l-1)*beta, long messages) keep the
    // integer packet staircase fine enough for the closed form to apply.
    std::int64_t m = 20000 + static_cast<std::int64_t>(g() % 20001);
    std::int64_t l = 2 + static_cast<std::int64_t>(g() % 5);
    double beta = 0.2 + static_cast<double>(g() % 11) / 10.0;
    double alpha = (l - 1) * beta * (1.0 + static_cast<double>(g() % 11) / 10.0);

    CostModel cm;
    cm.alpha = alpha;
    cm.beta = beta;
    cm.switching = CostModel::Switching::Pipelined;

    std::int64_t b = optimal_packet_size(m, l, alpha, beta);
    REQUIRE(b >= 1);
    REQUIRE(b <= m);
    cm.packet = b;
    double chosen = transfer_cost(cm, m, l);

    double best = chosen;
    for (std::int64_t bb = 1; bb <= m; ++bb) {
      cm.packet = bb;
      best = std::min(best, transfer_cost(cm, m, l));
    }
    CHECK(chosen <= 1.01 * best);

    double closed = (l - 1) * alpha + 2.0 * std::sqrt((l - 1) * double(m) * alpha * beta) +
                    beta * double(m);
    CHECK(std::abs(chosen - closed) <= 0.02 * closed);
  }
  CHECK_THROWS_AS(optimal_packet_size(100, 1, 1.0, 1.0), DomainError);
}

TEST_CASE("a rendezvous send blocks until the receiver arrives") {
  SimConfig cfg = fc_config(2, 2.0, 0.5, 0);
  std::vector<ProcessFn> progs(2);
  progs[0] = [](ProcCtx& ctx) { ctx.send(ctx.world(), 1, 7, 5); };
  progs[1] = [](ProcCtx& ctx) {
    ctx.compute(7.0);
    Status st = ctx.recv(ctx.world(), 0, 7);
    CHECK(st.src == 0);
    CHECK(st.m == 5);
  };
  SimResult r = sim_run(cfg, progs);
  double end = 7.0 + 2.0 + 0.5 * 5;
  CHECK(r.finish_times[0] == doctest::Approx(end));
  CHECK(r.finish_times[1] == doctest::Approx(end));
  CHECK(r.total_time == doctest::Approx(end));
  CHECK(!r.deadlock);
  CHECK(count_kind(r, TranscriptEvent::Kind::Match) == 1);
}

TEST_CASE("an eager send completes locally even with no receiver") {
  SimConfig cfg = fc_config(2, 1.0, 1.0, 16);
  std::vector<ProcessFn> progs(2);
  progs[0] = [](ProcCtx& ctx) { ctx.send(ctx.world(), 1, 1, 4, Payload{{42}, {}}); };
  progs[1] = [](ProcCtx&) {};
  SimResult r = sim_run(cfg, progs);
  CHECK(!r.deadlock);
  CHECK(r.total_time == doctest::Approx(0.0));
  REQUIRE(r.unmatched.size() == 1);
  CHECK(r.unmatched[0].find("dst=1") != std::string::npos);
}

TEST_CASE("wildcard receives match the lowest sender rank, not arrival order") {
  SimConfig cfg = fc_config(3, 1.0, 0.25, 8);
  std::vector<ProcessFn> progs(3);
  std::vector<std::int64_t> seen;
  progs[0] = [&](ProcCtx& ctx) {
    ctx.compute(10.0);
    for (int i = 0; i < 2; ++i) {
      Status st = ctx.recv(ctx.world(), ANY_SOURCE, ANY_TAG);
      seen.push_back(st.src);
      seen.push_back(st.payload.ints.at(0));
    }
  };
  progs[1] = [](ProcCtx& ctx) {
    ctx.compute(5.0);  // sends later than rank 2
    ctx.send(ctx.world(), 0, 7, 1, Payload{{111}, {}});
  };
  progs[2] = [](ProcCtx& ctx) { ctx.send(ctx.world(), 0, 7, 1, Payload{{222}, {}}); };
  SimResult r = sim_run(cfg, progs);
  CHECK(!r.deadlock);
  CHECK(seen == std::vector<std::int64_t>{1, 111, 2, 222});
}

TEST_CASE("messages between one pair keep FIFO order; tags filter") {
  SimConfig cfg = fc_config(2, 1.0, 0.25, 8);
  std::vector<ProcessFn> progs(2);
  std::vector<std::int64_t> seen;
  progs[0] = [](ProcCtx& ctx) {
    ctx.send(ctx.world(), 1, 7, 1, Payload{{1}, {}});
    ctx.send(ctx.world(), 1, 7, 1, Payload{{2}, {}});
    ctx.send(ctx.world(), 1, 3, 1, Payload{{30}, {}});
    ctx.send(ctx.world(), 1, 4, 1, Payload{{40}, {}});
  };
  progs[1] = [&](ProcCtx& ctx) {
    seen.push_back(ctx.recv(ctx.world(), 0, 7).payload.ints.at(0));
    seen.push_back(ctx.recv(ctx.world(), 0, ANY_TAG).payload.ints.at(0));
    seen.push_back(ctx.recv(ctx.world(), 0, 4).payload.ints.at(0));  // skips tag 3
    seen.push_back(ctx.recv(ctx.world(), 0, 3).payload.ints.at(0));
  };
  SimResult r = sim_run(cfg, progs);
  CHECK(!r.deadlock);
  CHECK(seen == std::vector<std::int64_t>{1, 2, 40, 30});
}

TEST_CASE("a head-to-head ring shift of large messages deadlocks") {
  std::int64_t p = 4;
  SimConfig cfg;
  cfg.topology = Topology::ring(p);
  cfg.cost.alpha = 1.0;
  cfg.cost.beta = 1.0;
  cfg.eager_threshold = 4;
  std::vector<ProcessFn> progs(p);
  for (std::int64_t r = 0; r < p; ++r)
    progs[r] = [r, p](ProcCtx& ctx) {
      ctx.send(ctx.world(), (r + 1) % p, 0, 8);
      ctx.recv(ctx.world(), (r + p - 1) % p, 0);
    };
  SimResult res = sim_run(cfg, progs);
  REQUIRE(res.deadlock.has_value());
  CHECK(res.deadlock->blocked == std::vector<std::int64_t>{0, 1, 2, 3});
  for (auto [waiter, peer] : res.deadlock->wait_for) CHECK(peer == (waiter + 1) % p);
  CHECK(count_kind(res, TranscriptEvent::Kind::Deadlock) == p);
  CHECK(res.unmatched.empty());  // rendezvous sends are stuck, not dropped
}

TEST_CASE("the same shift with small messages or sendrecv completes") {
  std::int64_t p = 4;
  SimConfig cfg;
  cfg.topology = Topology::ring(p);
  cfg.cost.alpha = 2.0;
  cfg.cost.beta = 0.5;

  SUBCASE("eager sends break the cycle") {
    cfg.eager_threshold = 8;
    std::vector<ProcessFn> progs(p);
    for (std::int64_t r = 0; r < p; ++r)
      progs[r] = [r, p](ProcCtx& ctx) {
        ctx.send(ctx.world(), (r + 1) % p, 0, 8);
        Status st = ctx.recv(ctx.world(), (r + p - 1) % p, 0);
        CHECK(st.m == 8);
      };
    SimResult res = sim_run(cfg, progs);
    CHECK(!res.deadlock);
    // Each node's single port carries its outgoing and its incoming
    // transfer, so the shift chains instead of overlapping.
    CHECK(res.total_time == doctest::Approx(3 * (2.0 + 0.5 * 8)));
    CHECK(dependent_rounds(res.transcript) == 3);
  }

  SUBCASE("sendrecv exchanges concurrently at full message size") {
    cfg.eager_threshold = 0;
    std::vector<ProcessFn> progs(p);
    for (std::int64_t r = 0; r < p; ++r)
      progs[r] = [r, p](ProcCtx& ctx) {
        Status st = ctx.sendrecv(ctx.world(), (r + 1) % p, 0, 8, {}, (r + p - 1) % p, 0);
        CHECK(st.src == (r + p - 1) % p);
      };
    SimResult res = sim_run(cfg, progs);
    CHECK(!res.deadlock);
    CHECK(res.total_time == doctest::Approx(2.0 + 0.5 * 8));
    CHECK(count_kind(res, TranscriptEvent::Kind::Match) == p);
    CHECK(dependent_rounds(res.transcript) == 1);
  }
}

TEST_CASE("raising the eager threshold never turns success into deadlock") {
  std::int64_t p = 3;
  auto run_at = [&](std::int64_t eager) {
    SimConfig cfg = fc_config(p, 1.0, 1.0, eager);
    std::vector<ProcessFn> progs(p);
    for (std::int64_t r = 0; r < p; ++r)
      progs[r] = [r, p](ProcCtx& ctx) {
        ctx.send(ctx.world(), (r + 1) % p, 0, 6);
        ctx.recv(ctx.world(), (r + p - 1) % p, 0);
      };
    return sim_run(cfg, progs);
  };
  for (std::int64_t eager : {0, 2, 5}) CHECK(run_at(eager).deadlock.has_value());
  SimResult ok6 = run_at(6);
  SimResult ok64 = run_at(64);
  CHECK(!ok6.deadlock);
  CHECK(!ok64.deadlock);
  CHECK(ok6.total_time == doctest::Approx(ok64.total_time));
}

TEST_CASE("PROC_NULL turns point-to-point calls into free no-ops") {
  SimConfig cfg = fc_config(2, 5.0, 5.0, 0);
  std::vector<ProcessFn> progs(2);
  progs[0] = [](ProcCtx& ctx) {
    ctx.send(ctx.world(), PROC_NULL, 0, 1000);
    Status st = ctx.recv(ctx.world(), PROC_NULL, 0);
    CHECK(st.src == PROC_NULL);
    CHECK(st.m == 0);
    Status ex = ctx.sendrecv(ctx.world(), PROC_NULL, 0, 1000, {}, PROC_NULL, 0);
    CHECK(ex.src == PROC_NULL);
  };
  progs[1] = [](ProcCtx&) {};
  SimResult r = sim_run(cfg, progs);
  CHECK(!r.deadlock);
  CHECK(r.total_time == doctest::Approx(0.0));
  CHECK(r.transcript.empty());
}

TEST_CASE("communicator split groups by color and orders by key") {
  std::vector<std::int64_t> parent{0, 1, 2, 3, 4, 5};
  std::vector<std::int64_t> colors{0, 1, 0, 1, 0, UNDEFINED_COLOR};
  std::vector<std::int64_t> keys{9, 0, 5, 0, 1, 0};
  auto groups = split_members(parent, colors, keys);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].first == 0);
  CHECK(groups[0].second == std::vector<std::int64_t>{4, 2, 0});  // by (key, rank)
  CHECK(groups[1].first == 1);
  CHECK(groups[1].second == std::vector<std::int64_t>{1, 3});

  SimConfig cfg = fc_config(6, 1.0, 1.0, 4);
  std::vector<ProcessFn> progs(6);
  std::vector<std::int64_t> my_rank(6, -9), my_size(6, -9);
  std::vector<double> at(6, -1.0);
  for (std::int64_t r = 0; r < 6; ++r)
    progs[r] = [&, r](ProcCtx& ctx) {
      if (r == 3) ctx.compute(11.0);
      std::int64_t color = r == 5 ? UNDEFINED_COLOR : r % 2;
      std::optional<Comm> c = ctx.comm_split(ctx.world(), color, -r);
      at[r] = ctx.now();
      if (r == 5) {
        CHECK(!c.has_value());
        return;
      }
      REQUIRE(c.has_value());
      my_rank[r] = c->rank_of_world(r);
      my_size[r] = c->size();
      if (r % 2 == 0) CHECK(c->members == std::vector<std::int64_t>{4, 2, 0});
    };
  SimResult res = sim_run(cfg, progs);
  CHECK(!res.deadlock);
  CHECK(my_size == std::vector<std::int64_t>{3, 2, 3, 2, 3, -9});
  CHECK(my_rank == std::vector<std::int64_t>{2, 1, 1, 0, 0, -9});
  // The split synchronizes: every participant leaves at the latest clock.
  for (std::int64_t r = 0; r < 6; ++r) CHECK(at[r] == doctest::Approx(11.0));
}

TEST_CASE("hop counts scale store-and-forward and pipelined transfers") {
  SimConfig cfg;
  cfg.topology = Topology::ring(6);
  cfg.cost.alpha = 2.0;
  cfg.cost.beta = 1.0;
  cfg.eager_threshold = 0;
  std::vector<ProcessFn> progs(6);
  progs[0] = [](ProcCtx& ctx) { ctx.send(ctx.world(), 3, 0, 6); };
  progs[3] = [](ProcCtx& ctx) { ctx.recv(ctx.world(), 0, 0); };
  for (std::int64_t r : {1, 2, 4, 5}) progs[r] = [](ProcCtx&) {};

  SUBCASE("store and forward") {
    cfg.cost.switching = CostModel::Switching::StoreAndForward;
    SimResult r = sim_run(cfg, progs);
    CHECK(r.total_time == doctest::Approx(3 * (2.0 + 6.0)));
  }
  SUBCASE("pipelined") {
    cfg.cost.switching = CostModel::Switching::Pipelined;
    cfg.cost.packet = 2;
    SimResult r = sim_run(cfg, progs);
    CHECK(r.total_time == doctest::Approx((3 + 3 - 1) * (2.0 + 2.0)));
  }
  SUBCASE("direct routing ignores distance") {
    cfg.cost.switching = CostModel::Switching::Direct;
    SimResult r = sim_run(cfg, progs);
    CHECK(r.total_time == doctest::Approx(2.0 + 6.0));
  }
}

TEST_CASE("a second port lets a node feed two receivers concurrently") {
  auto run_star = [&](CostModel::Ports ports, std::int64_t k) {
    SimConfig cfg = fc_config(3, 1.0, 1.0, 8);
    cfg.cost.ports = ports;
    cfg.cost.k = k;
    std::vector<ProcessFn> progs(3);
    progs[0] = [](ProcCtx& ctx) {
      ctx.send(ctx.world(), 1, 0, 4);
      ctx.send(ctx.world(), 2, 0, 4);
    };
    progs[1] = [](ProcCtx& ctx) { ctx.recv(ctx.world(), 0, 0); };
    progs[2] = [](ProcCtx& ctx) { ctx.recv(ctx.world(), 0, 0); };
    return sim_run(cfg, progs);
  };
  SimResult one = run_star(CostModel::Ports::OnePorted, 1);
  SimResult two = run_star(CostModel::Ports::KPorted, 2);
  CHECK(one.total_time == doctest::Approx(2 * 5.0));  // serialized on the port
  CHECK(two.total_time == doctest::Approx(5.0));
}

TEST_CASE("collective markers are counted per rank and name") {
  SimConfig cfg = fc_config(2, 1.0, 1.0, 0);
  std::vector<ProcessFn> progs(2);
  progs[0] = [](ProcCtx& ctx) {
    std::int64_t t1 = ctx.coll_begin(ctx.world(), "bcast");
    CHECK(t1 >= RESERVED_TAG_BASE);
    ctx.coll_end(ctx.world(), "bcast", t1);
    std::int64_t t2 = ctx.coll_begin(ctx.world(), "gather");
    ctx.coll_end(ctx.world(), "gather", t2);
  };
  progs[1] = [](ProcCtx& ctx) {
    std::int64_t t = ctx.coll_begin(ctx.world(), "bcast");
    ctx.coll_end(ctx.world(), "bcast", t);
  };
  SimResult r = sim_run(cfg, progs);
  CHECK(collective_count(r.transcript, 0) == 2);
  CHECK(collective_count(r.transcript, 0, "bcast") == 1);
  CHECK(collective_count(r.transcript, 0, "gather") == 1);
  CHECK(collective_count(r.transcript, 1) == 1);
  CHECK(collective_count(r.transcript, 1, "gather") == 0);
  CHECK(dependent_rounds(r.transcript) == 0);
}

TEST_CASE("dependent rounds measure the longest match chain") {
  std::int64_t p = 4;
  SimConfig cfg = fc_config(p, 1.0, 1.0, 0);
  std::vector<ProcessFn> progs(p);
  progs[0] = [](ProcCtx& ctx) { ctx.send(ctx.world(), 1, 0, 2); };
  for (std::int64_t r : {1, 2})
    progs[r] = [r](ProcCtx& ctx) {
      ctx.recv(ctx.world(), r - 1, 0);
      ctx.send(ctx.world(), r + 1, 0, 2);
    };
  progs[3] = [](ProcCtx& ctx) { ctx.recv(ctx.world(), 2, 0); };
  SimResult r = sim_run(cfg, progs);
  CHECK(!r.deadlock);
  CHECK(dependent_rounds(r.transcript) == 3);
}
