#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "parwb/errors.hpp"
#include "parwb/pram.hpp"
#include "support.hpp"

using namespace parwb::pram;
using parwb::DomainError;

namespace {

// One-shot program built from a fixed step sequence.
class Scripted : public Program {
public:
  explicit Scripted(std::vector<Step> steps) : steps_(std::move(steps)) {}
  std::optional<Step> next(const Memory&) override {
    if (at_ >= steps_.size()) return std::nullopt;
    return steps_[at_++];
  }

private:
  std::vector<Step> steps_;
  std::size_t at_ = 0;
};

std::int64_t ceil_log2(std::int64_t n) { return testutil::ilog2_ceil(n); }

}  // namespace

TEST_CASE("conflict rules follow declared accesses") {
  SUBCASE("two readers of one cell are flagged only under EREW") {
    Step s;
    s.reads = {{0, 0}, {1, 0}};
    for (Variant v : {Variant::CREW, Variant::CRCW_Common, Variant::CRCW_Arbitrary,
                      Variant::CRCW_Priority}) {
      Scripted p({s});
      CHECK_NOTHROW(pram_run(p, v, Memory{7}));
    }
    Scripted p({s});
    CHECK_THROWS_AS(pram_run(p, Variant::EREW, Memory{7}), ConflictViolation);
  }

  SUBCASE("a declared write counts under CREW even when its branch was not taken") {
    Step s;
    s.writes = {{0, 0, true, 5}, {1, 0, false, 0}};
    Scripted p({s});
    CHECK_THROWS_AS(pram_run(p, Variant::CREW, Memory{0}), ConflictViolation);
    Scripted q({s});
    RunResult r = pram_run(q, Variant::CRCW_Common, Memory{0});
    CHECK(r.memory[0] == 5);  // only the performed write supplies a value
  }

  SUBCASE("a cell both read and declared-written is flagged under every variant") {
    Step s;
    s.reads = {{0, 2}};
    s.writes = {{1, 2, false, 0}};
    for (Variant v : {Variant::EREW, Variant::CREW, Variant::CRCW_Common,
                      Variant::CRCW_Arbitrary, Variant::CRCW_Priority}) {
      Scripted p({s});
      CHECK_THROWS_AS(pram_run(p, v, Memory{0, 0, 9}), ConflictViolation);
    }
  }

  SUBCASE("Common accepts equal performed values and rejects unequal ones") {
    Step equal;
    equal.writes = {{0, 0, true, 4}, {1, 0, true, 4}, {2, 0, false, 99}};
    Scripted p({equal});
    RunResult r = pram_run(p, Variant::CRCW_Common, Memory{0});
    CHECK(r.memory[0] == 4);

    Step unequal;
    unequal.writes = {{0, 0, true, 4}, {1, 0, true, 5}};
    Scripted q({unequal});
    CHECK_THROWS_AS(pram_run(q, Variant::CRCW_Common, Memory{0}), ConflictViolation);
  }

  SUBCASE("Arbitrary and Priority commit the lowest-id performed write") {
    Step s;
    s.writes = {{3, 0, true, 33}, {1, 0, true, 11}, {2, 0, false, 22}};
    for (Variant v : {Variant::CRCW_Arbitrary, Variant::CRCW_Priority}) {
      Scripted p({s});
      RunResult r = pram_run(p, v, Memory{0});
      CHECK(r.memory[0] == 11);
    }
  }

  SUBCASE("reads observe pre-step memory; writes commit together") {
    // Swap cells 0 and 1 in a single step.
    Step s;
    s.reads = {{0, 0}, {1, 1}};
    s.writes = {{0, 2, true, 0}, {1, 3, true, 0}};
    // Values must be filled from pre-step state by the program; emulate the
    // swap with a second scripted step computed from the original memory.
    Memory m{10, 20, 0, 0};
    Step swap;
    swap.reads = {{0, 0}, {1, 1}};
    swap.writes = {{0, 1, true, 10}, {1, 0, true, 20}};
    CHECK_THROWS_AS(
        [&] {
          Scripted bad({swap});
          pram_run(bad, Variant::EREW, m);  // read and write overlap cells 0/1
        }(),
        ConflictViolation);
    Step disjoint;
    disjoint.reads = {{0, 0}, {1, 1}};
    disjoint.writes = {{0, 2, true, 10}, {1, 3, true, 20}};
    Scripted ok({disjoint});
    RunResult r = pram_run(ok, Variant::EREW, m);
    CHECK(r.memory == Memory{10, 20, 10, 20});
  }

  SUBCASE("stats count steps, ops and peak processors") {
    Step a;
    a.reads = {{0, 0}, {1, 1}, {2, 2}};
    a.ops = 3;
    Step b;
    b.writes = {{5, 3, true, 1}};
    b.ops = 1;
    Scripted p({a, b});
    RunResult r = pram_run(p, Variant::CREW, Memory{0, 0, 0, 0});
    CHECK(r.stats.steps == 2);
    CHECK(r.stats.ops == 4);
    CHECK(r.stats.max_procs == 3);
  }
}

TEST_CASE("fastmax: three steps, quadratic work, exact result") {
  std::mt19937_64 g = testutil::rng(7);
  for (std::int64_t n : {4, 5, 16, 33, 100, 256}) {
    std::vector<Word> a = testutil::rand_ints(g, n, -1000, 1000);
    MaxResult r = fastmax(a);
    CHECK(r.max == *std::max_element(a.begin(), a.end()));
    CHECK(r.stats.steps == 3);
    CHECK(r.stats.ops >= n * (n - 1));
    CHECK(r.stats.ops <= 2 * n * n + 3 * n);
  }
}

TEST_CASE("fastmax conflict behavior by variant") {
  std::mt19937_64 g = testutil::rng(8);
  for (std::int64_t n = 2; n <= 24; ++n) {
    std::vector<Word> a = testutil::rand_ints(g, n, 0, 9);
    a[0] = 10;  // non-constant for sure
    CHECK_THROWS_AS(fastmax(a, Variant::CREW), ConflictViolation);
    CHECK_THROWS_AS(fastmax(a, Variant::EREW), ConflictViolation);
    CHECK_NOTHROW(fastmax(a, Variant::CRCW_Common));
  }
  // Constant arrays keep every candidate flag set; all survivors write the
  // same value, which Common accepts.
  std::vector<Word> flat(9, 3);
  CHECK(fastmax(flat, Variant::CRCW_Common).max == 3);
  // Ties on the maximum leave several performed writers agreeing on the value.
  std::vector<Word> tied{5, 1, 5, 2, 5};
  CHECK(fastmax(tied, Variant::CRCW_Common).max == 5);
}

TEST_CASE("logmax: n-1 comparisons in ceil(log2 n) rounds, legal under EREW") {
  std::mt19937_64 g = testutil::rng(9);
  for (std::int64_t n : {1, 2, 3, 7, 8, 9, 64, 100, 257}) {
    std::vector<Word> a = testutil::rand_ints(g, n, -5000, 5000);
    MaxResult r = logmax(a, Variant::EREW);
    CHECK(r.max == *std::max_element(a.begin(), a.end()));
    CHECK(r.stats.ops == n - 1);
    CHECK(r.stats.steps == ceil_log2(n));
  }
}

TEST_CASE("loglogmax: linear work, doubly logarithmic rounds") {
  std::mt19937_64 g = testutil::rng(10);
  for (std::int64_t n : {1, 2, 3, 4, 5, 6, 7, 8, 9, 15, 16, 17, 63, 64, 100, 255, 256, 1000,
                         4096, 65536}) {
    std::vector<Word> a = testutil::rand_ints(g, n, -100000, 100000);
    MaxResult r = loglogmax(a);
    CHECK(r.max == *std::max_element(a.begin(), a.end()));
    CHECK(r.stats.ops <= 8 * n);
    if (n >= 4) {
      std::int64_t loglog = ceil_log2(ceil_log2(n));
      CHECK(r.stats.steps <= 4 * std::max<std::int64_t>(1, loglog));
    }
  }
}

TEST_CASE("loglogmax equals the oracle on random seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 g = testutil::rng(seed);
    std::int64_t n = 1 + static_cast<std::int64_t>(g() % 500);
    std::vector<Word> a = testutil::rand_ints(g, n, -1000000, 1000000);
    Word want = *std::max_element(a.begin(), a.end());
    CHECK(fastmax(a).max == want);
    CHECK(logmax(a).max == want);
    CHECK(loglogmax(a).max == want);
  }
}

TEST_CASE("pram_matmul: one processor per output cell, l rounds") {
  std::mt19937_64 g = testutil::rng(11);
  for (auto [m, l, n] : {std::tuple<std::int64_t, std::int64_t, std::int64_t>{1, 1, 1},
                         {2, 3, 4}, {4, 4, 4}, {5, 2, 7}}) {
    WordMatrix a{m, l, testutil::rand_ints(g, m * l, -9, 9)};
    WordMatrix b{l, n, testutil::rand_ints(g, l * n, -9, 9)};
    MatmulResult r = pram_matmul(a, b);
    CHECK(r.c.rows == m);
    CHECK(r.c.cols == n);
    CHECK(r.c.data == testutil::ref_matmul(a.data, b.data, m, l, n));
    CHECK(r.stats.steps == l);
    CHECK(r.stats.ops == m * n * l);
    CHECK(r.stats.max_procs == m * n);
  }
  WordMatrix bad{2, 3, std::vector<Word>(6, 0)};
  WordMatrix rhs{2, 2, std::vector<Word>(4, 0)};
  CHECK_THROWS_AS(pram_matmul(bad, rhs), DomainError);
}

TEST_CASE("wyllie list ranking: distances and tail-inclusive sums") {
  std::mt19937_64 g = testutil::rng(12);
  for (std::int64_t n : {1, 2, 3, 8, 20, 65}) {
    // A single chain in shuffled order.
    std::vector<std::int64_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), g);
    std::vector<std::int64_t> next(n);
    for (std::int64_t i = 0; i + 1 < n; ++i) next[order[i]] = order[i + 1];
    next[order[n - 1]] = order[n - 1];
    std::vector<Word> values = testutil::rand_ints(g, n, -50, 50);

    ListRankResult r = wyllie_list_rank(next, values);
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t hops = 0;
      Word sum = values[i];
      std::int64_t at = i;
      while (next[at] != at) {
        at = next[at];
        sum += values[at];
        ++hops;
      }
      CHECK(r.dist[i] == hops);
      CHECK(r.sums[i] == sum);
    }
    CHECK(r.stats.steps == ceil_log2(n) + 1);
  }
}

TEST_CASE("wyllie handles a forest of several lists") {
  // Two chains: 0->1->2 and 3->4; values 1 everywhere.
  std::vector<std::int64_t> next{1, 2, 2, 4, 4};
  std::vector<Word> values{1, 1, 1, 1, 1};
  ListRankResult r = wyllie_list_rank(next, values);
  CHECK(r.dist == std::vector<Word>{2, 1, 0, 1, 0});
  CHECK(r.sums == std::vector<Word>{3, 2, 1, 2, 1});
}
