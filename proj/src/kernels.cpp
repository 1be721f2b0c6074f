#include "parwb/kernels.hpp"

namespace parwb::kernels {

std::vector<ComparatorRound> bitonic_schedule(std::int64_t na, std::int64_t nb) {
  require(na >= 0 && nb >= 0, "bitonic_schedule: negative size");
  std::int64_t total = na + nb;
  std::vector<ComparatorRound> schedule;
  if (total <= 1) return schedule;
  std::int64_t bits = detail::ceil_log2(total);
  std::int64_t cap = std::int64_t{1} << bits;
  std::int64_t pad = cap - total;
  for (std::int64_t h = cap / 2; h >= 1; h >>= 1) {
    ComparatorRound round;
    for (std::int64_t block = 0; block < cap; block += 2 * h)
      for (std::int64_t i = block; i < block + h; ++i) {
        // A virtual low cell holds a minimal element and never moves; pairs
        // with a virtual high cell are entirely virtual.
        if (i < pad) continue;
        round.emplace_back(i - pad, i + h - pad);
      }
    schedule.push_back(std::move(round));
  }
  return schedule;
}

SieveResult prime_sieve(std::int64_t n, Exec exec) {
  SieveResult res;
  if (n < 2) return res;
  std::vector<std::uint8_t> mark(n, 1);
  mark[0] = 0;
  mark[1] = 0;
  for (std::int64_t i = 2; i * i < n; ++i) {
    if (!mark[i]) continue;
    std::int64_t count = (n - 1 - i * i) / i + 1;
    detail::round_for(exec, count, [&](std::int64_t t) { mark[i * i + t * i] = 0; });
    res.cross_outs += count;
    res.run.rounds += 1;
  }
  res.run.ops = res.cross_outs;

  // Compaction: exclusive scan over the marks, then a scatter round.
  std::vector<std::int64_t> pos(n);
  std::int64_t sum = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    pos[i] = sum;
    sum += mark[i];
  }
  res.run.ops += n - 1;
  res.run.depth = n - 1;
  res.run.rounds += 1;

  res.primes.resize(sum);
  detail::round_for(exec, n, [&](std::int64_t i) {
    if (mark[i]) res.primes[pos[i]] = i;
  });
  res.run.rounds += 1;
  return res;
}

}  // namespace parwb::kernels
