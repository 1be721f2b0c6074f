// Wall-clock comparison of serial vs OpenMP round execution for the
// instrumented kernels. Both policies must produce identical values and
// counters; this harness checks that on every run and reports the times.
//
// Usage: bench_kernels [n] [repeats]   (defaults: n = 1 << 20, repeats = 3)

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "parwb/kernels.hpp"

using namespace parwb::kernels;

namespace {

double seconds_of(const std::function<void()>& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(end - start).count();
}

struct Row {
  std::string name;
  double serial = 0.0;
  double omp = 0.0;
  bool identical = false;
};

// Runs one kernel under both policies `repeats` times, keeping the best time
// for each, and records whether values and counters agreed on every run.
template <class Run>
Row bench(const std::string& name, int repeats, Run run) {
  Row row;
  row.name = name;
  row.identical = true;
  row.serial = 1e300;
  row.omp = 1e300;
  for (int i = 0; i < repeats; ++i) {
    bool same = false;
    double ts = 0.0, to = 0.0;
    run(same, ts, to);
    row.identical = row.identical && same;
    row.serial = std::min(row.serial, ts);
    row.omp = std::min(row.omp, to);
  }
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t n = argc > 1 ? std::atoll(argv[1]) : (std::int64_t{1} << 20);
  int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  if (n < 2 || repeats < 1) {
    std::fprintf(stderr, "usage: bench_kernels [n >= 2] [repeats >= 1]\n");
    return 1;
  }

  std::mt19937_64 g(12345);
  std::vector<std::int64_t> data(static_cast<std::size_t>(n));
  for (auto& v : data) v = static_cast<std::int64_t>(g() % 1000000) - 500000;
  std::vector<std::int64_t> half_a(data.begin(), data.begin() + n / 2);
  std::vector<std::int64_t> half_b(data.begin() + n / 2, data.end());
  std::sort(half_a.begin(), half_a.end());
  std::sort(half_b.begin(), half_b.end());

  const BinOp<std::int64_t> plus{
      [](const std::int64_t& a, const std::int64_t& b) { return a + b; }, 0};
  std::less<std::int64_t> less;

  std::vector<Row> rows;

  rows.push_back(bench("scan_hillis_steele", repeats, [&](bool& same, double& ts, double& to) {
    ScanResult<std::int64_t> s, o;
    ts = seconds_of([&] { s = scan(ScanVariant::hillis_steele(), data, plus, true, Exec::Serial); });
    to = seconds_of([&] { o = scan(ScanVariant::hillis_steele(), data, plus, true, Exec::OpenMP); });
    same = s.values == o.values && s.run.ops == o.run.ops && s.run.depth == o.run.depth &&
           s.run.rounds == o.run.rounds;
  }));

  rows.push_back(bench("scan_updown", repeats, [&](bool& same, double& ts, double& to) {
    ScanResult<std::int64_t> s, o;
    ts = seconds_of([&] { s = scan(ScanVariant::updown(), data, plus, true, Exec::Serial); });
    to = seconds_of([&] { o = scan(ScanVariant::updown(), data, plus, true, Exec::OpenMP); });
    same = s.values == o.values && s.run.ops == o.run.ops && s.run.depth == o.run.depth &&
           s.run.rounds == o.run.rounds;
  }));

  rows.push_back(bench("merge_corank_8", repeats, [&](bool& same, double& ts, double& to) {
    MergeResult<std::int64_t> s, o;
    ts = seconds_of([&] { s = merge(MergeVariant::corank(8), half_a, half_b, less, Exec::Serial); });
    to = seconds_of([&] { o = merge(MergeVariant::corank(8), half_a, half_b, less, Exec::OpenMP); });
    same = s.values == o.values && s.run.ops == o.run.ops && s.run.rounds == o.run.rounds &&
           s.piece_sizes == o.piece_sizes;
  }));

  rows.push_back(bench("bitonic_merge", repeats, [&](bool& same, double& ts, double& to) {
    BitonicResult<std::int64_t> s, o;
    ts = seconds_of([&] { s = bitonic_merge(half_a, half_b, less, Exec::Serial); });
    to = seconds_of([&] { o = bitonic_merge(half_a, half_b, less, Exec::OpenMP); });
    same = s.values == o.values && s.run.ops == o.run.ops && s.run.rounds == o.run.rounds;
  }));

  rows.push_back(bench("parallel_partition", repeats, [&](bool& same, double& ts, double& to) {
    PartitionResult<std::int64_t> s, o;
    ts = seconds_of([&] { s = parallel_partition(data, std::int64_t{0}, less, Exec::Serial); });
    to = seconds_of([&] { o = parallel_partition(data, std::int64_t{0}, less, Exec::OpenMP); });
    same = s.values == o.values && s.run.ops == o.run.ops && s.run.rounds == o.run.rounds;
  }));

  rows.push_back(bench("quicksort", repeats, [&](bool& same, double& ts, double& to) {
    SortResult<std::int64_t> s, o;
    ts = seconds_of([&] { s = quicksort(data, less, Exec::Serial); });
    to = seconds_of([&] { o = quicksort(data, less, Exec::OpenMP); });
    same = s.values == o.values && s.run.ops == o.run.ops;
  }));

  rows.push_back(bench("prime_sieve", repeats, [&](bool& same, double& ts, double& to) {
    SieveResult s, o;
    ts = seconds_of([&] { s = prime_sieve(n, Exec::Serial); });
    to = seconds_of([&] { o = prime_sieve(n, Exec::OpenMP); });
    same = s.primes == o.primes && s.cross_outs == o.cross_outs && s.run.ops == o.run.ops;
  }));

  std::printf("kernel,n,serial_s,omp_s,speedup,identical\n");
  bool all_identical = true;
  for (const Row& r : rows) {
    all_identical = all_identical && r.identical;
    std::printf("%s,%lld,%.6f,%.6f,%.2f,%d\n", r.name.c_str(), static_cast<long long>(n), r.serial,
                r.omp, r.serial / r.omp, r.identical ? 1 : 0);
  }
  if (!all_identical) {
    std::fprintf(stderr, "error: OpenMP execution diverged from serial\n");
    return 2;
  }
  return 0;
}
