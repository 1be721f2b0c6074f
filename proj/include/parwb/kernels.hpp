#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "parwb/errors.hpp"

namespace parwb::kernels {

// ops counts binary-operator/comparator applications, depth the longest chain
// of dependent applications (per-cell propagation), rounds the algorithm's
// phases of independent operations.
struct InstrumentedRun {
  std::int64_t ops = 0;
  std::int64_t depth = 0;
  std::int64_t rounds = 0;
};

// Execution policy for rounds of independent operations. Results and counters
// are identical under both policies; OpenMP falls back to serial execution
// when the build has no OpenMP support.
enum class Exec { Serial, OpenMP };

namespace detail {

// Runs body(i) for i in [0,n); the OpenMP path requires bodies whose writes
// target disjoint cells per iteration.
template <class Body>
void round_for(Exec exec, std::int64_t n, const Body& body) {
#ifdef _OPENMP
  if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#else
  (void)exec;
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

inline std::int64_t ceil_log2(std::int64_t n) {
  std::int64_t r = 0, v = 1;
  while (v < n) {
    v <<= 1;
    ++r;
  }
  return r;
}

}  // namespace detail

template <class T>
struct BinOp {
  std::function<T(const T&, const T&)> fn;
  T identity{};
};

struct ScanVariant {
  enum class Kind { Sequential, Recursive, UpDown, HillisSteele, Blocked, OptimalTradeoff };
  Kind kind = Kind::Sequential;
  std::int64_t p = 1;  // used by Blocked and OptimalTradeoff

  static ScanVariant sequential() { return {Kind::Sequential, 1}; }
  static ScanVariant recursive() { return {Kind::Recursive, 1}; }
  static ScanVariant updown() { return {Kind::UpDown, 1}; }
  static ScanVariant hillis_steele() { return {Kind::HillisSteele, 1}; }
  static ScanVariant blocked(std::int64_t p) { return {Kind::Blocked, p}; }
  static ScanVariant optimal_tradeoff(std::int64_t p) { return {Kind::OptimalTradeoff, p}; }
};

template <class T>
struct ScanResult {
  std::vector<T> values;
  InstrumentedRun run;
};

namespace detail {

template <class T>
struct Cells {
  std::vector<T> val;
  std::vector<std::int64_t> dep;

  explicit Cells(std::size_t n = 0) : val(n), dep(n, 0) {}
  std::size_t size() const { return val.size(); }
};

// Chained inclusive scan over cells[lo,hi); returns ops done.
template <class T>
std::int64_t chain_scan(Cells<T>& c, const BinOp<T>& op, std::int64_t lo, std::int64_t hi) {
  std::int64_t ops = 0;
  for (std::int64_t i = lo + 1; i < hi; ++i) {
    c.val[i] = op.fn(c.val[i - 1], c.val[i]);
    c.dep[i] = std::max(c.dep[i - 1], c.dep[i]) + 1;
    ++ops;
  }
  return ops;
}

template <class T>
void scan_hillis_steele(Cells<T>& c, const BinOp<T>& op, InstrumentedRun& run, Exec exec) {
  std::int64_t n = static_cast<std::int64_t>(c.size());
  Cells<T> buf(c.size());
  for (std::int64_t k = 1; k < n; k <<= 1) {
    round_for(exec, n, [&](std::int64_t i) {
      if (i < k) {
        buf.val[i] = c.val[i];
        buf.dep[i] = c.dep[i];
      } else {
        buf.val[i] = op.fn(c.val[i - k], c.val[i]);
        buf.dep[i] = std::max(c.dep[i - k], c.dep[i]) + 1;
      }
    });
    std::swap(c.val, buf.val);
    std::swap(c.dep, buf.dep);
    run.ops += n - k;
    run.rounds += 1;
  }
}

template <class T>
void scan_updown(Cells<T>& c, const BinOp<T>& op, InstrumentedRun& run, Exec exec) {
  std::int64_t n = static_cast<std::int64_t>(c.size());
  std::int64_t k = 1, kk = 0;
  for (k = 1; k < n; k = kk) {
    kk = k << 1;
    std::int64_t count = n / kk;
    round_for(exec, count, [&](std::int64_t t) {
      std::int64_t i = kk - 1 + t * kk;
      c.val[i] = op.fn(c.val[i - k], c.val[i]);
      c.dep[i] = std::max(c.dep[i - k], c.dep[i]) + 1;
    });
    run.ops += count;
    run.rounds += 1;
  }
  for (k = k >> 1; k > 1; k = kk) {
    kk = k >> 1;
    std::int64_t count = 0;
    for (std::int64_t i = k - 1; i < n - kk; i += k) ++count;
    round_for(exec, count, [&](std::int64_t t) {
      std::int64_t i = k - 1 + t * k;
      c.val[i + kk] = op.fn(c.val[i], c.val[i + kk]);
      c.dep[i + kk] = std::max(c.dep[i], c.dep[i + kk]) + 1;
    });
    run.ops += count;
    run.rounds += 1;
  }
}

template <class T>
Cells<T> scan_recursive(const Cells<T>& a, const BinOp<T>& op, InstrumentedRun& run, Exec exec) {
  std::int64_t n = static_cast<std::int64_t>(a.size());
  if (n == 1) return a;
  std::int64_t half = n / 2;
  Cells<T> pairs(half);
  round_for(exec, half, [&](std::int64_t i) {
    pairs.val[i] = op.fn(a.val[2 * i], a.val[2 * i + 1]);
    pairs.dep[i] = std::max(a.dep[2 * i], a.dep[2 * i + 1]) + 1;
  });
  run.ops += half;
  run.rounds += 1;

  Cells<T> inner = scan_recursive(pairs, op, run, exec);

  Cells<T> out(a.size());
  out.val[0] = a.val[0];
  out.dep[0] = a.dep[0];
  round_for(exec, n - 1, [&](std::int64_t t) {
    std::int64_t i = t + 1;
    if (i % 2 == 1) {
      out.val[i] = inner.val[i / 2];
      out.dep[i] = inner.dep[i / 2];
    } else {
      out.val[i] = op.fn(inner.val[i / 2 - 1], a.val[i]);
      out.dep[i] = std::max(inner.dep[i / 2 - 1], a.dep[i]) + 1;
    }
  });
  // Odd positions are copies; the n-1-half even positions each apply op once.
  run.ops += (n - 1) - half;
  run.rounds += 1;
  return out;
}

}  // namespace detail

// Computes the inclusive or exclusive scan of a under op. The result always
// equals the sequential left fold prefix; exclusive results are the inclusive
// ones shifted right with op.identity in front (no extra operator
// applications). OptimalTradeoff requires (p+1) | n.
template <class T>
ScanResult<T> scan(const ScanVariant& variant, const std::vector<T>& a, const BinOp<T>& op,
                   bool inclusive, Exec exec = Exec::Serial) {
  require(!a.empty(), "scan: empty array");
  std::int64_t n = static_cast<std::int64_t>(a.size());
  ScanResult<T> res;
  detail::Cells<T> c(a.size());
  std::copy(a.begin(), a.end(), c.val.begin());

  switch (variant.kind) {
    case ScanVariant::Kind::Sequential: {
      res.run.ops = detail::chain_scan(c, op, 0, n);
      res.run.rounds = n - 1;
      break;
    }
    case ScanVariant::Kind::HillisSteele:
      detail::scan_hillis_steele(c, op, res.run, exec);
      break;
    case ScanVariant::Kind::UpDown:
      detail::scan_updown(c, op, res.run, exec);
      break;
    case ScanVariant::Kind::Recursive:
      c = detail::scan_recursive(c, op, res.run, exec);
      break;
    case ScanVariant::Kind::Blocked: {
      require(variant.p >= 1, "scan: Blocked requires p >= 1");
      std::int64_t p = variant.p;
      std::int64_t base = n / p, rem = n % p;
      std::vector<std::int64_t> lo(p + 1, 0);
      for (std::int64_t b = 0; b < p; ++b) lo[b + 1] = lo[b] + base + (b < rem ? 1 : 0);

      // Local reductions into per-block sums.
      detail::Cells<T> sums(p);
      std::vector<std::int64_t> block_ops(p, 0);
      detail::round_for(exec, p, [&](std::int64_t b) {
        T v = op.identity;
        std::int64_t d = 0;
        for (std::int64_t i = lo[b]; i < lo[b + 1]; ++i) {
          if (i == lo[b]) {
            v = c.val[i];
            d = c.dep[i];
          } else {
            v = op.fn(v, c.val[i]);
            d = std::max(d, c.dep[i]) + 1;
            block_ops[b]++;
          }
        }
        sums.val[b] = v;
        sums.dep[b] = d;
      });
      for (std::int64_t b = 0; b < p; ++b) res.run.ops += block_ops[b];
      res.run.rounds += 1;

      detail::scan_hillis_steele(sums, op, res.run, exec);

      std::vector<std::int64_t> rescan_ops(p, 0);
      detail::round_for(exec, p, [&](std::int64_t b) {
        if (lo[b] == lo[b + 1]) return;
        if (b > 0) {
          c.val[lo[b]] = op.fn(sums.val[b - 1], c.val[lo[b]]);
          c.dep[lo[b]] = std::max(sums.dep[b - 1], c.dep[lo[b]]) + 1;
          rescan_ops[b]++;
        }
        for (std::int64_t i = lo[b] + 1; i < lo[b + 1]; ++i) {
          c.val[i] = op.fn(c.val[i - 1], c.val[i]);
          c.dep[i] = std::max(c.dep[i - 1], c.dep[i]) + 1;
          rescan_ops[b]++;
        }
      });
      for (std::int64_t b = 0; b < p; ++b) res.run.ops += rescan_ops[b];
      res.run.rounds += 1;
      break;
    }
    case ScanVariant::Kind::OptimalTradeoff: {
      require(variant.p >= 1, "scan: OptimalTradeoff requires p >= 1");
      std::int64_t p = variant.p;
      require(n % (p + 1) == 0, "scan: OptimalTradeoff requires (p+1) | n");
      std::int64_t q = n / (p + 1);

      // Step 1: local inclusive scans of the first p blocks.
      std::vector<std::int64_t> step1_ops(p, 0);
      detail::round_for(exec, p, [&](std::int64_t b) {
        step1_ops[b] = detail::chain_scan(c, op, b * q, (b + 1) * q);
      });
      for (std::int64_t b = 0; b < p; ++b) res.run.ops += step1_ops[b];
      res.run.rounds += 1;

      // Step 2: chained scan over the p block prefix totals.
      detail::Cells<T> pref(p);
      for (std::int64_t b = 0; b < p; ++b) {
        pref.val[b] = c.val[(b + 1) * q - 1];
        pref.dep[b] = c.dep[(b + 1) * q - 1];
      }
      res.run.ops += detail::chain_scan(pref, op, 0, p);
      res.run.rounds += 1;

      // Step 3: blocks 1..p-1 add the preceding prefix to their first q-1
      // elements and take their last element from step 2; the last block is
      // rescanned from the added first element.
      std::vector<std::int64_t> step3_ops(p + 1, 0);
      detail::round_for(exec, p - 1, [&](std::int64_t t) {
        std::int64_t b = t + 1;
        for (std::int64_t i = b * q; i < (b + 1) * q - 1; ++i) {
          c.val[i] = op.fn(pref.val[b - 1], c.val[i]);
          c.dep[i] = std::max(pref.dep[b - 1], c.dep[i]) + 1;
          step3_ops[b]++;
        }
        c.val[(b + 1) * q - 1] = pref.val[b];
        c.dep[(b + 1) * q - 1] = pref.dep[b];
      });
      c.val[p * q] = op.fn(pref.val[p - 1], c.val[p * q]);
      c.dep[p * q] = std::max(pref.dep[p - 1], c.dep[p * q]) + 1;
      step3_ops[p] = 1 + detail::chain_scan(c, op, p * q, n);
      for (std::int64_t b = 0; b <= p; ++b) res.run.ops += step3_ops[b];
      res.run.rounds += 1;
      break;
    }
  }

  if (inclusive) {
    res.values = std::move(c.val);
    for (std::int64_t d : c.dep) res.run.depth = std::max(res.run.depth, d);
  } else {
    res.values.resize(a.size());
    res.values[0] = op.identity;
    for (std::int64_t i = 1; i < n; ++i) res.values[i] = c.val[i - 1];
    for (std::int64_t i = 0; i + 1 < n; ++i) res.run.depth = std::max(res.run.depth, c.dep[i]);
  }
  return res;
}

struct RankResult {
  std::int64_t rank = 0;         // number of elements strictly smaller than x
  std::int64_t comparisons = 0;
};

template <class T, class Less = std::less<T>>
RankResult rank(const T& x, const std::vector<T>& a, Less less = Less{}) {
  RankResult r;
  std::int64_t lo = 0, hi = static_cast<std::int64_t>(a.size());
  while (lo < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    r.comparisons++;
    if (less(a[mid], x))
      lo = mid + 1;
    else
      hi = mid;
  }
  r.rank = lo;
  return r;
}

struct CorankPair {
  std::int64_t i = 0;
  std::int64_t j = 0;  // prefix taken from a
  std::int64_t k = 0;  // prefix taken from b
  std::int64_t iterations = 0;
  std::int64_t comparisons = 0;
};

// Finds the unique (j,k) with j+k=i such that merging a[0,j) and b[0,k)
// stably yields the i-element output prefix: (j=0 or a[j-1] <= b[k]) and
// (k=0 or b[k-1] < a[j]). Interval halving, at most ceil(log2(|a|+|b|))+2
// iterations on sorted inputs.
template <class T, class Less = std::less<T>>
CorankPair corank(std::int64_t i, const std::vector<T>& a, const std::vector<T>& b,
                  Less less = Less{}) {
  std::int64_t na = static_cast<std::int64_t>(a.size());
  std::int64_t nb = static_cast<std::int64_t>(b.size());
  require(i >= 0 && i <= na + nb, "corank: index out of range");
  CorankPair r;
  r.i = i;
  std::int64_t j = std::min(i, na);
  std::int64_t k = i - j;
  std::int64_t jlow = std::max<std::int64_t>(0, i - nb);
  std::int64_t klow = 0;
  std::int64_t limit = detail::ceil_log2(std::max<std::int64_t>(1, na + nb)) + 8;
  for (;;) {
    r.iterations++;
    require(r.iterations <= limit + 1, "corank: no convergence (unsorted input?)");
    bool cond1_violated = j > 0 && k < nb && (r.comparisons++, less(b[k], a[j - 1]));
    if (cond1_violated) {
      std::int64_t d = (1 + j - jlow) / 2;
      klow = k;
      j -= d;
      k += d;
      continue;
    }
    bool cond2_violated = k > 0 && j < na && (r.comparisons++, !less(b[k - 1], a[j]));
    if (cond2_violated) {
      std::int64_t d = (1 + k - klow) / 2;
      jlow = j;
      k -= d;
      j += d;
      continue;
    }
    break;
  }
  r.j = j;
  r.k = k;
  return r;
}

struct MergeVariant {
  enum class Kind { Sequential, RankBlocks, Corank };
  Kind kind = Kind::Sequential;
  std::int64_t p = 1;

  static MergeVariant sequential() { return {Kind::Sequential, 1}; }
  static MergeVariant rank_blocks(std::int64_t p) { return {Kind::RankBlocks, p}; }
  static MergeVariant corank(std::int64_t p) { return {Kind::Corank, p}; }
};

template <class T>
struct MergeResult {
  std::vector<T> values;
  InstrumentedRun run;
  std::vector<std::int64_t> piece_sizes;  // output pieces merged independently
};

namespace detail {

// Stable sequential merge of a[alo,ahi) and b[blo,bhi) into out at position
// `at`; a's elements precede equal b's. Returns comparisons done.
template <class T, class Less>
std::int64_t seq_merge_into(const std::vector<T>& a, std::int64_t alo, std::int64_t ahi,
                            const std::vector<T>& b, std::int64_t blo, std::int64_t bhi,
                            std::vector<T>& out, std::int64_t at, Less less) {
  std::int64_t comps = 0;
  std::int64_t i = alo, j = blo;
  while (i < ahi && j < bhi) {
    ++comps;
    if (!less(b[j], a[i]))
      out[at++] = a[i++];
    else
      out[at++] = b[j++];
  }
  while (i < ahi) out[at++] = a[i++];
  while (j < bhi) out[at++] = b[j++];
  return comps;
}

template <class T, class Less>
void check_sorted(const std::vector<T>& v, Less less, const char* who) {
  for (std::size_t i = 1; i < v.size(); ++i)
    require(!less(v[i], v[i - 1]), std::string(who) + ": input not sorted");
}

}  // namespace detail

template <class T, class Less = std::less<T>>
MergeResult<T> merge(const MergeVariant& variant, const std::vector<T>& a, const std::vector<T>& b,
                     Less less = Less{}, Exec exec = Exec::Serial) {
  detail::check_sorted(a, less, "merge");
  detail::check_sorted(b, less, "merge");
  std::int64_t na = static_cast<std::int64_t>(a.size());
  std::int64_t nb = static_cast<std::int64_t>(b.size());
  std::int64_t total = na + nb;
  MergeResult<T> res;
  res.values.resize(total);

  switch (variant.kind) {
    case MergeVariant::Kind::Sequential: {
      res.run.ops = detail::seq_merge_into(a, 0, na, b, 0, nb, res.values, 0, less);
      res.run.depth = res.run.ops;
      res.run.rounds = res.run.ops;
      res.piece_sizes.push_back(total);
      break;
    }
    case MergeVariant::Kind::Corank: {
      require(variant.p >= 1, "merge: p must be >= 1");
      std::int64_t p = variant.p;
      std::vector<CorankPair> cuts(p + 1);
      std::vector<std::int64_t> cut_comps(p + 1, 0);
      detail::round_for(exec, p + 1, [&](std::int64_t t) {
        cuts[t] = corank(t * total / p, a, b, less);
        cut_comps[t] = cuts[t].comparisons;
      });
      std::int64_t cut_depth = 0;
      for (std::int64_t t = 0; t <= p; ++t) {
        res.run.ops += cut_comps[t];
        cut_depth = std::max(cut_depth, cuts[t].comparisons);
      }
      res.run.rounds += 1;

      std::vector<std::int64_t> piece_comps(p, 0);
      detail::round_for(exec, p, [&](std::int64_t t) {
        piece_comps[t] = detail::seq_merge_into(a, cuts[t].j, cuts[t + 1].j, b, cuts[t].k,
                                                cuts[t + 1].k, res.values, cuts[t].i, less);
      });
      std::int64_t piece_depth = 0;
      for (std::int64_t t = 0; t < p; ++t) {
        res.run.ops += piece_comps[t];
        piece_depth = std::max(piece_depth, piece_comps[t]);
        res.piece_sizes.push_back(cuts[t + 1].i - cuts[t].i);
      }
      res.run.rounds += 1;
      res.run.depth = cut_depth + piece_depth;
      break;
    }
    case MergeVariant::Kind::RankBlocks: {
      require(variant.p >= 1, "merge: p must be >= 1");
      std::int64_t p = variant.p;
      // Rank the first element of each of p blocks of a into b; the b
      // segment [r_t, r_{t+1}) pairs with a block t. b elements below the
      // first block head are copied up front.
      std::vector<std::int64_t> alo(p + 1), cutb(p + 1);
      for (std::int64_t t = 0; t <= p; ++t) alo[t] = t * na / p;
      std::vector<std::int64_t> rank_comps(p, 0);
      detail::round_for(exec, p, [&](std::int64_t t) {
        if (alo[t] == alo[t + 1]) {
          cutb[t] = -1;  // empty a block; resolved below
          return;
        }
        RankResult rr = rank(a[alo[t]], b, less);
        cutb[t] = rr.rank;
        rank_comps[t] = rr.comparisons;
      });
      cutb[p] = nb;
      for (std::int64_t t = p - 1; t >= 0; --t)
        if (cutb[t] < 0) cutb[t] = cutb[t + 1];
      std::int64_t rank_depth = 0;
      for (std::int64_t t = 0; t < p; ++t) {
        res.run.ops += rank_comps[t];
        rank_depth = std::max(rank_depth, rank_comps[t]);
      }
      res.run.rounds += 1;

      std::vector<std::int64_t> at(p + 1);
      at[0] = cutb[0];
      for (std::int64_t t = 0; t < p; ++t)
        at[t + 1] = at[t] + (alo[t + 1] - alo[t]) + (cutb[t + 1] - cutb[t]);
      std::copy(b.begin(), b.begin() + cutb[0], res.values.begin());
      if (cutb[0] > 0) res.piece_sizes.push_back(cutb[0]);
      std::vector<std::int64_t> piece_comps(p, 0);
      detail::round_for(exec, p, [&](std::int64_t t) {
        piece_comps[t] = detail::seq_merge_into(a, alo[t], alo[t + 1], b, cutb[t], cutb[t + 1],
                                                res.values, at[t], less);
      });
      std::int64_t piece_depth = 0;
      for (std::int64_t t = 0; t < p; ++t) {
        res.run.ops += piece_comps[t];
        piece_depth = std::max(piece_depth, piece_comps[t]);
        res.piece_sizes.push_back(at[t + 1] - at[t]);
      }
      res.run.rounds += 1;
      res.run.depth = rank_depth + piece_depth;
      break;
    }
  }
  return res;
}

using ComparatorRound = std::vector<std::pair<std::int64_t, std::int64_t>>;

template <class T>
struct BitonicResult {
  std::vector<T> values;
  std::vector<ComparatorRound> schedule;  // real-index comparator pairs per round
  InstrumentedRun run;
};

// Comparator schedule of the bitonic ordering network for |a|+|b| elements:
// the concatenation of a ascending and b reversed is bitonic and is front
// padded virtually to the next power of two with minimal elements; pairs
// touching virtual cells have a known outcome and are neither emitted nor
// counted. Depends only on the sizes.
std::vector<ComparatorRound> bitonic_schedule(std::int64_t na, std::int64_t nb);

template <class T, class Less = std::less<T>>
BitonicResult<T> bitonic_merge(const std::vector<T>& a, const std::vector<T>& b, Less less = Less{},
                               Exec exec = Exec::Serial) {
  require(a.size() + b.size() >= 1, "bitonic_merge: empty input");
  detail::check_sorted(a, less, "bitonic_merge");
  detail::check_sorted(b, less, "bitonic_merge");
  BitonicResult<T> res;
  res.schedule = bitonic_schedule(static_cast<std::int64_t>(a.size()),
                                  static_cast<std::int64_t>(b.size()));
  res.values.reserve(a.size() + b.size());
  res.values.insert(res.values.end(), a.begin(), a.end());
  res.values.insert(res.values.end(), b.rbegin(), b.rend());
  std::vector<std::int64_t> dep(res.values.size(), 0);

  for (const ComparatorRound& round : res.schedule) {
    detail::round_for(exec, static_cast<std::int64_t>(round.size()), [&](std::int64_t t) {
      auto [lo, hi] = round[t];
      if (less(res.values[hi], res.values[lo])) std::swap(res.values[lo], res.values[hi]);
      std::int64_t d = std::max(dep[lo], dep[hi]) + 1;
      dep[lo] = dep[hi] = d;
    });
    res.run.ops += static_cast<std::int64_t>(round.size());
    res.run.rounds += 1;
  }
  for (std::int64_t d : dep) res.run.depth = std::max(res.run.depth, d);
  return res;
}

template <class T>
struct PartitionResult {
  std::vector<T> values;  // [less than pivot][equal][greater], classes stable
  std::int64_t lt = 0;
  std::int64_t eq = 0;
  InstrumentedRun run;
};

// Three mark arrays, exclusive scans, and a scatter round.
template <class T, class Less = std::less<T>>
PartitionResult<T> parallel_partition(const std::vector<T>& a, const T& pivot, Less less = Less{},
                                      Exec exec = Exec::Serial) {
  std::int64_t n = static_cast<std::int64_t>(a.size());
  PartitionResult<T> res;
  res.values.resize(a.size());
  std::vector<std::int64_t> lt(n), eq(n), gt(n);
  detail::round_for(exec, n, [&](std::int64_t i) {
    bool is_lt = less(a[i], pivot);
    bool is_gt = less(pivot, a[i]);
    lt[i] = is_lt ? 1 : 0;
    gt[i] = is_gt ? 1 : 0;
    eq[i] = (!is_lt && !is_gt) ? 1 : 0;
  });
  res.run.ops += n;
  res.run.rounds += 1;

  auto exclusive = [&](std::vector<std::int64_t>& m) {
    std::int64_t sum = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t v = m[i];
      m[i] = sum;
      sum += v;
    }
    res.run.ops += std::max<std::int64_t>(0, n - 1);
    res.run.rounds += 1;
    return sum;
  };
  std::int64_t nlt = exclusive(lt);
  std::int64_t neq = exclusive(eq);
  std::int64_t ngt = exclusive(gt);
  (void)ngt;

  detail::round_for(exec, n, [&](std::int64_t i) {
    bool is_lt = less(a[i], pivot);
    bool is_gt = less(pivot, a[i]);
    std::int64_t pos = is_lt ? lt[i] : (is_gt ? nlt + neq + gt[i] : nlt + eq[i]);
    res.values[pos] = a[i];
  });
  res.run.rounds += 1;
  res.run.depth = std::max<std::int64_t>(0, n - 1) + 1;

  res.lt = nlt;
  res.eq = neq;
  return res;
}

template <class T>
struct SortResult {
  std::vector<T> values;
  InstrumentedRun run;
};

// Median-of-three quicksort over parallel_partition with insertion-sort
// cutoff 32. ops sums partition work and insertion comparisons; depth and
// rounds chain a segment's partition with the deeper of its two halves,
// which may proceed independently.
template <class T, class Less = std::less<T>>
SortResult<T> quicksort(std::vector<T> a, Less less = Less{}, Exec exec = Exec::Serial) {
  SortResult<T> res;
  std::function<InstrumentedRun(std::int64_t, std::int64_t)> go = [&](std::int64_t lo,
                                                                      std::int64_t hi) {
    InstrumentedRun run;
    std::int64_t n = hi - lo;
    if (n <= 32) {
      for (std::int64_t i = lo + 1; i < hi; ++i) {
        T x = std::move(a[i]);
        std::int64_t j = i;
        while (j > lo && (++run.ops, less(x, a[j - 1]))) {
          a[j] = std::move(a[j - 1]);
          --j;
        }
        a[j] = std::move(x);
      }
      run.depth = run.ops;
      run.rounds = n > 1 ? 1 : 0;
      return run;
    }
    const T& x0 = a[lo];
    const T& x1 = a[lo + n / 2];
    const T& x2 = a[hi - 1];
    // Median of first/middle/last.
    const T& pivot = less(x0, x1) ? (less(x1, x2) ? x1 : (less(x0, x2) ? x2 : x0))
                                  : (less(x0, x2) ? x0 : (less(x1, x2) ? x2 : x1));
    std::vector<T> seg(a.begin() + lo, a.begin() + hi);
    PartitionResult<T> part = parallel_partition(seg, pivot, less, exec);
    std::copy(part.values.begin(), part.values.end(), a.begin() + lo);
    InstrumentedRun left = go(lo, lo + part.lt);
    InstrumentedRun right = go(lo + part.lt + part.eq, hi);
    run.ops = part.run.ops + left.ops + right.ops;
    run.depth = part.run.depth + std::max(left.depth, right.depth);
    run.rounds = part.run.rounds + std::max(left.rounds, right.rounds);
    return run;
  };
  res.run = go(0, static_cast<std::int64_t>(a.size()));
  res.values = std::move(a);
  return res;
}

struct SieveResult {
  std::vector<std::int64_t> primes;  // ascending primes < n
  std::int64_t cross_outs = 0;
  InstrumentedRun run;
};

// Crossing out starts at i*i while i*i < n; the mark array is compacted with
// an exclusive scan and a scatter round.
SieveResult prime_sieve(std::int64_t n, Exec exec = Exec::Serial);

}  // namespace parwb::kernels
