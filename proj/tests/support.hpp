#pragma once

// Shared test utilities: deterministic input generators and independent
// reference implementations that instrumented library code is checked
// against. Everything here is straight-line and unoptimized on purpose.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace testutil {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline std::vector<std::int64_t> rand_ints(std::mt19937_64& g, std::int64_t n, std::int64_t lo,
                                           std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> d(lo, hi);
  std::vector<std::int64_t> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = d(g);
  return v;
}

inline std::vector<std::int64_t> sorted_ints(std::mt19937_64& g, std::int64_t n, std::int64_t lo,
                                             std::int64_t hi) {
  std::vector<std::int64_t> v = rand_ints(g, n, lo, hi);
  std::sort(v.begin(), v.end());
  return v;
}

template <class T, class F>
std::vector<T> ref_inclusive_scan(const std::vector<T>& a, F f) {
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = i == 0 ? a[0] : f(out[i - 1], a[i]);
  return out;
}

template <class T, class F>
std::vector<T> ref_exclusive_scan(const std::vector<T>& a, F f, T identity) {
  std::vector<T> out(a.size());
  T acc = identity;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = acc;
    acc = f(acc, a[i]);
  }
  return out;
}

template <class T, class Less>
std::vector<T> ref_merge(const std::vector<T>& a, const std::vector<T>& b, Less less) {
  std::vector<T> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), less);
  return out;
}

inline std::vector<std::int64_t> ref_bfs(std::int64_t n,
                                         const std::vector<std::pair<std::int64_t, std::int64_t>>& edges,
                                         std::int64_t src, std::int64_t unreachable) {
  std::vector<std::vector<std::int64_t>> adj(static_cast<std::size_t>(n));
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    if (u != v) adj[v].push_back(u);
  }
  std::vector<std::int64_t> dist(static_cast<std::size_t>(n), unreachable);
  std::vector<std::int64_t> queue{src};
  dist[src] = 0;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    std::int64_t u = queue[qi];
    for (std::int64_t v : adj[u])
      if (dist[v] == unreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

inline std::vector<std::int64_t> ref_matvec(const std::vector<std::int64_t>& A, std::int64_t m,
                                            std::int64_t n, const std::vector<std::int64_t>& x) {
  std::vector<std::int64_t> y(static_cast<std::size_t>(m), 0);
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < n; ++j) y[i] += A[i * n + j] * x[j];
  return y;
}

inline std::vector<std::int64_t> ref_matmul(const std::vector<std::int64_t>& A,
                                            const std::vector<std::int64_t>& B, std::int64_t m,
                                            std::int64_t l, std::int64_t n) {
  std::vector<std::int64_t> C(static_cast<std::size_t>(m * n), 0);
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t k = 0; k < l; ++k)
      for (std::int64_t j = 0; j < n; ++j) C[i * n + j] += A[i * l + k] * B[k * n + j];
  return C;
}

inline std::int64_t ilog2_ceil(std::int64_t n) {
  std::int64_t r = 0, v = 1;
  while (v < n) {
    v <<= 1;
    ++r;
  }
  return r;
}

inline std::int64_t ilog2_floor(std::int64_t n) {
  std::int64_t r = 0;
  while ((std::int64_t{1} << (r + 1)) <= n) ++r;
  return r;
}

}  // namespace testutil
