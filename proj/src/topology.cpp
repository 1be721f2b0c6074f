#include "parwb/topology.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>
#include <numeric>

#include "parwb/errors.hpp"

namespace parwb::net {

namespace {

void add_edge(Topology& t, std::int64_t u, std::int64_t v) {
  if (u == v) return;
  t.adj[u].push_back(v);
  t.adj[v].push_back(u);
}

void finish_adjacency(Topology& t) {
  for (auto& nb : t.adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

std::vector<std::int64_t> coords_of(std::int64_t node, const std::vector<std::int64_t>& dims) {
  std::vector<std::int64_t> c(dims.size());
  for (std::size_t d = dims.size(); d-- > 0;) {
    c[d] = node % dims[d];
    node /= dims[d];
  }
  return c;
}

std::int64_t node_of(const std::vector<std::int64_t>& c, const std::vector<std::int64_t>& dims) {
  std::int64_t node = 0;
  for (std::size_t d = 0; d < dims.size(); ++d) node = node * dims[d] + c[d];
  return node;
}

Topology grid(Topology::Kind kind, const std::vector<std::int64_t>& dims) {
  require(!dims.empty(), "grid topology: no dimensions");
  std::int64_t p = 1;
  for (std::int64_t d : dims) {
    require(d >= 1, "grid topology: dimension < 1");
    p *= d;
  }
  Topology t;
  t.kind = kind;
  t.p = p;
  t.dims = dims;
  t.adj.resize(p);
  bool wrap = kind == Topology::Kind::Torus;
  for (std::int64_t node = 0; node < p; ++node) {
    std::vector<std::int64_t> c = coords_of(node, dims);
    for (std::size_t d = 0; d < dims.size(); ++d) {
      if (c[d] + 1 < dims[d]) {
        auto cc = c;
        cc[d] = c[d] + 1;
        add_edge(t, node, node_of(cc, dims));
      } else if (wrap && dims[d] > 1) {
        auto cc = c;
        cc[d] = 0;
        add_edge(t, node, node_of(cc, dims));
      }
    }
  }
  finish_adjacency(t);
  return t;
}

}  // namespace

Topology Topology::ring(std::int64_t p) {
  require(p >= 1, "ring: p < 1");
  Topology t;
  t.kind = Kind::Ring;
  t.p = p;
  t.adj.resize(p);
  for (std::int64_t i = 0; i < p; ++i) add_edge(t, i, (i + 1) % p);
  finish_adjacency(t);
  return t;
}

Topology Topology::fully_connected(std::int64_t p) {
  require(p >= 1, "fully_connected: p < 1");
  Topology t;
  t.kind = Kind::FullyConnected;
  t.p = p;
  t.adj.resize(p);
  for (std::int64_t i = 0; i < p; ++i)
    for (std::int64_t j = i + 1; j < p; ++j) add_edge(t, i, j);
  finish_adjacency(t);
  return t;
}

Topology Topology::mesh(const std::vector<std::int64_t>& dims) {
  return grid(Kind::Mesh, dims);
}

Topology Topology::torus(const std::vector<std::int64_t>& dims) {
  return grid(Kind::Torus, dims);
}

Topology Topology::hypercube(std::int64_t d) {
  require(d >= 0 && d <= 30, "hypercube: bad dimension");
  Topology t;
  t.kind = Kind::Hypercube;
  t.p = std::int64_t{1} << d;
  t.dims = {d};
  t.adj.resize(t.p);
  for (std::int64_t i = 0; i < t.p; ++i)
    for (std::int64_t b = 0; b < d; ++b) add_edge(t, i, i ^ (std::int64_t{1} << b));
  finish_adjacency(t);
  return t;
}

std::string topology_name(const Topology& t) {
  auto dims_str = [&]() {
    std::string s;
    for (std::size_t i = 0; i < t.dims.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(t.dims[i]);
    }
    return s;
  };
  switch (t.kind) {
    case Topology::Kind::Ring:
      return "ring" + std::to_string(t.p);
    case Topology::Kind::FullyConnected:
      return "full" + std::to_string(t.p);
    case Topology::Kind::Mesh:
      return "mesh" + dims_str();
    case Topology::Kind::Torus:
      return "torus" + dims_str();
    case Topology::Kind::Hypercube:
      return "hypercube" + std::to_string(t.dims.empty() ? 0 : t.dims[0]);
  }
  return "unknown";
}

std::vector<std::int64_t> bfs_distances(const Topology& t, std::int64_t src) {
  require(src >= 0 && src < t.p, "bfs: source out of range");
  std::vector<std::int64_t> dist(t.p, -1);
  std::deque<std::int64_t> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    std::int64_t u = q.front();
    q.pop_front();
    for (std::int64_t v : t.adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
  }
  return dist;
}

std::int64_t exhaustive_bisection(const Topology& t) {
  require(t.p >= 2 && t.p <= 20, "exhaustive_bisection: p out of range");
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  for (std::int64_t u = 0; u < t.p; ++u)
    for (std::int64_t v : t.adj[u])
      if (u < v) edges.emplace_back(u, v);
  std::int64_t half = t.p / 2;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::uint32_t top = std::uint32_t{1} << t.p;
  for (std::uint32_t mask = 0; mask < top; ++mask) {
    if (std::popcount(mask) != half) continue;
    if (t.p % 2 == 0 && !(mask & 1)) continue;  // canonical side holds node 0
    std::int64_t cut = 0;
    for (auto [u, v] : edges)
      cut += ((mask >> u) ^ (mask >> v)) & 1;
    best = std::min(best, cut);
  }
  return best;
}

std::optional<std::int64_t> closed_form_bisection(const Topology& t) {
  switch (t.kind) {
    case Topology::Kind::Ring:
      return t.p == 2 ? 1 : 2;
    case Topology::Kind::FullyConnected:
      return (t.p / 2) * ((t.p + 1) / 2);
    case Topology::Kind::Hypercube:
      return t.p / 2;
    case Topology::Kind::Mesh: {
      std::int64_t r = *std::max_element(t.dims.begin(), t.dims.end());
      if (r % 2 != 0) return std::nullopt;  // plane cut across an odd extent is unbalanced
      return t.p / r;
    }
    case Topology::Kind::Torus: {
      std::int64_t r = *std::max_element(t.dims.begin(), t.dims.end());
      if (r % 2 != 0) return std::nullopt;
      // An extent of 2 has a single edge per wrap pair, so the cut is not doubled.
      return r == 2 ? t.p / r : 2 * t.p / r;
    }
  }
  return std::nullopt;
}

TopologyMetrics topology_metrics(const Topology& t) {
  require(t.p >= 2, "topology_metrics: p < 2");
  TopologyMetrics m;
  for (std::int64_t src = 0; src < t.p; ++src) {
    std::vector<std::int64_t> dist = bfs_distances(t, src);
    for (std::int64_t d : dist) {
      require(d >= 0, "disconnected networks cannot be used");
      m.diameter = std::max(m.diameter, d);
    }
    m.max_degree = std::max(m.max_degree, static_cast<std::int64_t>(t.adj[src].size()));
  }
  if (t.p <= 20) {
    m.bisection = exhaustive_bisection(t);
  } else if (auto cf = closed_form_bisection(t)) {
    m.bisection = *cf;
  } else {
    // Odd largest extent beyond exhaustive reach: report the conventional
    // plane cut across the largest dimension.
    std::int64_t r = *std::max_element(t.dims.begin(), t.dims.end());
    m.bisection = (t.kind == Topology::Kind::Torus && r > 2 ? 2 : 1) * (t.p / r);
  }
  return m;
}

}  // namespace parwb::net
