#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace parwb::net {

// Undirected interconnection network over nodes 0..p-1. Adjacency lists are
// sorted and duplicate-free (a torus dimension of size 2 contributes a single
// edge).
struct Topology {
  enum class Kind { Ring, FullyConnected, Mesh, Torus, Hypercube };

  Kind kind = Kind::Ring;
  std::int64_t p = 0;
  std::vector<std::int64_t> dims;  // Mesh/Torus extents; Hypercube stores {d}
  std::vector<std::vector<std::int64_t>> adj;

  static Topology ring(std::int64_t p);
  static Topology fully_connected(std::int64_t p);
  static Topology mesh(const std::vector<std::int64_t>& dims);
  static Topology torus(const std::vector<std::int64_t>& dims);
  static Topology hypercube(std::int64_t d);
};

std::string topology_name(const Topology& t);

struct TopologyMetrics {
  std::int64_t diameter = 0;
  std::int64_t max_degree = 0;
  std::int64_t bisection = 0;
};

// Hop distances from src by breadth-first search; unreachable nodes get -1.
std::vector<std::int64_t> bfs_distances(const Topology& t, std::int64_t src);

// Minimum edge cut over all balanced partitions (sizes floor(p/2) and
// ceil(p/2)); intended for p <= 20.
std::int64_t exhaustive_bisection(const Topology& t);

// Known family value, when its precondition holds: ring 2 (single edge for
// p=2), fully connected floor(p/2)*ceil(p/2), hypercube p/2, mesh p/r and
// torus 2p/r cut across the largest dimension r when r is even.
std::optional<std::int64_t> closed_form_bisection(const Topology& t);

// Diameter and degree from the adjacency; bisection exhaustively for p <= 20,
// by closed form otherwise. Throws DomainError for p < 2 or a disconnected
// graph.
TopologyMetrics topology_metrics(const Topology& t);

}  // namespace parwb::net
