#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace parwb::taskgraph {

struct TaskDag {
  struct Task {
    std::int64_t id = 0;
    std::int64_t weight = 1;
  };
  std::vector<Task> tasks;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;  // (from_id, to_id)
};

struct WorkSpan {
  std::int64_t work = 0;
  std::int64_t span = 0;
  double parallelism = 0.0;
};

// work = sum of weights, span = heaviest path, parallelism = work/span.
// Throws DomainError on cycles, duplicate ids, weights < 1, or dangling edges.
WorkSpan work_span(const TaskDag& dag);

struct Schedule {
  struct Entry {
    std::int64_t task_id = 0;
    std::int64_t proc = 0;
    std::int64_t start = 0;
    std::int64_t end = 0;
  };
  std::vector<Entry> entries;
  std::int64_t makespan = 0;
};

// Event-driven greedy list scheduler; ready tasks are assigned FIFO by
// readiness time (ties by task id) to idle processors (lowest id first).
Schedule greedy_schedule(const TaskDag& dag, std::int64_t p);

struct LoopAssignment {
  std::vector<std::int64_t> thread_of;       // iteration -> thread
  std::vector<std::int64_t> per_thread_counts;  // length p
};

// Unspecified chunk means contiguous blocks: ceil(n/p) iterations to the
// first n mod p threads, floor(n/p) to the rest.
struct StaticSchedule {
  std::optional<std::int64_t> chunk;
};
struct DynamicSchedule {
  std::int64_t chunk = 1;
  std::function<double(std::int64_t)> cost_fn;  // null means unit cost
};
struct GuidedSchedule {
  std::int64_t min_chunk = 1;
  std::function<double(std::int64_t)> cost_fn;  // null means unit cost
};
using LoopKind = std::variant<StaticSchedule, DynamicSchedule, GuidedSchedule>;

// static: chunk j goes to thread j mod p. dynamic/guided: simulated threads
// with per-iteration costs; the earliest-idle thread (ties by lowest id)
// grabs the next chunk in increasing iteration order; guided chunks are
// max(min_chunk, ceil(remaining/p)).
LoopAssignment loop_schedule(std::int64_t n, std::int64_t p, const LoopKind& kind);

}  // namespace parwb::taskgraph
