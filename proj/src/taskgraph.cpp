#include "parwb/taskgraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "parwb/errors.hpp"

namespace parwb::taskgraph {

namespace {

struct Indexed {
  std::vector<std::int64_t> ids;                  // position -> id
  std::map<std::int64_t, std::size_t> index_of;   // id -> position
  std::vector<std::int64_t> weight;
  std::vector<std::vector<std::size_t>> succs;
  std::vector<std::size_t> indeg;
  std::vector<std::size_t> topo;  // topological order (by position)
};

Indexed index_dag(const TaskDag& dag) {
  Indexed g;
  for (const auto& t : dag.tasks) {
    require(t.weight >= 1, "taskgraph: task weight must be >= 1");
    require(!g.index_of.count(t.id), "taskgraph: duplicate task id");
    g.index_of[t.id] = g.ids.size();
    g.ids.push_back(t.id);
    g.weight.push_back(t.weight);
  }
  g.succs.resize(g.ids.size());
  g.indeg.assign(g.ids.size(), 0);
  for (const auto& [u, v] : dag.edges) {
    require(g.index_of.count(u) && g.index_of.count(v), "taskgraph: edge references unknown task");
    g.succs[g.index_of.at(u)].push_back(g.index_of.at(v));
    g.indeg[g.index_of.at(v)]++;
  }
  // Kahn's algorithm; smallest id first for a deterministic order.
  std::priority_queue<std::pair<std::int64_t, std::size_t>,
                      std::vector<std::pair<std::int64_t, std::size_t>>, std::greater<>>
      q;
  std::vector<std::size_t> indeg = g.indeg;
  for (std::size_t i = 0; i < g.ids.size(); ++i)
    if (indeg[i] == 0) q.push({g.ids[i], i});
  while (!q.empty()) {
    auto [id, i] = q.top();
    q.pop();
    g.topo.push_back(i);
    for (std::size_t s : g.succs[i])
      if (--indeg[s] == 0) q.push({g.ids[s], s});
  }
  require(g.topo.size() == g.ids.size(), "taskgraph: cycle detected");
  return g;
}

}  // namespace

WorkSpan work_span(const TaskDag& dag) {
  Indexed g = index_dag(dag);
  WorkSpan ws;
  std::vector<std::int64_t> finish(g.ids.size(), 0);
  for (std::size_t i : g.topo) {
    ws.work += g.weight[i];
    finish[i] += g.weight[i];
    ws.span = std::max(ws.span, finish[i]);
    for (std::size_t s : g.succs[i]) finish[s] = std::max(finish[s], finish[i]);
  }
  ws.parallelism = ws.span > 0 ? static_cast<double>(ws.work) / static_cast<double>(ws.span) : 0.0;
  return ws;
}

Schedule greedy_schedule(const TaskDag& dag, std::int64_t p) {
  require(p >= 1, "greedy_schedule: p must be >= 1");
  Indexed g = index_dag(dag);
  std::size_t n = g.ids.size();

  using ReadyKey = std::pair<std::int64_t, std::int64_t>;  // (readiness time, id)
  std::priority_queue<std::pair<ReadyKey, std::size_t>,
                      std::vector<std::pair<ReadyKey, std::size_t>>, std::greater<>>
      ready;
  std::vector<std::size_t> indeg = g.indeg;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push({{0, g.ids[i]}, i});

  // (end time, task position, proc) of running tasks.
  std::priority_queue<std::tuple<std::int64_t, std::int64_t, std::int64_t>,
                      std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>>,
                      std::greater<>>
      running;
  std::priority_queue<std::int64_t, std::vector<std::int64_t>, std::greater<>> idle;
  for (std::int64_t i = 0; i < p; ++i) idle.push(i);

  Schedule sched;
  std::int64_t now = 0;
  std::size_t done = 0;
  while (done < n) {
    while (!idle.empty() && !ready.empty() && ready.top().first.first <= now) {
      auto [key, i] = ready.top();
      ready.pop();
      std::int64_t proc = idle.top();
      idle.pop();
      sched.entries.push_back({g.ids[i], proc, now, now + g.weight[i]});
      running.push({now + g.weight[i], static_cast<std::int64_t>(i), proc});
    }
    if (running.empty()) break;  // nothing runnable (empty dag handled by done==n)
    auto [end, ipos, proc] = running.top();
    running.pop();
    now = std::max(now, end);
    idle.push(proc);
    ++done;
    sched.makespan = std::max(sched.makespan, end);
    for (std::size_t s : g.succs[static_cast<std::size_t>(ipos)])
      if (--indeg[s] == 0) ready.push({{end, g.ids[s]}, s});
    // Drain all completions at this time so readiness is consistent.
    while (!running.empty() && std::get<0>(running.top()) == end) {
      auto [e2, i2, p2] = running.top();
      running.pop();
      idle.push(p2);
      ++done;
      sched.makespan = std::max(sched.makespan, e2);
      for (std::size_t s : g.succs[static_cast<std::size_t>(i2)])
        if (--indeg[s] == 0) ready.push({{e2, g.ids[s]}, s});
    }
  }
  return sched;
}

LoopAssignment loop_schedule(std::int64_t n, std::int64_t p, const LoopKind& kind) {
  require(n >= 0, "loop_schedule: n must be >= 0");
  require(p >= 1, "loop_schedule: p must be >= 1");
  LoopAssignment asg;
  asg.thread_of.assign(n, 0);
  asg.per_thread_counts.assign(p, 0);

  auto assign = [&](std::int64_t iter, std::int64_t thread) {
    asg.thread_of[iter] = thread;
    asg.per_thread_counts[thread]++;
  };
  auto cost_of = [](const std::function<double(std::int64_t)>& fn, std::int64_t i) {
    return fn ? fn(i) : 1.0;
  };
  auto earliest_idle = [&](const std::vector<double>& clock) {
    std::int64_t best = 0;
    for (std::int64_t t = 1; t < p; ++t)
      if (clock[t] < clock[best]) best = t;
    return best;
  };

  if (const auto* st = std::get_if<StaticSchedule>(&kind)) {
    if (st->chunk) {
      require(*st->chunk >= 1, "loop_schedule: chunk must be >= 1");
      for (std::int64_t i = 0; i < n; ++i) assign(i, (i / *st->chunk) % p);
    } else {
      std::int64_t base = n / p, rem = n % p, at = 0;
      for (std::int64_t t = 0; t < p; ++t) {
        std::int64_t len = base + (t < rem ? 1 : 0);
        for (std::int64_t i = 0; i < len; ++i) assign(at++, t);
      }
    }
  } else if (const auto* dy = std::get_if<DynamicSchedule>(&kind)) {
    require(dy->chunk >= 1, "loop_schedule: chunk must be >= 1");
    std::vector<double> clock(p, 0.0);
    for (std::int64_t at = 0; at < n; at += dy->chunk) {
      std::int64_t thread = earliest_idle(clock);
      std::int64_t hi = std::min(n, at + dy->chunk);
      for (std::int64_t i = at; i < hi; ++i) {
        assign(i, thread);
        clock[thread] += cost_of(dy->cost_fn, i);
      }
    }
  } else {
    const auto& gd = std::get<GuidedSchedule>(kind);
    require(gd.min_chunk >= 1, "loop_schedule: min_chunk must be >= 1");
    std::vector<double> clock(p, 0.0);
    std::int64_t at = 0;
    while (at < n) {
      std::int64_t remaining = n - at;
      std::int64_t size = std::max(gd.min_chunk, (remaining + p - 1) / p);
      size = std::min(size, remaining);
      std::int64_t thread = earliest_idle(clock);
      for (std::int64_t i = at; i < at + size; ++i) {
        assign(i, thread);
        clock[thread] += cost_of(gd.cost_fn, i);
      }
      at += size;
    }
  }
  return asg;
}

}  // namespace parwb::taskgraph
