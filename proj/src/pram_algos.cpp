#include <algorithm>
#include <cmath>
#include <variant>

#include "parwb/errors.hpp"
#include "parwb/pram.hpp"

namespace parwb::pram {

namespace {

std::int64_t ceil_log2(std::int64_t n) {
  std::int64_t r = 0;
  std::int64_t v = 1;
  while (v < n) {
    v <<= 1;
    ++r;
  }
  return r;
}

// Smallest t >= 1 with 2^(2^t) >= n, i.e. ceil(log2 log2 n) for n > 2.
std::int64_t ceil_loglog2(std::int64_t n) {
  std::int64_t t = 1;
  long double v = 4.0L;  // 2^(2^1)
  while (v < static_cast<long double>(n)) {
    ++t;
    v = v * v;
  }
  return t;
}

// Planned-step machinery shared by the knockout-style programs. Each planned
// op represents one assigned processor; values are always computed from the
// pre-step memory handed to next().
struct WriteConst {
  std::int64_t cell;
  Word value;
};
struct ComparePair {  // knockout: flag_cell cleared when mem[lo] < mem[hi]
  std::int64_t lo, hi, flag_cell;
};
struct SelectIfFlag {  // out written with mem[val_cell] when mem[flag_cell] == 1
  std::int64_t flag_cell, val_cell, out_cell;
};
struct ScanPiece {  // sequential block scan, at most two elements per step
  std::int64_t block;
  std::int64_t c0, c1;  // c1 < 0 if absent
  std::int64_t out_cell;  // < 0 while the block's scan is unfinished
  bool first;
};
using PlannedOp = std::variant<WriteConst, ComparePair, SelectIfFlag, ScanPiece>;

class PlannedProgram : public Program {
public:
  std::vector<std::vector<PlannedOp>> plan;
  std::vector<Word> block_acc;

  std::optional<Step> next(const Memory& mem) override {
    if (cursor_ >= plan.size()) return std::nullopt;
    const auto& ops = plan[cursor_++];
    Step st;
    std::int64_t proc = 0;
    for (const PlannedOp& op : ops) {
      if (const auto* w = std::get_if<WriteConst>(&op)) {
        st.writes.push_back({proc, w->cell, true, w->value});
      } else if (const auto* c = std::get_if<ComparePair>(&op)) {
        st.reads.push_back({proc, c->lo});
        st.reads.push_back({proc, c->hi});
        st.writes.push_back({proc, c->flag_cell, mem[c->lo] < mem[c->hi], 0});
      } else if (const auto* s = std::get_if<SelectIfFlag>(&op)) {
        st.reads.push_back({proc, s->flag_cell});
        st.reads.push_back({proc, s->val_cell});
        st.writes.push_back({proc, s->out_cell, mem[s->flag_cell] == 1, mem[s->val_cell]});
      } else if (const auto* p = std::get_if<ScanPiece>(&op)) {
        Word v = mem[p->c0];
        st.reads.push_back({proc, p->c0});
        if (p->c1 >= 0) {
          st.reads.push_back({proc, p->c1});
          v = std::max(v, mem[p->c1]);
        }
        if (!p->first) v = std::max(v, block_acc[p->block]);
        block_acc[p->block] = v;
        if (p->out_cell >= 0) st.writes.push_back({proc, p->out_cell, true, v});
      }
      ++proc;
    }
    st.ops = proc;
    return st;
  }

private:
  std::size_t cursor_ = 0;
};

// Appends the three knockout-maximum steps for a set of groups; all groups
// share the same three global steps. Each group reads its input cells and
// writes its maximum to its output cell; flag scratch starts at flag_base.
struct KnockoutGroup {
  std::vector<std::int64_t> in_cells;
  std::int64_t out_cell;
  std::int64_t flag_base;
};

void append_knockout_phase(PlannedProgram& prog, const std::vector<KnockoutGroup>& groups) {
  std::vector<PlannedOp> init, duel, select;
  for (const KnockoutGroup& g : groups) {
    std::int64_t s = static_cast<std::int64_t>(g.in_cells.size());
    for (std::int64_t i = 0; i < s; ++i) init.push_back(WriteConst{g.flag_base + i, 1});
    for (std::int64_t i = 0; i < s; ++i)
      for (std::int64_t j = 0; j < s; ++j)
        if (i != j) duel.push_back(ComparePair{g.in_cells[i], g.in_cells[j], g.flag_base + i});
    for (std::int64_t i = 0; i < s; ++i)
      select.push_back(SelectIfFlag{g.flag_base + i, g.in_cells[i], g.out_cell});
  }
  prog.plan.push_back(std::move(init));
  prog.plan.push_back(std::move(duel));
  prog.plan.push_back(std::move(select));
}

Word seq_max(const std::vector<Word>& a) {
  Word m = a.front();
  for (Word v : a) m = std::max(m, v);
  return m;
}

}  // namespace

MaxResult fastmax(const std::vector<Word>& a, Variant variant) {
  require(!a.empty(), "fastmax: empty array");
  std::int64_t n = static_cast<std::int64_t>(a.size());
  Memory mem(2 * n + 1, 0);
  std::copy(a.begin(), a.end(), mem.begin());

  PlannedProgram prog;
  std::vector<std::int64_t> in_cells(n);
  for (std::int64_t i = 0; i < n; ++i) in_cells[i] = i;
  append_knockout_phase(prog, {KnockoutGroup{in_cells, 2 * n, n}});

  RunResult run = pram_run(prog, variant, std::move(mem));
  return MaxResult{run.memory[2 * n], run.stats};
}

namespace {

class LogmaxProgram : public Program {
public:
  LogmaxProgram(std::int64_t n, std::int64_t scratch_base) : alloc_(scratch_base) {
    addrs_.resize(n);
    for (std::int64_t i = 0; i < n; ++i) addrs_[i] = i;
  }

  std::optional<Step> next(const Memory& mem) override {
    std::int64_t nn = static_cast<std::int64_t>(addrs_.size());
    if (nn <= 1) return std::nullopt;
    std::int64_t h = (nn + 1) / 2;
    std::int64_t pairs = nn / 2;
    Step st;
    std::vector<std::int64_t> fresh;
    for (std::int64_t t = 0; t < pairs; ++t) {
      std::int64_t c1 = addrs_[t], c2 = addrs_[t + h];
      st.reads.push_back({t, c1});
      st.reads.push_back({t, c2});
      st.writes.push_back({t, alloc_ + t, true, std::max(mem[c1], mem[c2])});
      fresh.push_back(alloc_ + t);
    }
    // The unpaired middle element (odd nn) is carried without moving it.
    if (nn % 2 == 1) fresh.push_back(addrs_[h - 1]);
    addrs_ = std::move(fresh);
    alloc_ += pairs;
    st.ops = pairs;
    return st;
  }

  std::int64_t result_cell() const { return addrs_[0]; }

private:
  std::vector<std::int64_t> addrs_;
  std::int64_t alloc_;
};

}  // namespace

MaxResult logmax(const std::vector<Word>& a, Variant variant) {
  require(!a.empty(), "logmax: empty array");
  std::int64_t n = static_cast<std::int64_t>(a.size());
  Memory mem(2 * n, 0);
  std::copy(a.begin(), a.end(), mem.begin());
  LogmaxProgram prog(n, n);
  RunResult run = pram_run(prog, variant, std::move(mem));
  return MaxResult{run.memory[prog.result_cell()], run.stats};
}

namespace {

struct SplitNode {
  std::vector<std::int64_t> slots;  // input slot indices into the level below
  std::int64_t depth = 0;
};

}  // namespace

MaxResult loglogmax(const std::vector<Word>& a, Variant variant) {
  require(a.size() >= 1, "loglogmax: empty array");
  std::int64_t n = static_cast<std::int64_t>(a.size());
  if (n < 4) return logmax(a, variant);

  std::int64_t g = ceil_loglog2(n);
  std::int64_t nb = (n + g - 1) / g;

  // Square-root splitting recursion over the nb block maxima, bottoming out
  // at groups of size <= 4. Built breadth-first; children of a node slice its
  // contiguous slot range into ceil(sqrt(size)) nearly equal parts.
  struct Range {
    std::int64_t lo, hi, depth, parent;  // slot range [lo,hi) of block maxima
  };
  std::vector<Range> nodes;
  nodes.push_back({0, nb, 0, -1});
  std::int64_t max_depth = 0;
  for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
    Range r = nodes[idx];
    std::int64_t size = r.hi - r.lo;
    max_depth = std::max(max_depth, r.depth);
    if (size <= 4) continue;
    std::int64_t k = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(size))));
    std::int64_t base = size / k, rem = size % k;
    std::int64_t at = r.lo;
    for (std::int64_t c = 0; c < k; ++c) {
      std::int64_t len = base + (c < rem ? 1 : 0);
      nodes.push_back({at, at + len, r.depth + 1, static_cast<std::int64_t>(idx)});
      at += len;
    }
  }

  // Memory layout: input a, block maxima (aliased onto a when g == 1), then
  // per-node output and flag scratch.
  std::int64_t alloc = n;
  std::vector<std::int64_t> block_cell(nb);
  if (g == 1) {
    for (std::int64_t b = 0; b < nb; ++b) block_cell[b] = b;
  } else {
    for (std::int64_t b = 0; b < nb; ++b) block_cell[b] = alloc + b;
    alloc += nb;
  }
  std::vector<std::int64_t> node_out(nodes.size()), node_flags(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    node_out[i] = alloc++;
  }
  std::vector<std::vector<std::int64_t>> node_children(nodes.size());
  for (std::size_t i = 1; i < nodes.size(); ++i)
    node_children[nodes[i].parent].push_back(static_cast<std::int64_t>(i));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::int64_t fan = node_children[i].empty()
                           ? nodes[i].hi - nodes[i].lo
                           : static_cast<std::int64_t>(node_children[i].size());
    node_flags[i] = alloc;
    alloc += fan;
  }

  PlannedProgram prog;
  prog.block_acc.assign(nb, 0);

  // Base phase: one processor per block scans its <= g elements, two reads a
  // step, writing the block maximum fused into its final step.
  if (g >= 2) {
    std::int64_t scan_steps = (g + 1) / 2;
    for (std::int64_t t = 0; t < scan_steps; ++t) {
      std::vector<PlannedOp> ops;
      for (std::int64_t b = 0; b < nb; ++b) {
        std::int64_t lo = b * g, hi = std::min(n, (b + 1) * g);
        std::int64_t c0 = lo + 2 * t;
        if (c0 >= hi) continue;
        std::int64_t c1 = c0 + 1 < hi ? c0 + 1 : -1;
        bool last = c0 + 2 >= hi;
        ops.push_back(ScanPiece{b, c0, c1, last ? block_cell[b] : -1, t == 0});
      }
      prog.plan.push_back(std::move(ops));
    }
  }

  // Combine phases, deepest first; every node at a depth (leaf or internal)
  // runs its knockout maximum in the same three global steps.
  for (std::int64_t depth = max_depth; depth >= 0; --depth) {
    std::vector<KnockoutGroup> groups;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].depth != depth) continue;
      KnockoutGroup kg;
      kg.out_cell = node_out[i];
      kg.flag_base = node_flags[i];
      if (node_children[i].empty()) {
        for (std::int64_t s = nodes[i].lo; s < nodes[i].hi; ++s)
          kg.in_cells.push_back(block_cell[s]);
      } else {
        for (std::int64_t c : node_children[i]) kg.in_cells.push_back(node_out[c]);
      }
      groups.push_back(std::move(kg));
    }
    append_knockout_phase(prog, groups);
  }

  Memory mem(alloc, 0);
  std::copy(a.begin(), a.end(), mem.begin());
  RunResult run = pram_run(prog, variant, std::move(mem));
  return MaxResult{run.memory[node_out[0]], run.stats};
}

namespace {

class MatmulProgram : public Program {
public:
  MatmulProgram(std::int64_t m, std::int64_t l, std::int64_t n)
      : m_(m), l_(l), n_(n), acc_(m * n, 0) {}

  std::optional<Step> next(const Memory& mem) override {
    if (k_ >= l_) return std::nullopt;
    std::int64_t a_base = 0, b_base = m_ * l_, c_base = m_ * l_ + l_ * n_;
    bool last = k_ + 1 == l_;
    Step st;
    for (std::int64_t i = 0; i < m_; ++i) {
      for (std::int64_t j = 0; j < n_; ++j) {
        std::int64_t proc = i * n_ + j;
        std::int64_t ca = a_base + i * l_ + k_;
        std::int64_t cb = b_base + k_ * n_ + j;
        st.reads.push_back({proc, ca});
        st.reads.push_back({proc, cb});
        acc_[i * n_ + j] += mem[ca] * mem[cb];
        if (last) st.writes.push_back({proc, c_base + i * n_ + j, true, acc_[i * n_ + j]});
      }
    }
    st.ops = m_ * n_;
    ++k_;
    return st;
  }

private:
  std::int64_t m_, l_, n_, k_ = 0;
  std::vector<Word> acc_;
};

}  // namespace

MatmulResult pram_matmul(const WordMatrix& a, const WordMatrix& b, Variant variant) {
  require(a.rows >= 1 && a.cols >= 1 && b.rows >= 1 && b.cols >= 1,
          "pram_matmul: dimensions must be positive");
  require(a.cols == b.rows, "pram_matmul: dimension mismatch");
  std::int64_t m = a.rows, l = a.cols, n = b.cols;
  Memory mem(m * l + l * n + m * n, 0);
  std::copy(a.data.begin(), a.data.end(), mem.begin());
  std::copy(b.data.begin(), b.data.end(), mem.begin() + m * l);
  MatmulProgram prog(m, l, n);
  RunResult run = pram_run(prog, variant, std::move(mem));
  WordMatrix c{m, n, std::vector<Word>(run.memory.begin() + m * l + l * n, run.memory.end())};
  return MatmulResult{std::move(c), run.stats};
}

namespace {

// Pointer doubling; ping-pong regions avoid reading and writing the same cell
// within one step. s holds the segment sum over [i, ptr[i]), which is the
// operator identity at tails, so repeated accumulation past the tail is a
// no-op; the finalization step adds the tail's own value.
class WyllieProgram : public Program {
public:
  WyllieProgram(std::int64_t n, std::int64_t rounds) : n_(n), rounds_(rounds) {}

  std::optional<Step> next(const Memory& mem) override {
    if (round_ > rounds_) return std::nullopt;
    std::int64_t pc = cur_ ? 3 * n_ : 0, dc = pc + n_, sc = pc + 2 * n_;
    Step st;
    if (round_ == rounds_) {  // finalization
      std::int64_t values = 6 * n_, out = 7 * n_;
      for (std::int64_t i = 0; i < n_; ++i) {
        std::int64_t tail = mem[pc + i];
        st.reads.push_back({i, sc + i});
        st.reads.push_back({i, pc + i});
        st.reads.push_back({i, values + tail});
        st.writes.push_back({i, out + i, true, mem[sc + i] + mem[values + tail]});
      }
      st.ops = n_;
      ++round_;
      return st;
    }
    std::int64_t pn = cur_ ? 0 : 3 * n_, dn = pn + n_, sn = pn + 2 * n_;
    for (std::int64_t i = 0; i < n_; ++i) {
      std::int64_t pi = mem[pc + i];
      std::vector<std::int64_t> cells = {pc + i, pc + pi, dc + i, dc + pi, sc + i, sc + pi};
      std::sort(cells.begin(), cells.end());
      cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
      for (std::int64_t cell : cells) st.reads.push_back({i, cell});
      st.writes.push_back({i, pn + i, true, mem[pc + pi]});
      st.writes.push_back({i, dn + i, true, mem[dc + i] + mem[dc + pi]});
      st.writes.push_back({i, sn + i, true, mem[sc + i] + mem[sc + pi]});
    }
    st.ops = n_;
    cur_ ^= 1;
    ++round_;
    return st;
  }

  bool final_in_upper() const { return rounds_ % 2 == 1; }

private:
  std::int64_t n_, rounds_, round_ = 0;
  int cur_ = 0;
};

}  // namespace

ListRankResult wyllie_list_rank(const std::vector<std::int64_t>& next,
                                const std::vector<Word>& values, Variant variant) {
  std::int64_t n = static_cast<std::int64_t>(next.size());
  require(n >= 1, "wyllie_list_rank: empty list");
  require(values.size() == next.size(), "wyllie_list_rank: values size mismatch");
  std::vector<std::int64_t> indeg(n, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    require(next[i] >= 0 && next[i] < n, "wyllie_list_rank: next out of bounds");
    if (next[i] != i) indeg[next[i]]++;
  }
  for (std::int64_t i = 0; i < n; ++i)
    require(indeg[i] <= 1, "wyllie_list_rank: node with more than one predecessor");
  // Every node must reach a tail (no pointer cycles other than tail self-loops).
  std::vector<int> state(n, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t u = i;
    std::vector<std::int64_t> path;
    while (state[u] == 0 && next[u] != u) {
      state[u] = 1;
      path.push_back(u);
      u = next[u];
    }
    require(state[u] != 1 || next[u] == u, "wyllie_list_rank: cycle without tail");
    for (std::int64_t v : path) state[v] = 2;
    state[u] = 2;
  }

  std::int64_t rounds = ceil_log2(n);
  Memory mem(8 * n, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    mem[i] = next[i];
    mem[n + i] = next[i] == i ? 0 : 1;
    mem[2 * n + i] = next[i] == i ? 0 : values[i];
    mem[6 * n + i] = values[i];
  }
  WyllieProgram prog(n, rounds);
  RunResult run = pram_run(prog, variant, std::move(mem));
  std::int64_t dist_base = (prog.final_in_upper() ? 3 * n : 0) + n;
  ListRankResult out;
  out.dist.assign(run.memory.begin() + dist_base, run.memory.begin() + dist_base + n);
  out.sums.assign(run.memory.begin() + 7 * n, run.memory.begin() + 8 * n);
  out.stats = run.stats;
  return out;
}

}  // namespace parwb::pram
