#include "parwb/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

#include <boost/coroutine2/coroutine.hpp>

#include "parwb/errors.hpp"

namespace parwb::net {

double transfer_cost(const CostModel& model, std::int64_t m, std::int64_t l) {
  require(m >= 0, "transfer_cost: m < 0");
  require(l >= 1, "transfer_cost: l < 1");
  switch (model.switching) {
    case CostModel::Switching::Direct:
      return model.alpha + model.beta * static_cast<double>(m);
    case CostModel::Switching::StoreAndForward:
      return static_cast<double>(l) * (model.alpha + model.beta * static_cast<double>(m));
    case CostModel::Switching::Pipelined: {
      require(model.packet >= 1, "transfer_cost: packet < 1");
      std::int64_t packets = (m + model.packet - 1) / model.packet;
      double per_hop = model.alpha + model.beta * static_cast<double>(model.packet);
      return static_cast<double>(l + packets - 1) * per_hop;
    }
  }
  return 0.0;
}

std::int64_t optimal_packet_size(std::int64_t m, std::int64_t l, double alpha, double beta) {
  require(l >= 2, "optimal_packet_size: formula requires l > 1");
  require(m >= 1, "optimal_packet_size: m < 1");
  require(alpha > 0.0 && beta > 0.0, "optimal_packet_size: alpha and beta must be positive");
  double b = std::sqrt(static_cast<double>(m) / static_cast<double>(l - 1)) * std::sqrt(alpha / beta);
  return std::clamp<std::int64_t>(std::llround(b), 1, m);
}

std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> split_members(
    const std::vector<std::int64_t>& parent_members, const std::vector<std::int64_t>& colors,
    const std::vector<std::int64_t>& keys) {
  require(parent_members.size() == colors.size() && colors.size() == keys.size(),
          "split_members: size mismatch");
  std::map<std::int64_t, std::vector<std::pair<std::pair<std::int64_t, std::int64_t>, std::int64_t>>>
      by_color;
  for (std::size_t r = 0; r < parent_members.size(); ++r) {
    if (colors[r] == UNDEFINED_COLOR) continue;
    by_color[colors[r]].push_back(
        {{keys[r], static_cast<std::int64_t>(r)}, parent_members[r]});
  }
  std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> out;
  for (auto& [color, entries] : by_color) {
    std::sort(entries.begin(), entries.end());
    std::vector<std::int64_t> members;
    members.reserve(entries.size());
    for (auto& e : entries) members.push_back(e.second);
    out.emplace_back(color, std::move(members));
  }
  return out;
}

std::int64_t dependent_rounds(const std::vector<TranscriptEvent>& transcript) {
  // chain[r] = (length, completion time) of the longest dependent chain ending
  // at endpoint r. A match extends a chain only when it completes strictly
  // later; simultaneous matches at an endpoint belong to the same round.
  std::map<std::int64_t, std::pair<std::int64_t, double>> chain;
  std::int64_t best = 0;
  for (const TranscriptEvent& e : transcript) {
    if (e.kind != TranscriptEvent::Kind::Match) continue;
    std::int64_t v = 1;
    for (std::int64_t end : {e.src, e.dst}) {
      auto it = chain.find(end);
      if (it == chain.end()) continue;
      v = std::max(v, e.t > it->second.second ? it->second.first + 1 : it->second.first);
    }
    for (std::int64_t end : {e.src, e.dst}) {
      auto& slot = chain[end];
      slot.first = std::max(slot.first, v);
      slot.second = std::max(slot.second, e.t);
    }
    best = std::max(best, v);
  }
  return best;
}

std::int64_t collective_count(const std::vector<TranscriptEvent>& transcript,
                              std::int64_t world_rank, const std::string& name) {
  std::int64_t count = 0;
  for (const TranscriptEvent& e : transcript)
    if (e.kind == TranscriptEvent::Kind::CollBegin && e.src == world_rank &&
        (name.empty() || e.coll == name))
      ++count;
  return count;
}

namespace detail {

using coro_t = boost::coroutines2::coroutine<void>;

struct PendingSend {
  std::int64_t id = 0;
  std::int64_t src = 0;  // world
  std::int64_t dst = 0;  // world
  std::int64_t tag = 0;
  std::int64_t comm_id = 0;
  std::int64_t m = 0;
  Payload payload;
  double ready = 0.0;
  bool rendezvous = true;
  std::int64_t group = -1;
};

struct PendingRecv {
  std::int64_t dst = 0;                 // world
  std::int64_t src_want = ANY_SOURCE;   // world or ANY_SOURCE
  std::int64_t tag_want = ANY_TAG;
  std::int64_t comm_id = 0;
  double ready = 0.0;
  Status* out = nullptr;
  const Comm* comm = nullptr;
  std::int64_t group = -1;
};

// Port reservation shared by both directions of one sendrecv.
struct SrGroup {
  std::int64_t proc = 0;
  int pending = 0;
  double snapshot = 0.0;
  int slot = 0;
  double end_max = 0.0;
  bool finalized = false;
};

struct SplitState {
  std::vector<std::int64_t> parent_members;
  std::vector<std::int64_t> colors, keys;
  std::vector<char> arrived;
  std::int64_t count = 0;
  double max_entry = 0.0;
  std::map<std::int64_t, Comm> result_by_world;
};

struct Proc {
  enum class St { Runnable, BlockedSend, BlockedRecv, BlockedSr, BlockedColl, Done };

  std::unique_ptr<coro_t::pull_type> co;
  coro_t::push_type* yield = nullptr;
  St st = St::Runnable;
  double clock = 0.0;
  std::vector<double> ports;
  std::int64_t wait_peer = -1, wait_tag = -1, wait_m = 0;
  std::map<std::int64_t, std::int64_t> coll_seq;
};

class Engine {
 public:
  Engine(const SimConfig& cfg, const std::vector<ProcessFn>& programs)
      : cfg_(cfg), programs_(programs), p_(static_cast<std::int64_t>(programs.size())) {
    require(p_ >= 1, "sim_run: no processes");
    require(cfg_.topology.p == p_, "sim_run: topology size != process count");
    require(cfg_.eager_threshold >= 0, "sim_run: eager threshold < 0");
    world_.id = 0;
    world_.members.resize(p_);
    std::iota(world_.members.begin(), world_.members.end(), 0);
    hops_.reserve(p_);
    for (std::int64_t r = 0; r < p_; ++r) {
      hops_.push_back(bfs_distances(cfg_.topology, r));
      for (std::int64_t d : hops_.back()) require(d >= 0, "disconnected networks cannot be used");
    }
    std::int64_t k = cfg_.cost.ports == CostModel::Ports::KPorted ? cfg_.cost.k : 1;
    require(k >= 1, "sim_run: ports k < 1");
    procs_.resize(p_);
    for (auto& pr : procs_) pr.ports.assign(k, 0.0);
  }

  SimResult run();

  const Comm& world() const { return world_; }
  std::int64_t p() const { return p_; }
  Proc& proc(std::int64_t r) { return procs_[r]; }
  const SimConfig& cfg() const { return cfg_; }

  void yield_current() { (*procs_[current_].yield)(); }

  void push_event(TranscriptEvent e) { transcript_.push_back(std::move(e)); }

  // Posts a send; returns true if it matched immediately. PROC_NULL is
  // handled by the caller.
  bool post_send(std::int64_t me, const Comm& comm, std::int64_t dst_rank, std::int64_t tag,
                 std::int64_t m, Payload payload, std::int64_t group) {
    require(dst_rank >= 0 && dst_rank < comm.size(), "send: destination rank out of range");
    require(tag >= 0, "send: tag must be >= 0");
    require(m >= 0, "send: m < 0");
    std::int64_t dst = comm.world_of(dst_rank);
    PendingSend s{next_send_id_++, me,       dst,
                  tag,             comm.id,  m,
                  std::move(payload),        procs_[me].clock,
                  m > cfg_.eager_threshold,  group};
    push_event({TranscriptEvent::Kind::Send, procs_[me].clock, me, dst, tag, m, "", comm.id, -1});
    for (std::size_t i = 0; i < recvs_.size(); ++i) {
      PendingRecv& r = recvs_[i];
      if (r.comm_id != comm.id || r.dst != dst) continue;
      if (r.src_want != ANY_SOURCE && r.src_want != me) continue;
      if (r.tag_want != ANY_TAG && r.tag_want != tag) continue;
      PendingRecv matched = r;
      recvs_.erase(recvs_.begin() + static_cast<std::ptrdiff_t>(i));
      resolve(std::move(s), matched);
      return true;
    }
    sends_.push_back(std::move(s));
    return false;
  }

  // Posts a receive; returns true if it matched immediately.
  bool post_recv(std::int64_t me, const Comm& comm, std::int64_t src_rank, std::int64_t tag,
                 Status* out, std::int64_t group) {
    require(src_rank == ANY_SOURCE || (src_rank >= 0 && src_rank < comm.size()),
            "recv: source rank out of range");
    require(tag == ANY_TAG || tag >= 0, "recv: bad tag");
    std::int64_t src_want = src_rank == ANY_SOURCE ? ANY_SOURCE : comm.world_of(src_rank);
    PendingRecv r{me, src_want, tag, comm.id, procs_[me].clock, out, &comm, group};
    push_event(
        {TranscriptEvent::Kind::Recv, procs_[me].clock, src_want, me, tag, 0, "", comm.id, -1});
    std::int64_t best = -1;
    for (std::size_t i = 0; i < sends_.size(); ++i) {
      const PendingSend& s = sends_[i];
      if (s.comm_id != comm.id || s.dst != me) continue;
      if (src_want != ANY_SOURCE && s.src != src_want) continue;
      if (tag != ANY_TAG && s.tag != tag) continue;
      if (best < 0 || s.src < sends_[best].src ||
          (s.src == sends_[best].src && s.id < sends_[best].id))
        best = static_cast<std::int64_t>(i);
    }
    if (best >= 0) {
      PendingSend s = std::move(sends_[best]);
      sends_.erase(sends_.begin() + static_cast<std::ptrdiff_t>(best));
      resolve(std::move(s), r);
      return true;
    }
    recvs_.push_back(r);
    return false;
  }

  SrGroup& group(std::int64_t gid) { return groups_[gid]; }

  std::int64_t new_group(std::int64_t me) {
    Proc& pr = procs_[me];
    int slot = min_slot(pr.ports);
    groups_.push_back({me, 0, pr.ports[slot], slot, pr.clock, false});
    return static_cast<std::int64_t>(groups_.size()) - 1;
  }

  std::map<std::pair<std::int64_t, std::int64_t>, SplitState>& splits() { return splits_; }
  std::int64_t alloc_comm_id() { return next_comm_id_++; }

 private:
  static int min_slot(const std::vector<double>& ports) {
    int best = 0;
    for (std::size_t i = 1; i < ports.size(); ++i)
      if (ports[i] < ports[best]) best = static_cast<int>(i);
    return best;
  }

  void group_transfer_end(std::int64_t gid, double end, bool counted) {
    SrGroup& g = groups_[gid];
    g.end_max = std::max(g.end_max, end);
    if (g.finalized)
      procs_[g.proc].ports[g.slot] = std::max(procs_[g.proc].ports[g.slot], end);
    if (counted) {
      g.pending--;
      if (g.pending == 0 && procs_[g.proc].st == Proc::St::BlockedSr)
        procs_[g.proc].st = Proc::St::Runnable;
    }
  }

  void resolve(PendingSend s, PendingRecv r) {
    std::int64_t l = std::max<std::int64_t>(1, hops_[s.src][s.dst]);
    double cost = transfer_cost(cfg_.cost, s.m, l);
    double s_avail, r_avail;
    int s_slot = -1, r_slot = -1;
    if (s.group >= 0) {
      s_avail = groups_[s.group].snapshot;
    } else {
      s_slot = min_slot(procs_[s.src].ports);
      s_avail = procs_[s.src].ports[s_slot];
    }
    if (r.group >= 0) {
      r_avail = groups_[r.group].snapshot;
    } else {
      r_slot = min_slot(procs_[r.dst].ports);
      r_avail = procs_[r.dst].ports[r_slot];
    }
    double start = std::max({s.ready, r.ready, s_avail, r_avail});
    double end = start + cost;

    if (s_slot >= 0)
      procs_[s.src].ports[s_slot] = end;
    else
      group_transfer_end(s.group, end, s.rendezvous);
    if (s.group < 0 && s.rendezvous) {
      procs_[s.src].clock = std::max(procs_[s.src].clock, end);
      if (procs_[s.src].st == Proc::St::BlockedSend) procs_[s.src].st = Proc::St::Runnable;
    }

    *r.out = Status{r.comm->rank_of_world(s.src), s.tag, s.m, std::move(s.payload)};
    if (r_slot >= 0)
      procs_[r.dst].ports[r_slot] = end;
    else
      group_transfer_end(r.group, end, true);
    if (r.group < 0) {
      procs_[r.dst].clock = std::max(procs_[r.dst].clock, end);
      if (procs_[r.dst].st == Proc::St::BlockedRecv) procs_[r.dst].st = Proc::St::Runnable;
    }

    push_event({TranscriptEvent::Kind::Match, end, s.src, s.dst, s.tag, s.m, "", s.comm_id, -1});
  }

  void report_deadlock(SimResult& res) {
    DeadlockInfo info;
    for (std::int64_t rnk = 0; rnk < p_; ++rnk) {
      Proc& pr = procs_[rnk];
      if (pr.st == Proc::St::Done || pr.st == Proc::St::Runnable) continue;
      info.blocked.push_back(rnk);
      if (pr.wait_peer >= 0) info.wait_for.emplace_back(rnk, pr.wait_peer);
      push_event({TranscriptEvent::Kind::Deadlock, pr.clock, rnk, pr.wait_peer, pr.wait_tag,
                  pr.wait_m, "", 0, -1});
    }
    res.deadlock = std::move(info);
  }

  SimConfig cfg_;
  const std::vector<ProcessFn>& programs_;
  std::int64_t p_;
  Comm world_;
  std::vector<Proc> procs_;
  std::vector<std::vector<std::int64_t>> hops_;
  std::vector<PendingSend> sends_;
  std::vector<PendingRecv> recvs_;
  std::deque<SrGroup> groups_;
  std::map<std::pair<std::int64_t, std::int64_t>, SplitState> splits_;
  std::vector<TranscriptEvent> transcript_;
  std::int64_t next_send_id_ = 0;
  std::int64_t next_comm_id_ = 1;
  std::int64_t current_ = -1;
};

SimResult Engine::run() {
  for (std::int64_t r = 0; r < p_; ++r) {
    procs_[r].co = std::make_unique<coro_t::pull_type>([this, r](coro_t::push_type& sink) {
      procs_[r].yield = &sink;
      sink();
      ProcCtx ctx(this, r);
      programs_[r](ctx);
    });
  }
  SimResult res;
  for (;;) {
    std::int64_t next = -1;
    bool alive = false;
    for (std::int64_t r = 0; r < p_; ++r) {
      if (procs_[r].st == Proc::St::Done) continue;
      alive = true;
      if (procs_[r].st == Proc::St::Runnable) {
        next = r;
        break;
      }
    }
    if (!alive) break;
    if (next < 0) {
      report_deadlock(res);
      break;
    }
    current_ = next;
    (*procs_[next].co)();
    if (!*procs_[next].co) procs_[next].st = Proc::St::Done;
    current_ = -1;
  }
  res.transcript = std::move(transcript_);
  res.finish_times.resize(p_);
  for (std::int64_t r = 0; r < p_; ++r) {
    res.finish_times[r] = procs_[r].clock;
    res.total_time = std::max(res.total_time, procs_[r].clock);
  }
  // Rendezvous sends still pending are deadlock participants, not buffered
  // leftovers; only eager sends can complete locally and go unreceived.
  for (const PendingSend& s : sends_)
    if (!s.rendezvous)
      res.unmatched.push_back("unmatched send src=" + std::to_string(s.src) +
                              " dst=" + std::to_string(s.dst) + " tag=" + std::to_string(s.tag) +
                              " m=" + std::to_string(s.m));
  return res;
}

}  // namespace detail

std::int64_t ProcCtx::world_size() const { return engine_->p(); }
const Comm& ProcCtx::world() const { return engine_->world(); }
double ProcCtx::now() const { return engine_->proc(rank_).clock; }

void ProcCtx::compute(double duration) {
  require(duration >= 0.0, "compute: negative duration");
  engine_->proc(rank_).clock += duration;
}

void ProcCtx::send(const Comm& comm, std::int64_t dst, std::int64_t tag, std::int64_t m,
                   Payload payload) {
  if (dst == PROC_NULL) return;
  bool resolved = engine_->post_send(rank_, comm, dst, tag, m, std::move(payload), -1);
  if (!resolved && m > engine_->cfg().eager_threshold) {
    detail::Proc& pr = engine_->proc(rank_);
    pr.st = detail::Proc::St::BlockedSend;
    pr.wait_peer = comm.world_of(dst);
    pr.wait_tag = tag;
    pr.wait_m = m;
    engine_->yield_current();
  }
}

Status ProcCtx::recv(const Comm& comm, std::int64_t src, std::int64_t tag) {
  Status out;
  if (src == PROC_NULL) {
    out.src = PROC_NULL;
    out.tag = tag;
    return out;
  }
  bool resolved = engine_->post_recv(rank_, comm, src, tag, &out, -1);
  if (!resolved) {
    detail::Proc& pr = engine_->proc(rank_);
    pr.st = detail::Proc::St::BlockedRecv;
    pr.wait_peer = src == ANY_SOURCE ? -1 : comm.world_of(src);
    pr.wait_tag = tag;
    pr.wait_m = 0;
    engine_->yield_current();
  }
  return out;
}

Status ProcCtx::sendrecv(const Comm& comm, std::int64_t dst, std::int64_t sendtag, std::int64_t m,
                         Payload payload, std::int64_t src, std::int64_t recvtag) {
  detail::Proc& pr = engine_->proc(rank_);
  std::int64_t gid = engine_->new_group(rank_);
  Status out;
  if (src == PROC_NULL) {
    out.src = PROC_NULL;
    out.tag = recvtag;
  }
  if (dst != PROC_NULL) {
    if (m > engine_->cfg().eager_threshold) engine_->group(gid).pending++;
    engine_->post_send(rank_, comm, dst, sendtag, m, std::move(payload), gid);
  }
  if (src != PROC_NULL) {
    engine_->group(gid).pending++;
    engine_->post_recv(rank_, comm, src, recvtag, &out, gid);
  }
  while (engine_->group(gid).pending > 0) {
    pr.st = detail::Proc::St::BlockedSr;
    pr.wait_peer = src != PROC_NULL && src != ANY_SOURCE ? comm.world_of(src)
                   : dst != PROC_NULL                    ? comm.world_of(dst)
                                                         : -1;
    pr.wait_tag = src != PROC_NULL ? recvtag : sendtag;
    pr.wait_m = m;
    engine_->yield_current();
  }
  detail::SrGroup& g = engine_->group(gid);
  g.finalized = true;
  pr.ports[g.slot] = std::max(pr.ports[g.slot], g.end_max);
  pr.clock = std::max(pr.clock, g.end_max);
  return out;
}

std::int64_t ProcCtx::coll_begin(const Comm& comm, const std::string& name) {
  detail::Proc& pr = engine_->proc(rank_);
  std::int64_t seq = pr.coll_seq[comm.id]++;
  engine_->push_event({TranscriptEvent::Kind::CollBegin, pr.clock, rank_, -1, -1, 0, name,
                       comm.id, seq});
  return RESERVED_TAG_BASE + seq;
}

void ProcCtx::coll_end(const Comm& comm, const std::string& name, std::int64_t tag) {
  detail::Proc& pr = engine_->proc(rank_);
  engine_->push_event({TranscriptEvent::Kind::CollEnd, pr.clock, rank_, -1, -1, 0, name, comm.id,
                       tag - RESERVED_TAG_BASE});
}

std::optional<Comm> ProcCtx::comm_split(const Comm& parent, std::int64_t color, std::int64_t key) {
  detail::Proc& pr = engine_->proc(rank_);
  std::int64_t my_crank = parent.rank_of_world(rank_);
  require(my_crank >= 0, "comm_split: caller not a member");
  std::int64_t tag = coll_begin(parent, "comm_split");
  std::int64_t seq = tag - RESERVED_TAG_BASE;
  auto skey = std::make_pair(parent.id, seq);
  detail::SplitState& st = engine_->splits()[skey];
  if (st.parent_members.empty()) {
    st.parent_members = parent.members;
    st.colors.assign(parent.size(), 0);
    st.keys.assign(parent.size(), 0);
    st.arrived.assign(parent.size(), 0);
  }
  st.colors[my_crank] = color;
  st.keys[my_crank] = key;
  st.arrived[my_crank] = 1;
  st.count++;
  st.max_entry = std::max(st.max_entry, pr.clock);
  if (st.count < parent.size()) {
    pr.st = detail::Proc::St::BlockedColl;
    pr.wait_peer = -1;
    for (std::int64_t r = 0; r < parent.size(); ++r)
      if (!st.arrived[r]) {
        pr.wait_peer = parent.members[r];
        break;
      }
    pr.wait_tag = -1;
    pr.wait_m = 0;
    engine_->yield_current();
  } else {
    auto children = split_members(st.parent_members, st.colors, st.keys);
    for (auto& [c, members] : children) {
      Comm child{engine_->alloc_comm_id(), members};
      for (std::int64_t w : members) st.result_by_world[w] = child;
    }
    for (std::int64_t w : st.parent_members) {
      detail::Proc& other = engine_->proc(w);
      other.clock = std::max(other.clock, st.max_entry);
      if (w != rank_ && other.st == detail::Proc::St::BlockedColl)
        other.st = detail::Proc::St::Runnable;
    }
  }
  detail::SplitState& done = engine_->splits()[skey];
  pr.clock = std::max(pr.clock, done.max_entry);
  std::optional<Comm> out;
  auto it = done.result_by_world.find(rank_);
  if (it != done.result_by_world.end()) out = it->second;
  coll_end(parent, "comm_split", tag);
  return out;
}

SimResult sim_run(const SimConfig& config, const std::vector<ProcessFn>& programs) {
  detail::Engine engine(config, programs);
  return engine.run();
}

}  // namespace parwb::net
