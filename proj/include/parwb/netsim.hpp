#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parwb/topology.hpp"

namespace parwb::net {

inline constexpr std::int64_t ANY_SOURCE = -1;
inline constexpr std::int64_t ANY_TAG = -1;
inline constexpr std::int64_t PROC_NULL = -2;
inline constexpr std::int64_t UNDEFINED_COLOR = -32766;
// Tags at or above this base are reserved for collective algorithms.
inline constexpr std::int64_t RESERVED_TAG_BASE = std::int64_t{1} << 20;

struct CostModel {
  enum class Switching { Direct, StoreAndForward, Pipelined };
  enum class Ports { OnePorted, KPorted };

  double alpha = 0.0;
  double beta = 0.0;
  Switching switching = Switching::Direct;
  std::int64_t packet = 1;  // Pipelined packet size b
  Ports ports = Ports::OnePorted;
  std::int64_t k = 1;  // KPorted slot count
};

// Direct: alpha + beta*m. StoreAndForward: l*(alpha + beta*m). Pipelined(b):
// the l + ceil(m/b) - 1 packet hops each cost alpha + beta*b and are summed.
double transfer_cost(const CostModel& model, std::int64_t m, std::int64_t l);

// Packet size minimizing the pipelined cost: round(sqrt(m/(l-1)) *
// sqrt(alpha/beta)) clamped to [1, m]. Requires l >= 2.
std::int64_t optimal_packet_size(std::int64_t m, std::int64_t l, double alpha, double beta);

struct Payload {
  std::vector<std::int64_t> ints;
  std::vector<double> reals;
};

struct Status {
  std::int64_t src = PROC_NULL;  // comm rank of the matched sender
  std::int64_t tag = ANY_TAG;
  std::int64_t m = 0;
  Payload payload;
};

// Ordered immutable member list; index in `members` is the comm rank, the
// value the world rank.
struct Comm {
  std::int64_t id = 0;
  std::vector<std::int64_t> members;

  std::int64_t size() const { return static_cast<std::int64_t>(members.size()); }
  std::int64_t world_of(std::int64_t rank) const { return members[rank]; }
  std::int64_t rank_of_world(std::int64_t world) const {
    for (std::size_t i = 0; i < members.size(); ++i)
      if (members[i] == world) return static_cast<std::int64_t>(i);
    return -1;
  }
};

struct TranscriptEvent {
  enum class Kind { Send, Recv, Match, Deadlock, CollBegin, CollEnd };

  Kind kind = Kind::Send;
  double t = 0.0;
  std::int64_t src = -1;
  std::int64_t dst = -1;
  std::int64_t tag = -1;
  std::int64_t m = 0;
  std::string coll;          // collective marker name
  std::int64_t comm_id = 0;  // collective marker communicator
  std::int64_t seq = -1;     // collective marker per-comm sequence
};

struct DeadlockInfo {
  std::vector<std::int64_t> blocked;                         // world ranks
  std::vector<std::pair<std::int64_t, std::int64_t>> wait_for;  // (waiter, waited-on)
};

struct SimResult {
  std::vector<TranscriptEvent> transcript;
  std::vector<double> finish_times;
  double total_time = 0.0;
  std::optional<DeadlockInfo> deadlock;
  std::vector<std::string> unmatched;  // eager sends never received
};

struct SimConfig {
  Topology topology = Topology::fully_connected(1);
  CostModel cost;
  std::int64_t eager_threshold = 0;  // sends with m <= E complete locally
};

namespace detail {
class Engine;
}

// Handle through which a simulated process interacts with the engine. Sends
// with m greater than the eager threshold block until the transfer completes
// (rendezvous); recv always blocks. src/dst are comm ranks; PROC_NULL makes
// the operation a no-op.
class ProcCtx {
 public:
  std::int64_t world_rank() const { return rank_; }
  std::int64_t world_size() const;
  const Comm& world() const;
  double now() const;

  void compute(double duration);
  void send(const Comm& comm, std::int64_t dst, std::int64_t tag, std::int64_t m,
            Payload payload = {});
  Status recv(const Comm& comm, std::int64_t src, std::int64_t tag);
  // Bidirectional exchange occupying a single port slot for both directions.
  Status sendrecv(const Comm& comm, std::int64_t dst, std::int64_t sendtag, std::int64_t m,
                  Payload payload, std::int64_t src, std::int64_t recvtag);

  // Collective over `parent`: members are grouped by color (UNDEFINED_COLOR
  // joins nothing) and ranked by ascending (key, parent rank); clocks advance
  // to the latest entry.
  std::optional<Comm> comm_split(const Comm& parent, std::int64_t color, std::int64_t key);

  // Transcript markers bracketing a collective algorithm; begin returns the
  // reserved tag for this invocation.
  std::int64_t coll_begin(const Comm& comm, const std::string& name);
  void coll_end(const Comm& comm, const std::string& name, std::int64_t tag);

 private:
  friend class detail::Engine;
  ProcCtx(detail::Engine* e, std::int64_t r) : engine_(e), rank_(r) {}

  detail::Engine* engine_;
  std::int64_t rank_;
};

using ProcessFn = std::function<void(ProcCtx&)>;

// Deterministic cooperative simulation: the runnable process with the lowest
// world rank always steps first. Deadlock and unmatched messages are reported
// in the result, not thrown.
SimResult sim_run(const SimConfig& config, const std::vector<ProcessFn>& programs);

// Length of the longest chain of match events sharing an endpoint, taken in
// transcript order; measures an algorithm's dependent communication rounds.
std::int64_t dependent_rounds(const std::vector<TranscriptEvent>& transcript);

// Number of CollBegin markers emitted by world_rank (any name if empty).
std::int64_t collective_count(const std::vector<TranscriptEvent>& transcript,
                              std::int64_t world_rank, const std::string& name = "");

// Pure membership computation behind comm_split, exposed for direct tests:
// per distinct color (ascending), members sorted by (key, parent world rank).
std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> split_members(
    const std::vector<std::int64_t>& parent_members, const std::vector<std::int64_t>& colors,
    const std::vector<std::int64_t>& keys);

}  // namespace parwb::net
