#include "parwb/pram.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "parwb/errors.hpp"

namespace parwb::pram {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::EREW: return "EREW";
    case Variant::CREW: return "CREW";
    case Variant::CRCW_Common: return "CRCW_Common";
    case Variant::CRCW_Arbitrary: return "CRCW_Arbitrary";
    case Variant::CRCW_Priority: return "CRCW_Priority";
  }
  return "?";
}

std::optional<Variant> variant_from_name(const std::string& name) {
  for (Variant v : {Variant::EREW, Variant::CREW, Variant::CRCW_Common,
                    Variant::CRCW_Arbitrary, Variant::CRCW_Priority}) {
    if (name == variant_name(v)) return v;
  }
  return std::nullopt;
}

const char* conflict_kind_name(ConflictKind k) {
  switch (k) {
    case ConflictKind::RwMix: return "RW-mix";
    case ConflictKind::ConcurrentReadUnderErew: return "concurrent-read-under-EREW";
    case ConflictKind::ConcurrentWriteUnderCrewOrBelow: return "concurrent-write-under-CREW-or-below";
    case ConflictKind::UnequalCommonWrites: return "unequal-common-writes";
  }
  return "?";
}

ConflictViolation::ConflictViolation(std::int64_t step_, std::int64_t cell_, ConflictKind kind_)
    : std::runtime_error("PRAM conflict at step " + std::to_string(step_) + ", cell " +
                         std::to_string(cell_) + ": " + conflict_kind_name(kind_)),
      step(step_),
      cell(cell_),
      kind(kind_) {}

namespace {

struct CellState {
  std::int64_t readers = 0;
  std::int64_t declared_writers = 0;
  // Performed writers in (proc, value) form; kept sorted by proc for the
  // deterministic Arbitrary/Priority winner.
  std::vector<std::pair<std::int64_t, Word>> performed;
};

}  // namespace

RunResult pram_run(Program& program, Variant variant, Memory memory) {
  PramStats stats;
  for (;;) {
    std::optional<Step> step = program.next(memory);
    if (!step) break;
    std::int64_t step_index = stats.steps;

    std::map<std::int64_t, CellState> cells;
    std::set<std::int64_t> procs;
    for (const ReadAccess& r : step->reads) {
      require(r.cell >= 0 && static_cast<std::size_t>(r.cell) < memory.size(),
              "pram_run: read out of bounds");
      cells[r.cell].readers++;
      procs.insert(r.proc);
    }
    for (const WriteAccess& w : step->writes) {
      require(w.cell >= 0 && static_cast<std::size_t>(w.cell) < memory.size(),
              "pram_run: write out of bounds");
      CellState& c = cells[w.cell];
      c.declared_writers++;
      if (w.performed) c.performed.emplace_back(w.proc, w.value);
      procs.insert(w.proc);
    }

    for (auto& [cell, state] : cells) {
      if (state.readers > 0 && state.declared_writers > 0)
        throw ConflictViolation(step_index, cell, ConflictKind::RwMix);
      if (variant == Variant::EREW && state.readers > 1)
        throw ConflictViolation(step_index, cell, ConflictKind::ConcurrentReadUnderErew);
      if ((variant == Variant::EREW || variant == Variant::CREW) && state.declared_writers > 1)
        throw ConflictViolation(step_index, cell, ConflictKind::ConcurrentWriteUnderCrewOrBelow);
      if (variant == Variant::CRCW_Common && state.performed.size() > 1) {
        for (const auto& [proc, value] : state.performed) {
          if (value != state.performed.front().second)
            throw ConflictViolation(step_index, cell, ConflictKind::UnequalCommonWrites);
        }
      }
    }

    // Commit: all writes take effect together after the checks.
    for (auto& [cell, state] : cells) {
      if (state.performed.empty()) continue;
      std::sort(state.performed.begin(), state.performed.end());
      memory[cell] = state.performed.front().second;
    }

    stats.steps++;
    stats.ops += step->ops;
    stats.max_procs = std::max<std::int64_t>(stats.max_procs, static_cast<std::int64_t>(procs.size()));
  }
  stats.max_procs = std::max<std::int64_t>(stats.max_procs, 1);
  return RunResult{std::move(memory), stats};
}

}  // namespace parwb::pram
