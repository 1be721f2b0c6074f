#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace parwb::pram {

using Word = std::int64_t;
using Memory = std::vector<Word>;

enum class Variant { EREW, CREW, CRCW_Common, CRCW_Arbitrary, CRCW_Priority };

const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(const std::string& name);

enum class ConflictKind {
  RwMix,                    // a cell both read and written within one step
  ConcurrentReadUnderErew,
  ConcurrentWriteUnderCrewOrBelow,
  UnequalCommonWrites,
};

const char* conflict_kind_name(ConflictKind k);

class ConflictViolation : public std::runtime_error {
public:
  ConflictViolation(std::int64_t step, std::int64_t cell, ConflictKind kind);
  std::int64_t step;
  std::int64_t cell;
  ConflictKind kind;
};

struct ReadAccess {
  std::int64_t proc = 0;
  std::int64_t cell = 0;
};

// A write access is declared by every processor assigned to the write target,
// whether or not its branch was taken; `performed` marks taken branches, which
// are the only ones that supply a value. Conflict detection under EREW/CREW
// counts declared accesses; CRCW_Common compares performed values only.
struct WriteAccess {
  std::int64_t proc = 0;
  std::int64_t cell = 0;
  bool performed = true;
  Word value = 0;
};

struct Step {
  std::vector<ReadAccess> reads;
  std::vector<WriteAccess> writes;
  std::int64_t ops = 0;  // operations carried out by assigned processors this step
};

// Step generator; next() receives the pre-step memory and must compute the
// step's accesses and values from it alone.
class Program {
public:
  virtual ~Program() = default;
  virtual std::optional<Step> next(const Memory& memory) = 0;
};

struct PramStats {
  std::int64_t steps = 0;
  std::int64_t ops = 0;
  std::int64_t max_procs = 0;
};

struct RunResult {
  Memory memory;
  PramStats stats;
};

// Runs the program to completion: per step, checks the variant's access rules
// (reads see pre-step state; writes commit together at the end of the step).
// Arbitrary and Priority both resolve multiple performed writes to the value
// of the lowest proc id (rank = priority).
RunResult pram_run(Program& program, Variant variant, Memory memory);

struct MaxResult {
  Word max = 0;
  PramStats stats;
};

// Constant-round maximum: knockout flags, all-pairs comparisons, winner write.
// steps = 3; runs conflict-free under CRCW_Common for every input; raises
// ConflictViolation under CREW and EREW for every n >= 2.
MaxResult fastmax(const std::vector<Word>& a, Variant variant = Variant::CRCW_Common);

// Pairwise-halving maximum: steps = ceil(log2 n) rounds, ops = n-1 comparisons.
MaxResult logmax(const std::vector<Word>& a, Variant variant = Variant::CREW);

// Doubly-logarithmic maximum: blocked preprocessing into ceil(n / ceil(log2 log2 n))
// blocks, then sqrt-splitting recursion with the constant-round maximum at each
// level; recursion bottoms out at group size <= 4. n < 4 falls back to logmax.
MaxResult loglogmax(const std::vector<Word>& a, Variant variant = Variant::CRCW_Common);

struct WordMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<Word> data;  // row-major

  Word& at(std::int64_t i, std::int64_t j) { return data[i * cols + j]; }
  Word at(std::int64_t i, std::int64_t j) const { return data[i * cols + j]; }
};

struct MatmulResult {
  WordMatrix c;
  PramStats stats;
};

// One processor per output element accumulating over l rounds in a local
// register, with the write fused into the last round: steps = l, ops = m*n*l.
MatmulResult pram_matmul(const WordMatrix& a, const WordMatrix& b, Variant variant = Variant::CREW);

struct ListRankResult {
  std::vector<Word> dist;
  std::vector<Word> sums;
  PramStats stats;
};

// Pointer doubling over (possibly several) lists; tails satisfy next[i] == i.
// dist[i] = hops from i to its tail, sums[i] = sum of values from i through
// the tail inclusive. stats.steps = ceil(log2 n) doubling rounds plus one
// finalization step adding the tail's value.
ListRankResult wyllie_list_rank(const std::vector<std::int64_t>& next,
                                const std::vector<Word>& values,
                                Variant variant = Variant::CREW);

}  // namespace parwb::pram
