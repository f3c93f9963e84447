#ifndef EMOCORR_EVOLUTION_HPP
#define EMOCORR_EVOLUTION_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emocorr/confusion.hpp"
#include "emocorr/emotion.hpp"

namespace emocorr {

inline constexpr std::size_t kDefaultTraceSteps = 8;
inline constexpr std::size_t kDefaultQuorum = 2;

struct OneStep {
  Emotion target = Emotion::kLove;
  double prob = 0.0;
  bool tie = false;  // another off-diagonal entry of the row is equally large
};

// Largest off-diagonal entry of row `source`; ties go to the lowest index.
OneStep one_step_top(const Matrix6& x1, Emotion source);

struct MisjudgmentPair {
  Emotion source = Emotion::kLove;
  Emotion target = Emotion::kLove;
  std::vector<std::size_t> endorsers;  // perspective indices
  double mean_prob = 0.0;              // over endorsers
};

// Top one-step misjudgment of each source emotion in each matrix, keeping the
// pairs at least `quorum` matrices agree on. `matrices` are the six base
// perspectives in perspective_index order. A row with no off-diagonal mass
// endorses nothing.
std::vector<MisjudgmentPair> misjudgment_law(std::span<const Matrix6> matrices,
                                             std::size_t quorum = kDefaultQuorum);

enum class TraceCondition : std::uint8_t { kGivenInitial, kGivenUltimate, kGivenBoth };
std::string_view condition_name(TraceCondition c);

struct Trace {
  std::vector<Emotion> path;       // steps + 1 emotions
  std::vector<double> step_probs;  // x1 entry of each step
  double log_prob = 0.0;           // sum of log step_probs, left to right
  std::size_t steps = 0;
  TraceCondition condition = TraceCondition::kGivenInitial;
};

struct TraceOptions {
  // Diagonal (correct-recognition) steps are excluded unless re-admitted here.
  bool allow_self_steps = false;
  std::size_t max_steps = kDefaultTraceSteps;
};

// Maximum-probability path of exactly `steps` steps by dynamic programming over
// log x1. kGivenInitial needs `initial`, kGivenUltimate needs `ultimate`,
// kGivenBoth needs both. Throws UnreachableError when every path has
// probability zero.
Trace best_trace(const Matrix6& x1, std::size_t steps, TraceCondition condition,
                 std::optional<Emotion> initial, std::optional<Emotion> ultimate,
                 const TraceOptions& options = {});

// Step-by-step argmax from `initial`; a comparison baseline for best_trace.
Trace greedy_trace(const Matrix6& x1, std::size_t steps, Emotion initial,
                   const TraceOptions& options = {});

using Cycle = std::vector<Emotion>;

// Minimal cycles closed by revisits along `path`, each rotated to start at its
// lowest emotion, in order of first appearance, without repeats.
std::vector<Cycle> detect_circulations(std::span<const Emotion> path);
inline std::vector<Cycle> detect_circulations(const Trace& trace) {
  return detect_circulations(trace.path);
}

// Maximum-probability path over any number of steps, i.e. the minimum-cost
// path under cost -log x1 with the diagonal and zero entries removed. Throws
// UnreachableError("no transfer path ...") if none exists.
Trace shortest_path(const Matrix6& x1, Emotion initial, Emotion ultimate);

struct TraceRecord {
  std::size_t perspective = 0;
  TraceCondition condition = TraceCondition::kGivenInitial;
  std::optional<Emotion> initial;
  std::optional<Emotion> ultimate;
  std::optional<Trace> trace;  // empty when unreachable
  std::vector<Cycle> cycles;
  std::string status = "ok";
};

struct ShortestPathRecord {
  std::size_t perspective = 0;
  Emotion initial = Emotion::kLove;
  Emotion ultimate = Emotion::kLove;
  std::optional<Trace> trace;
  std::string status = "ok";
};

struct CirculationSummary {
  std::size_t perspective = 0;
  // Union of cycles over all traces of each condition.
  std::array<std::vector<Cycle>, 3> by_condition;
  bool conditions_agree = false;
};

struct EvolutionOptions {
  std::size_t quorum = kDefaultQuorum;
  std::size_t trace_steps = kDefaultTraceSteps;
  bool allow_self_steps = false;
};

struct EvolutionAnalysis {
  std::string dataset;
  std::vector<MisjudgmentPair> misjudgments;
  std::vector<TraceRecord> traces;
  std::vector<ShortestPathRecord> shortest_paths;
  std::vector<CirculationSummary> circulations;
};

// For each of the seven perspectives: traces from every initial emotion, to
// every ultimate emotion, and between every ordered pair (including equal
// endpoints), plus the shortest path between every ordered pair of distinct
// emotions. Misjudgments use the six base perspectives.
EvolutionAnalysis analyze_evolution(std::string dataset, const PerspectiveSet& perspectives,
                                    const EvolutionOptions& options = {});

}  // namespace emocorr

#endif  // EMOCORR_EVOLUTION_HPP
