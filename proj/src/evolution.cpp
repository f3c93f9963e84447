#include "emocorr/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "emocorr/errors.hpp"

namespace emocorr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of an entry; zero maps to -inf.
double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

Trace make_trace(const Matrix6& x1, std::vector<Emotion> path, TraceCondition condition) {
  Trace t;
  t.condition = condition;
  t.steps = path.size() - 1;
  t.log_prob = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double p = x1[idx(path[i])][idx(path[i + 1])];
    t.step_probs.push_back(p);
    t.log_prob += safe_log(p);
  }
  t.path = std::move(path);
  return t;
}

bool same_cycle_set(std::vector<Cycle> a, std::vector<Cycle> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

void add_unique(std::vector<Cycle>& into, const std::vector<Cycle>& cycles) {
  for (const auto& c : cycles) {
    if (std::find(into.begin(), into.end(), c) == into.end()) into.push_back(c);
  }
}

}  // namespace

OneStep one_step_top(const Matrix6& x1, Emotion source) {
  const std::size_t i = idx(source);
  OneStep best;
  bool found = false;
  for (std::size_t j = 0; j < kNumEmotions; ++j) {
    if (j == i) continue;
    const double p = x1[i][j];
    if (!found || p > best.prob) {
      best = {emotion_at(j), p, false};
      found = true;
    } else if (p == best.prob) {
      best.tie = true;
    }
  }
  return best;
}

std::vector<MisjudgmentPair> misjudgment_law(std::span<const Matrix6> matrices,
                                             std::size_t quorum) {
  if (quorum == 0) throw ConfigError("quorum must be at least 1");
  std::vector<MisjudgmentPair> out;
  for (auto source : kAllEmotions) {
    std::map<std::size_t, MisjudgmentPair> by_target;
    for (std::size_t k = 0; k < matrices.size(); ++k) {
      const auto top = one_step_top(matrices[k], source);
      // A row without any off-diagonal mass endorses no misjudgment.
      if (!(top.prob > 0.0)) continue;
      auto& pair = by_target[idx(top.target)];
      pair.source = source;
      pair.target = top.target;
      pair.endorsers.push_back(k);
      pair.mean_prob += top.prob;
    }
    for (auto& [target, pair] : by_target) {
      if (pair.endorsers.size() < quorum) continue;
      pair.mean_prob /= static_cast<double>(pair.endorsers.size());
      out.push_back(std::move(pair));
    }
  }
  return out;
}

std::string_view condition_name(TraceCondition c) {
  switch (c) {
    case TraceCondition::kGivenInitial:
      return "given_initial";
    case TraceCondition::kGivenUltimate:
      return "given_ultimate";
    case TraceCondition::kGivenBoth:
      return "given_both";
  }
  return "?";
}

Trace best_trace(const Matrix6& x1, std::size_t steps, TraceCondition condition,
                 std::optional<Emotion> initial, std::optional<Emotion> ultimate,
                 const TraceOptions& options) {
  if (steps < 1 || steps > options.max_steps) {
    throw ConfigError("trace length must lie in [1, " + std::to_string(options.max_steps) + "]");
  }
  const bool fix_start = condition != TraceCondition::kGivenUltimate;
  const bool fix_end = condition != TraceCondition::kGivenInitial;
  if ((fix_start && !initial) || (fix_end && !ultimate)) {
    throw ConfigError("trace condition " + std::string(condition_name(condition)) +
                      " is missing an endpoint");
  }

  Matrix6 logp{};
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    for (std::size_t j = 0; j < kNumEmotions; ++j) {
      logp[i][j] = (i == j && !options.allow_self_steps) ? kNegInf : safe_log(x1[i][j]);
    }
  }

  using Row = std::array<double, kNumEmotions>;
  std::vector<Row> score(steps + 1);
  std::vector<std::array<std::size_t, kNumEmotions>> back(steps + 1);
  score[0].fill(fix_start ? kNegInf : 0.0);
  if (fix_start) score[0][idx(*initial)] = 0.0;

  for (std::size_t t = 1; t <= steps; ++t) {
    for (std::size_t to = 0; to < kNumEmotions; ++to) {
      double best = kNegInf;
      std::size_t arg = 0;
      for (std::size_t from = 0; from < kNumEmotions; ++from) {
        if (score[t - 1][from] == kNegInf || logp[from][to] == kNegInf) continue;
        const double cand = score[t - 1][from] + logp[from][to];
        if (cand > best) {
          best = cand;
          arg = from;
        }
      }
      score[t][to] = best;
      back[t][to] = arg;
    }
  }

  std::size_t end = 0;
  if (fix_end) {
    end = idx(*ultimate);
  } else {
    for (std::size_t s = 1; s < kNumEmotions; ++s) {
      if (score[steps][s] > score[steps][end]) end = s;
    }
  }
  if (score[steps][end] == kNegInf) {
    throw UnreachableError("unreachable under " + std::to_string(steps) + " steps");
  }

  std::vector<Emotion> path(steps + 1);
  path[steps] = emotion_at(end);
  for (std::size_t t = steps; t > 0; --t) {
    end = back[t][end];
    path[t - 1] = emotion_at(end);
  }
  return make_trace(x1, std::move(path), condition);
}

Trace greedy_trace(const Matrix6& x1, std::size_t steps, Emotion initial,
                   const TraceOptions& options) {
  if (steps < 1 || steps > options.max_steps) {
    throw ConfigError("trace length must lie in [1, " + std::to_string(options.max_steps) + "]");
  }
  std::vector<Emotion> path{initial};
  for (std::size_t t = 0; t < steps; ++t) {
    const Emotion cur = path.back();
    Emotion next = cur;
    double best = -1.0;
    for (auto e : kAllEmotions) {
      if (e == cur && !options.allow_self_steps) continue;
      const double p = x1[idx(cur)][idx(e)];
      if (p > best) {
        best = p;
        next = e;
      }
    }
    if (!(best > 0.0)) {
      throw UnreachableError("unreachable under " + std::to_string(steps) + " steps");
    }
    path.push_back(next);
  }
  return make_trace(x1, std::move(path), TraceCondition::kGivenInitial);
}

std::vector<Cycle> detect_circulations(std::span<const Emotion> path) {
  std::vector<Cycle> cycles;
  std::array<std::ptrdiff_t, kNumEmotions> last{};
  last.fill(-1);
  for (std::size_t t = 0; t < path.size(); ++t) {
    const auto prev = last[idx(path[t])];
    last[idx(path[t])] = static_cast<std::ptrdiff_t>(t);
    if (prev < 0) continue;
    Cycle segment(path.begin() + prev, path.begin() + static_cast<std::ptrdiff_t>(t));
    // Minimal only if nothing repeats inside the segment.
    std::array<bool, kNumEmotions> seen{};
    bool minimal = true;
    for (auto e : segment) {
      if (seen[idx(e)]) {
        minimal = false;
        break;
      }
      seen[idx(e)] = true;
    }
    if (!minimal || segment.size() < 2) continue;
    std::rotate(segment.begin(), std::min_element(segment.begin(), segment.end()), segment.end());
    if (std::find(cycles.begin(), cycles.end(), segment) == cycles.end()) {
      cycles.push_back(std::move(segment));
    }
  }
  return cycles;
}

Trace shortest_path(const Matrix6& x1, Emotion initial, Emotion ultimate) {
  if (initial == ultimate) throw ConfigError("shortest path needs distinct endpoints");
  std::array<double, kNumEmotions> cost{};
  cost.fill(std::numeric_limits<double>::infinity());
  std::array<std::size_t, kNumEmotions> prev{};
  std::array<bool, kNumEmotions> done{};
  cost[idx(initial)] = 0.0;
  for (std::size_t round = 0; round < kNumEmotions; ++round) {
    std::size_t u = kNumEmotions;
    for (std::size_t s = 0; s < kNumEmotions; ++s) {
      if (!done[s] && std::isfinite(cost[s]) && (u == kNumEmotions || cost[s] < cost[u])) u = s;
    }
    if (u == kNumEmotions) break;
    done[u] = true;
    for (std::size_t v = 0; v < kNumEmotions; ++v) {
      if (v == u || done[v] || !(x1[u][v] > 0.0)) continue;
      const double cand = cost[u] - std::log(x1[u][v]);
      if (cand < cost[v]) {
        cost[v] = cand;
        prev[v] = u;
      }
    }
  }
  if (!std::isfinite(cost[idx(ultimate)])) {
    throw UnreachableError("no transfer path from " + std::string(emotion_name(initial)) +
                           " to " + std::string(emotion_name(ultimate)));
  }
  std::vector<Emotion> path{ultimate};
  for (std::size_t s = idx(ultimate); s != idx(initial); s = prev[s]) {
    path.push_back(emotion_at(prev[s]));
  }
  std::reverse(path.begin(), path.end());
  return make_trace(x1, std::move(path), TraceCondition::kGivenBoth);
}

EvolutionAnalysis analyze_evolution(std::string dataset, const PerspectiveSet& perspectives,
                                    const EvolutionOptions& options) {
  EvolutionAnalysis out;
  out.dataset = std::move(dataset);

  std::array<Matrix6, kNumBasePerspectives> base{};
  for (std::size_t k = 0; k < kNumBasePerspectives; ++k) base[k] = perspectives.matrices[k].values;
  out.misjudgments = misjudgment_law(base, options.quorum);

  const TraceOptions trace_opts{options.allow_self_steps,
                                std::max(options.trace_steps, kDefaultTraceSteps)};
  for (std::size_t k = 0; k < kNumPerspectives; ++k) {
    const Matrix6& x1 = perspectives.perspective(k);
    CirculationSummary summary;
    summary.perspective = k;

    auto run = [&](TraceCondition cond, std::optional<Emotion> ini, std::optional<Emotion> ult) {
      TraceRecord rec;
      rec.perspective = k;
      rec.condition = cond;
      rec.initial = ini;
      rec.ultimate = ult;
      try {
        rec.trace = best_trace(x1, options.trace_steps, cond, ini, ult, trace_opts);
        rec.cycles = detect_circulations(*rec.trace);
        add_unique(summary.by_condition[static_cast<std::size_t>(cond)], rec.cycles);
      } catch (const UnreachableError& e) {
        rec.status = e.what();
      }
      out.traces.push_back(std::move(rec));
    };
    for (auto e : kAllEmotions) run(TraceCondition::kGivenInitial, e, std::nullopt);
    for (auto e : kAllEmotions) run(TraceCondition::kGivenUltimate, std::nullopt, e);
    for (auto a : kAllEmotions) {
      for (auto b : kAllEmotions) run(TraceCondition::kGivenBoth, a, b);
    }
    summary.conditions_agree = same_cycle_set(summary.by_condition[0], summary.by_condition[1]) &&
                               same_cycle_set(summary.by_condition[0], summary.by_condition[2]);
    out.circulations.push_back(std::move(summary));

    for (auto a : kAllEmotions) {
      for (auto b : kAllEmotions) {
        if (a == b) continue;
        ShortestPathRecord rec;
        rec.perspective = k;
        rec.initial = a;
        rec.ultimate = b;
        try {
          rec.trace = shortest_path(x1, a, b);
        } catch (const UnreachableError& e) {
          rec.status = e.what();
        }
        out.shortest_paths.push_back(std::move(rec));
      }
    }
  }
  return out;
}

}  // namespace emocorr
