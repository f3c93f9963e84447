#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>

#include "emocorr/errors.hpp"
#include "emocorr/evolution.hpp"

using namespace emocorr;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Matrix6 random_stochastic(std::mt19937_64& gen, double zero_rate = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix6 m{};
  for (auto& row : m) {
    double s = 0;
    for (auto& x : row) {
      x = u(gen) < zero_rate ? 0.0 : u(gen);
      s += x;
    }
    if (s == 0) {
      row[0] = s = 1;
    }
    for (auto& x : row) x /= s;
  }
  return m;
}

std::vector<Emotion> path_of(std::initializer_list<int> ids) {
  std::vector<Emotion> out;
  for (int i : ids) out.push_back(emotion_at(static_cast<std::size_t>(i)));
  return out;
}

double path_log(const Matrix6& m, const std::vector<Emotion>& p) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double x = m[idx(p[i])][idx(p[i + 1])];
    s += x > 0 ? std::log(x) : kNegInf;
  }
  return s;
}

// Best log-probability over all n-step paths without self-steps, by enumeration.
double brute_best(const Matrix6& m, std::size_t n, std::optional<std::size_t> start,
                  std::optional<std::size_t> end) {
  double best = kNegInf;
  std::vector<std::size_t> path;
  std::function<void(double)> rec = [&](double acc) {
    if (path.size() == n + 1) {
      if (!end || path.back() == *end) best = std::max(best, acc);
      return;
    }
    for (std::size_t j = 0; j < 6; ++j) {
      if (j == path.back()) continue;
      const double x = m[path.back()][j];
      path.push_back(j);
      rec(acc + (x > 0 ? std::log(x) : kNegInf));
      path.pop_back();
    }
  };
  for (std::size_t s = 0; s < 6; ++s) {
    if (start && s != *start) continue;
    path = {s};
    rec(0.0);
  }
  return best;
}

// Best simple path by enumeration; returns the log-probability.
double brute_simple(const Matrix6& m, std::size_t from, std::size_t to) {
  double best = kNegInf;
  std::vector<bool> used(6, false);
  std::function<void(std::size_t, double)> rec = [&](std::size_t at, double acc) {
    if (at == to) {
      best = std::max(best, acc);
      return;
    }
    for (std::size_t j = 0; j < 6; ++j) {
      if (used[j] || !(m[at][j] > 0)) continue;
      used[j] = true;
      rec(j, acc + std::log(m[at][j]));
      used[j] = false;
    }
  };
  used[from] = true;
  rec(from, 0.0);
  return best;
}

// Minimal cycles via a direct scan: for every pair of equal entries with no
// repeat in between, the segment rotated to its minimum.
std::set<Cycle> scan_cycles(const std::vector<Emotion>& p) {
  std::set<Cycle> out;
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (std::size_t b = a + 1; b < p.size(); ++b) {
      if (p[a] != p[b]) continue;
      Cycle seg(p.begin() + static_cast<long>(a), p.begin() + static_cast<long>(b));
      std::set<Emotion> distinct(seg.begin(), seg.end());
      if (distinct.size() == seg.size() && seg.size() >= 2) {
        std::rotate(seg.begin(), std::min_element(seg.begin(), seg.end()), seg.end());
        out.insert(seg);
      }
      break;
    }
  }
  return out;
}

}  // namespace

TEST(OneStep, Examples) {
  Matrix6 m{};
  for (auto& row : m) row.fill(0.0);
  m[1] = {0.01, 0.8, 0.02, 0.05, 0.025, 0.095};
  const auto top = one_step_top(m, Emotion::kFear);
  EXPECT_EQ(top.target, Emotion::kAnger);
  EXPECT_DOUBLE_EQ(top.prob, 0.095);
  EXPECT_FALSE(top.tie);

  m[2] = {0, 0, 0.9, 0, 0.1, 0};
  EXPECT_EQ(one_step_top(m, Emotion::kJoy).target, Emotion::kSurprise);

  m[3] = {0.1, 0, 0, 0.7, 0.1, 0.1};
  const auto tie = one_step_top(m, Emotion::kSadness);
  EXPECT_EQ(tie.target, Emotion::kLove);
  EXPECT_TRUE(tie.tie);
}

TEST(Misjudgment, QuorumAndMeans) {
  Matrix6 base{};
  for (std::size_t i = 0; i < 6; ++i) {
    base[i].fill(0.02);
    base[i][i] = 0.9;
  }
  base[0][5] = 0.5;
  std::vector<Matrix6> ms(6, base);
  ms[0][1][5] = 0.09;
  ms[1][1][5] = 0.10;
  ms[2][1][3] = 0.3;  // endorsed once only
  const auto law = misjudgment_law(ms, 2);
  bool saw_love = false, saw_fear = false;
  for (const auto& p : law) {
    EXPECT_GE(p.endorsers.size(), 2u);
    if (p.source == Emotion::kLove) {
      saw_love = true;
      EXPECT_EQ(p.target, Emotion::kAnger);
      EXPECT_EQ(p.endorsers.size(), 6u);
    }
    if (p.source == Emotion::kFear && p.target == Emotion::kAnger) {
      saw_fear = true;
      EXPECT_NEAR(p.mean_prob, 0.095, 1e-15);
      EXPECT_EQ(p.endorsers, (std::vector<std::size_t>{0, 1}));
    }
    EXPECT_FALSE(p.source == Emotion::kFear && p.target == Emotion::kSadness);
  }
  EXPECT_TRUE(saw_love);
  EXPECT_TRUE(saw_fear);
  EXPECT_THROW(misjudgment_law(ms, 0), ConfigError);
}

TEST(Misjudgment, RowsWithoutErrorsEndorseNothing) {
  Matrix6 id{};
  for (std::size_t i = 0; i < 6; ++i) id[i][i] = 1.0;
  const std::vector<Matrix6> ms(6, id);
  EXPECT_TRUE(misjudgment_law(ms, 1).empty());
}

TEST(BestTrace, SingleStepIsOneStepTop) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 100; ++t) {
    const auto m = random_stochastic(gen);
    for (auto e : kAllEmotions) {
      const auto tr = best_trace(m, 1, TraceCondition::kGivenInitial, e, std::nullopt);
      EXPECT_EQ(tr.path[1], one_step_top(m, e).target);
    }
  }
}

TEST(BestTrace, MatchesEnumeration) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 60; ++t) {
    const auto m = random_stochastic(gen, t % 2 ? 0.4 : 0.0);
    for (std::size_t n = 1; n <= 5; ++n) {
      for (std::size_t a = 0; a < 6; ++a) {
        for (std::size_t b = 0; b < 6; ++b) {
          for (auto cond : {TraceCondition::kGivenInitial, TraceCondition::kGivenUltimate,
                            TraceCondition::kGivenBoth}) {
            if (cond != TraceCondition::kGivenBoth && b > 0) continue;
            std::optional<std::size_t> s, u;
            if (cond != TraceCondition::kGivenUltimate) s = a;
            if (cond == TraceCondition::kGivenUltimate) u = a;
            if (cond == TraceCondition::kGivenBoth) u = b;
            const double expect = brute_best(m, n, s, u);
            const auto ini = s ? std::optional(emotion_at(*s)) : std::nullopt;
            const auto ult = u ? std::optional(emotion_at(*u)) : std::nullopt;
            if (expect == kNegInf) {
              EXPECT_THROW(best_trace(m, n, cond, ini, ult), UnreachableError);
              continue;
            }
            const auto tr = best_trace(m, n, cond, ini, ult);
            EXPECT_NEAR(tr.log_prob, expect, 1e-12);
            EXPECT_EQ(tr.path.size(), n + 1);
            EXPECT_EQ(tr.steps, n);
            EXPECT_NEAR(tr.log_prob, path_log(m, tr.path), 1e-12);
            for (std::size_t i = 0; i + 1 < tr.path.size(); ++i) EXPECT_NE(tr.path[i], tr.path[i + 1]);
            if (s) {
              EXPECT_EQ(idx(tr.path.front()), *s);
            }
            if (u) {
              EXPECT_EQ(idx(tr.path.back()), *u);
            }
          }
        }
      }
    }
  }
}

TEST(BestTrace, AppendingAStepNeverRaisesProbability) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 100; ++t) {
    const auto m = random_stochastic(gen);
    double max_off = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        if (i != j) max_off = std::max(max_off, m[i][j]);
      }
    }
    for (std::size_t n = 1; n < 6; ++n) {
      const auto a = best_trace(m, n, TraceCondition::kGivenInitial, Emotion::kJoy, std::nullopt);
      const auto b = best_trace(m, n + 1, TraceCondition::kGivenInitial, Emotion::kJoy, std::nullopt);
      EXPECT_LE(b.log_prob, a.log_prob + std::log(max_off) + 1e-12);
    }
  }
}

TEST(BestTrace, DominantTwoCycleAlternates) {
  Matrix6 m{};
  for (std::size_t i = 0; i < 6; ++i) {
    m[i].fill(0.02);
    m[i][i] = 0.9;
  }
  m[0] = {0.5, 0.02, 0.02, 0.02, 0.02, 0.42};
  m[5] = {0.38, 0.02, 0.02, 0.02, 0.02, 0.54};
  const auto tr = best_trace(m, 8, TraceCondition::kGivenInitial, Emotion::kLove, std::nullopt);
  EXPECT_EQ(tr.path, path_of({0, 5, 0, 5, 0, 5, 0, 5, 0}));
  EXPECT_NEAR(tr.log_prob, brute_best(m, 8, 0, std::nullopt), 1e-12);
  const auto cycles = detect_circulations(tr);
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(cycles[0], path_of({0, 5}));
}

TEST(BestTrace, ZeroMatrixIsUnreachable) {
  Matrix6 id{};
  for (std::size_t i = 0; i < 6; ++i) id[i][i] = 1.0;
  try {
    best_trace(id, 3, TraceCondition::kGivenInitial, Emotion::kJoy, std::nullopt);
    FAIL();
  } catch (const UnreachableError& e) {
    EXPECT_STREQ(e.what(), "unreachable under 3 steps");
  }
  TraceOptions self;
  self.allow_self_steps = true;
  const auto tr = best_trace(id, 3, TraceCondition::kGivenInitial, Emotion::kJoy, std::nullopt, self);
  EXPECT_EQ(tr.path, path_of({2, 2, 2, 2}));
}

TEST(BestTrace, RejectsBadArguments) {
  std::mt19937_64 gen(4);
  const auto m = random_stochastic(gen);
  EXPECT_THROW(best_trace(m, 0, TraceCondition::kGivenInitial, Emotion::kJoy, std::nullopt), ConfigError);
  EXPECT_THROW(best_trace(m, 9, TraceCondition::kGivenInitial, Emotion::kJoy, std::nullopt), ConfigError);
  EXPECT_THROW(best_trace(m, 2, TraceCondition::kGivenBoth, Emotion::kJoy, std::nullopt), ConfigError);
}

TEST(GreedyTrace, DiffersFromGlobalOptimumOnAdversarialMatrix) {
  // Greedy from love takes the 0.40 step to fear, whose best exit is 0.05;
  // the global optimum pays 0.35 to reach joy and then 0.60.
  Matrix6 m{};
  m[0] = {0.25, 0.40, 0.35, 0, 0, 0};
  m[1] = {0.05, 0.80, 0.05, 0.05, 0.05, 0};
  m[2] = {0, 0, 0.40, 0.60, 0, 0};
  m[3] = {0.1, 0, 0, 0.80, 0.1, 0};
  m[4] = {0, 0, 0, 0.2, 0.8, 0};
  m[5] = {0, 0, 0, 0, 0.2, 0.8};
  const auto greedy = greedy_trace(m, 2, Emotion::kLove);
  const auto best = best_trace(m, 2, TraceCondition::kGivenInitial, Emotion::kLove, std::nullopt);
  EXPECT_EQ(greedy.path[1], Emotion::kFear);
  EXPECT_EQ(best.path, path_of({0, 2, 3}));
  EXPECT_LT(greedy.log_prob, best.log_prob);
}

TEST(Circulations, Examples) {
  EXPECT_EQ(detect_circulations(path_of({0, 5, 0, 5})), (std::vector<Cycle>{path_of({0, 5})}));
  EXPECT_TRUE(detect_circulations(path_of({0, 1, 2, 3, 4})).empty());
  EXPECT_EQ(detect_circulations(path_of({1, 2, 4, 2})), (std::vector<Cycle>{path_of({2, 4})}));
  EXPECT_EQ(detect_circulations(path_of({3, 1, 2, 3, 1})), (std::vector<Cycle>{path_of({1, 2, 3})}));
}

TEST(Circulations, MatchRevisitScan) {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 2000; ++t) {
    std::vector<Emotion> p{emotion_at(gen() % 6)};
    const std::size_t len = 1 + gen() % 9;
    while (p.size() < len) {
      auto e = emotion_at(gen() % 6);
      if (e != p.back()) p.push_back(e);
    }
    const auto got = detect_circulations(p);
    EXPECT_EQ(std::set<Cycle>(got.begin(), got.end()), scan_cycles(p));
    EXPECT_EQ(std::set<Cycle>(got.begin(), got.end()).size(), got.size());
  }
}

TEST(ShortestPath, TwoStepDetourAroundZeroEntry) {
  Matrix6 m{};
  for (std::size_t i = 0; i < 6; ++i) {
    m[i].fill(0.01);
    m[i][i] = 0.95;
  }
  m[1] = {0.01, 0.7, 0.25, 0.02, 0.0, 0.02};
  m[2] = {0.01, 0.01, 0.6, 0.01, 0.36, 0.01};
  const auto tr = shortest_path(m, Emotion::kFear, Emotion::kSurprise);
  EXPECT_EQ(tr.path, path_of({1, 2, 4}));
  EXPECT_NEAR(tr.log_prob, std::log(0.25) + std::log(0.36), 1e-12);
}

TEST(ShortestPath, DominantDirectEntryIsOneStep) {
  Matrix6 m{};
  for (std::size_t i = 0; i < 6; ++i) {
    m[i].fill(0.05);
    m[i][i] = 0.75;
  }
  const auto tr = shortest_path(m, Emotion::kJoy, Emotion::kAnger);
  EXPECT_EQ(tr.path, path_of({2, 5}));
}

TEST(ShortestPath, MatchesSimplePathEnumeration) {
  std::mt19937_64 gen(6);
  for (int t = 0; t < 200; ++t) {
    const auto m = random_stochastic(gen, t % 3 ? 0.5 : 0.0);
    for (std::size_t a = 0; a < 6; ++a) {
      for (std::size_t b = 0; b < 6; ++b) {
        if (a == b) continue;
        const double expect = brute_simple(m, a, b);
        if (expect == kNegInf) {
          EXPECT_THROW(shortest_path(m, emotion_at(a), emotion_at(b)), UnreachableError);
          continue;
        }
        const auto tr = shortest_path(m, emotion_at(a), emotion_at(b));
        EXPECT_NEAR(tr.log_prob, expect, 1e-12);
        std::set<Emotion> seen(tr.path.begin(), tr.path.end());
        EXPECT_EQ(seen.size(), tr.path.size());
        EXPECT_NEAR(tr.log_prob, path_log(m, tr.path), 1e-12);
      }
    }
  }
}

TEST(ShortestPath, Errors) {
  Matrix6 id{};
  for (std::size_t i = 0; i < 6; ++i) id[i][i] = 1.0;
  try {
    shortest_path(id, Emotion::kLove, Emotion::kAnger);
    FAIL();
  } catch (const UnreachableError& e) {
    EXPECT_NE(std::string(e.what()).find("no transfer path"), std::string::npos);
  }
  EXPECT_THROW(shortest_path(id, Emotion::kJoy, Emotion::kJoy), ConfigError);
}

TEST(AnalyzeEvolution, PlantedTwoCycleAgreesAcrossConditions) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.005, 0.03);
  std::vector<CorrelationMatrix> ms;
  for (auto view : kAllViews) {
    for (auto model : kAllVariants) {
      Matrix6 m{};
      for (std::size_t i = 0; i < 6; ++i) {
        double off = 0;
        for (std::size_t j = 0; j < 6; ++j) {
          if (i != j) off += (m[i][j] = u(gen));
        }
        m[i][i] = 1 - off;
      }
      m[0][5] += 0.3, m[0][0] -= 0.3;
      m[5][0] += 0.3, m[5][5] -= 0.3;
      ms.push_back({m, view, model});
    }
  }
  const auto set = assemble_perspectives(ms);
  const auto a = analyze_evolution("planted", set, {});
  ASSERT_EQ(a.circulations.size(), kNumPerspectives);
  ASSERT_EQ(a.traces.size(), kNumPerspectives * (6 + 6 + 36));
  ASSERT_EQ(a.shortest_paths.size(), kNumPerspectives * 30);
  for (const auto& c : a.circulations) {
    for (const auto& by : c.by_condition) {
      EXPECT_NE(std::find(by.begin(), by.end(), path_of({0, 5})), by.end());
    }
  }
  // With endpoints outside the dominant pair, every 8-step trace detours
  // through it; the traces anchored at the pair carry only that cycle.
  for (const auto& r : a.traces) {
    if (r.condition == TraceCondition::kGivenBoth) continue;
    ASSERT_TRUE(r.trace.has_value());
    const auto anchor = r.initial ? *r.initial : *r.ultimate;
    if (anchor == Emotion::kLove || anchor == Emotion::kAnger) {
      EXPECT_EQ(r.cycles, (std::vector<Cycle>{path_of({0, 5})}));
    }
  }
  bool love_anger = false, anger_love = false;
  for (const auto& p : a.misjudgments) {
    love_anger = love_anger || (p.source == Emotion::kLove && p.target == Emotion::kAnger);
    anger_love = anger_love || (p.source == Emotion::kAnger && p.target == Emotion::kLove);
  }
  EXPECT_TRUE(love_anger);
  EXPECT_TRUE(anger_love);
}

TEST(AnalyzeEvolution, IdentityMatricesAreUnreachableEverywhere) {
  Matrix6 id{};
  for (std::size_t i = 0; i < 6; ++i) id[i][i] = 1.0;
  std::vector<CorrelationMatrix> ms;
  for (auto view : kAllViews) {
    for (auto model : kAllVariants) ms.push_back({id, view, model});
  }
  const auto a = analyze_evolution("id", assemble_perspectives(ms), {});
  for (const auto& p : a.shortest_paths) {
    EXPECT_FALSE(p.trace.has_value());
    EXPECT_NE(p.status.find("no transfer path"), std::string::npos);
  }
  for (const auto& t : a.traces) {
    EXPECT_FALSE(t.trace.has_value());
    EXPECT_EQ(t.status, "unreachable under 8 steps");
  }
}
