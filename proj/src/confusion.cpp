#include "emocorr/confusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emocorr/errors.hpp"

namespace emocorr {

std::size_t perspective_index(FeatureView feature, ModelVariant model) {
  return static_cast<std::size_t>(feature) * 2 + (model == ModelVariant::kM1 ? 0 : 1);
}

std::string perspective_label(std::size_t k) {
  if (k == kMeanPerspective) return "mean";
  const auto feature = kAllViews.at(k / 2);
  const auto model = kAllVariants.at(k % 2);
  return std::string(view_name(feature)) + "/" + std::string(variant_name(model));
}

CorrelationMatrix row_normalize(const CountMatrix& counts, FeatureView feature,
                                ModelVariant model) {
  CorrelationMatrix out;
  out.feature = feature;
  out.model = model;
  for (std::size_t r = 0; r < kNumEmotions; ++r) {
    std::int64_t total = 0;
    for (auto c : counts[r]) {
      if (c < 0) throw DataError("negative count in row " + std::string(emotion_name(emotion_at(r))));
      total += c;
    }
    if (total == 0) {
      throw DataError("no test texts labelled " + std::string(emotion_name(emotion_at(r))) +
                      "; cannot normalise its row");
    }
    for (std::size_t c = 0; c < kNumEmotions; ++c) {
      out.values[r][c] = static_cast<double>(counts[r][c]) / static_cast<double>(total);
    }
  }
  return out;
}

void check_row_stochastic(const Matrix6& m, double tol) {
  for (std::size_t r = 0; r < kNumEmotions; ++r) {
    double sum = 0.0;
    for (double v : m[r]) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DataError("row " + std::to_string(r) + " (" +
                        std::string(emotion_name(emotion_at(r))) +
                        ") has a negative or non-finite entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw DataError("row " + std::to_string(r) + " (" +
                      std::string(emotion_name(emotion_at(r))) + ") sums to " +
                      std::to_string(sum) + ", not 1");
    }
  }
}

PerspectiveSet assemble_perspectives(std::span<const CorrelationMatrix> matrices) {
  if (matrices.size() != kNumBasePerspectives) {
    throw ConfigError("expected exactly 6 correlation matrices, got " +
                      std::to_string(matrices.size()));
  }
  PerspectiveSet set;
  std::array<bool, kNumBasePerspectives> seen{};
  for (const auto& m : matrices) {
    const auto k = perspective_index(m.feature, m.model);
    if (seen[k]) throw ConfigError("duplicate perspective " + perspective_label(k));
    seen[k] = true;
    set.matrices[k] = m;
  }
  for (std::size_t r = 0; r < kNumEmotions; ++r) {
    for (std::size_t c = 0; c < kNumEmotions; ++c) {
      double s = 0.0;
      for (const auto& m : set.matrices) s += m.values[r][c];
      set.mean[r][c] = s / static_cast<double>(kNumBasePerspectives);
    }
  }
  return set;
}

Matrix6 column_covariance(const Matrix6& m) {
  std::array<double, kNumEmotions> mean{};
  for (std::size_t r = 0; r < kNumEmotions; ++r) {
    mean[r] = std::accumulate(m[r].begin(), m[r].end(), 0.0) / static_cast<double>(kNumEmotions);
  }
  Matrix6 cov{};
  for (std::size_t r = 0; r < kNumEmotions; ++r) {
    for (std::size_t s = r; s < kNumEmotions; ++s) {
      double acc = 0.0;
      for (std::size_t c = 0; c < kNumEmotions; ++c) acc += (m[r][c] - mean[r]) * (m[s][c] - mean[s]);
      cov[r][s] = cov[s][r] = acc / static_cast<double>(kNumEmotions);
    }
  }
  return cov;
}

EigenDecomposition symmetric_eigen(const Matrix6& sym) {
  constexpr std::size_t n = kNumEmotions;
  Matrix6 a = sym;
  Matrix6 v{};
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  double norm = 0.0;
  for (const auto& row : a) {
    for (double x : row) norm += x * x;
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off <= 1e-32 * norm || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<std::size_t, n> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });

  EigenDecomposition out;
  out.covariance = sym;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t col = order[i];
    out.eigenvalues[i] = a[col][col];
    auto& vec = out.eigenvectors[i];
    double biggest = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      vec[k] = v[k][col];
      biggest = std::max(biggest, std::abs(vec[k]));
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(vec[k]) >= biggest - 1e-12) {
        if (vec[k] < 0.0) {
          for (auto& x : vec) x = -x;
        }
        break;
      }
    }
  }
  return out;
}

EigenDecomposition principal_components(const Matrix6& m) {
  EigenDecomposition d = symmetric_eigen(column_covariance(m));
  for (auto& l : d.eigenvalues) l = std::max(l, 0.0);
  return d;
}

EmotionFeature emotion_feature_vector(const EigenDecomposition& decomp, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("variance threshold must lie in (0, 1]");
  }
  const double total = std::accumulate(decomp.eigenvalues.begin(), decomp.eigenvalues.end(), 0.0);
  if (!(total > 0.0)) throw DataError("degenerate spectrum");

  EmotionFeature f;
  double kept = 0.0;
  while (f.retained < kNumEmotions) {
    kept += decomp.eigenvalues[f.retained];
    ++f.retained;
    if (kept / total >= threshold - 1e-12) break;
  }
  for (std::size_t i = 0; i < f.retained; ++i) {
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
      f.vector[k] += decomp.eigenvalues[i] * decomp.eigenvectors[i][k];
    }
  }
  for (auto& x : f.vector) x /= kept;
  return f;
}

std::array<double, kNumPerspectives> EmotionFeatureMatrix::column(Emotion e) const {
  std::array<double, kNumPerspectives> col{};
  for (std::size_t k = 0; k < kNumPerspectives; ++k) col[k] = rows[k][idx(e)];
  return col;
}

EmotionFeatureMatrix feature_matrix(const PerspectiveSet& perspectives, double threshold) {
  EmotionFeatureMatrix out;
  for (std::size_t k = 0; k < kNumPerspectives; ++k) {
    const auto f = emotion_feature_vector(principal_components(perspectives.perspective(k)),
                                          threshold);
    out.rows[k] = f.vector;
    out.retained[k] = f.retained;
  }
  return out;
}

DistanceScores distance_and_scores(const EmotionFeatureMatrix& features, Emotion center) {
  DistanceScores out;
  const std::size_t g = idx(center);
  double total = 0.0;
  for (std::size_t k = 0; k < kNumPerspectives; ++k) {
    for (std::size_t i = 0; i < kNumEmotions; ++i) {
      out.distances[k][i] = std::abs(features.rows[k][i] - features.rows[k][g]);
      total += out.distances[k][i];
    }
  }
  out.absolute_score = total / static_cast<double>(kNumPerspectives * kNumEmotions);
  return out;
}

SequenceMatrix sequence_and_entropy(const PerspectiveGrid& distances, Emotion center) {
  SequenceMatrix out;
  const std::size_t g = idx(center);
  for (std::size_t k = 0; k < kNumPerspectives; ++k) {
    std::array<std::size_t, kNumEmotions> order{};
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& d = distances[k];
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if ((x == g) != (y == g)) return x == g;
      if (d[x] != d[y]) return d[x] < d[y];
      return x < y;
    });
    for (std::size_t c = 0; c < kNumEmotions; ++c) out.rows[k][c] = emotion_at(order[c]);
  }
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    std::array<Emotion, kNumPerspectives> col{};
    for (std::size_t k = 0; k < kNumPerspectives; ++k) col[k] = out.rows[k][c];
    out.entropy[c] = column_entropy(col);
  }
  return out;
}

double column_entropy(std::span<const Emotion> labels) {
  if (labels.empty()) return 0.0;
  std::array<std::size_t, kNumEmotions> counts{};
  for (auto e : labels) ++counts[idx(e)];
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(labels.size());
    h -= p * std::log(p);
  }
  return h;
}

std::string_view relation_name(Relation r) { return r == Relation::kMax ? "max" : "min"; }

ConfusionLaw confusion_law_report(const std::array<SequenceMatrix, kNumEmotions>& sequences) {
  ConfusionLaw law;
  double sum = 0.0;
  for (std::size_t g = 0; g < kNumEmotions; ++g) {
    for (auto rel : {Relation::kMax, Relation::kMin}) {
      const std::size_t col = rel == Relation::kMax ? 1 : kNumEmotions - 1;
      std::array<std::size_t, kNumEmotions> counts{};
      for (const auto& row : sequences[g].rows) ++counts[idx(row[col])];
      const auto mode = static_cast<std::size_t>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      ConfusionLawEntry e;
      e.center = emotion_at(g);
      e.relation = rel;
      e.partner = emotion_at(mode);
      e.entropy = sequences[g].entropy[col];
      e.low_confidence = std::count(counts.begin(), counts.end(), counts[mode]) > 1;
      sum += e.entropy;
      law.entries.push_back(e);
    }
  }
  law.mean_entropy = sum / static_cast<double>(law.entries.size());
  // Slack absorbs round-off in the mean so that equal entropies all survive.
  for (auto& e : law.entries) e.kept = e.entropy <= law.mean_entropy + 1e-12;
  return law;
}

ConfusionAnalysis analyze_confusion(std::string dataset, const PerspectiveSet& perspectives,
                                    double variance_threshold) {
  ConfusionAnalysis a;
  a.dataset = std::move(dataset);
  a.perspectives = perspectives;
  for (std::size_t k = 0; k < kNumPerspectives; ++k) {
    a.decompositions[k] = principal_components(perspectives.perspective(k));
    const auto f = emotion_feature_vector(a.decompositions[k], variance_threshold);
    a.features.rows[k] = f.vector;
    a.features.retained[k] = f.retained;
  }
  for (auto e : kAllEmotions) {
    a.distances[idx(e)] = distance_and_scores(a.features, e);
    a.sequences[idx(e)] = sequence_and_entropy(a.distances[idx(e)].distances, e);
  }
  std::array<std::size_t, kNumEmotions> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a.distances[x].absolute_score < a.distances[y].absolute_score;
  });
  for (std::size_t i = 0; i < kNumEmotions; ++i) a.confusion_ranking[i] = emotion_at(order[i]);
  a.law = confusion_law_report(a.sequences);
  return a;
}

}  // namespace emocorr
