#ifndef EMOCORR_CONFUSION_HPP
#define EMOCORR_CONFUSION_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "emocorr/emotion.hpp"

namespace emocorr {

inline constexpr std::size_t kNumBasePerspectives = 6;  // 3 views x 2 models
inline constexpr std::size_t kNumPerspectives = kNumBasePerspectives + 1;
inline constexpr std::size_t kMeanPerspective = kNumBasePerspectives;

// Row-stochastic: row = true emotion, column = predicted emotion.
struct CorrelationMatrix {
  Matrix6 values{};
  FeatureView feature = FeatureView::kCharacter;
  ModelVariant model = ModelVariant::kM1;
};

// Position of a (feature, model) pair in a PerspectiveSet: feature-major.
std::size_t perspective_index(FeatureView feature, ModelVariant model);
// "character/M1", ..., "explicit/M2", "mean".
std::string perspective_label(std::size_t k);

// Divides each row of the counts by its sum. A zero row throws DataError
// naming the emotion.
CorrelationMatrix row_normalize(const CountMatrix& counts, FeatureView feature,
                                ModelVariant model);

// Throws DataError naming the first row whose sum is off by more than `tol`
// or that holds a negative entry.
void check_row_stochastic(const Matrix6& m, double tol = 1e-6);

struct PerspectiveSet {
  std::array<CorrelationMatrix, kNumBasePerspectives> matrices;  // perspective_index order
  Matrix6 mean{};

  const Matrix6& perspective(std::size_t k) const {
    return k == kMeanPerspective ? mean : matrices.at(k).values;
  }
};

// Accepts the six matrices in any order; each (feature, model) pair must occur
// exactly once. Appends the elementwise mean as the seventh perspective.
PerspectiveSet assemble_perspectives(std::span<const CorrelationMatrix> matrices);

struct EigenDecomposition {
  Matrix6 covariance{};
  std::array<double, kNumEmotions> eigenvalues{};   // descending, >= 0
  std::array<std::array<double, kNumEmotions>, kNumEmotions> eigenvectors{};  // [i] = v_i
};

// Population covariance (divisor 6) of the six columns of `m` viewed as points
// in R^6.
Matrix6 column_covariance(const Matrix6& m);

// Cyclic Jacobi eigensolver for a symmetric matrix. Eigenpairs are sorted by
// descending eigenvalue; each eigenvector is flipped so that its
// largest-magnitude component (first one on near-ties) is positive.
EigenDecomposition symmetric_eigen(const Matrix6& sym);

// Eigen-decomposition of column_covariance(m) with round-off negatives
// clamped to zero.
EigenDecomposition principal_components(const Matrix6& m);

struct EmotionFeature {
  std::array<double, kNumEmotions> vector{};
  std::size_t retained = 0;  // m2
};

// Keeps the fewest leading components whose cumulative variance share reaches
// `threshold` and returns their eigenvalue-weighted average eigenvector.
EmotionFeature emotion_feature_vector(const EigenDecomposition& decomp,
                                      double threshold = 0.85);

// Rows are perspectives, columns are emotions.
using PerspectiveGrid = std::array<std::array<double, kNumEmotions>, kNumPerspectives>;

struct EmotionFeatureMatrix {
  PerspectiveGrid rows{};
  std::array<std::size_t, kNumPerspectives> retained{};

  std::array<double, kNumPerspectives> column(Emotion e) const;
};

EmotionFeatureMatrix feature_matrix(const PerspectiveSet& perspectives,
                                    double threshold = 0.85);

struct DistanceScores {
  PerspectiveGrid distances{};  // |e_i - e_g| per perspective
  double absolute_score = 0.0;  // mean of all entries
};

DistanceScores distance_and_scores(const EmotionFeatureMatrix& features, Emotion center);

using SequenceRow = std::array<Emotion, kNumEmotions>;

struct SequenceMatrix {
  std::array<SequenceRow, kNumPerspectives> rows{};
  std::array<double, kNumEmotions> entropy{};  // per column
};

// Orders each row by ascending distance, center first, ties by emotion index.
SequenceMatrix sequence_and_entropy(const PerspectiveGrid& distances, Emotion center);

// Shannon entropy (natural log) of the label proportions in `labels`.
double column_entropy(std::span<const Emotion> labels);

enum class Relation : std::uint8_t { kMax, kMin };
std::string_view relation_name(Relation r);

struct ConfusionLawEntry {
  Emotion center = Emotion::kLove;
  Relation relation = Relation::kMax;
  Emotion partner = Emotion::kLove;  // modal emotion of the column
  double entropy = 0.0;
  bool kept = false;
  bool low_confidence = false;  // the modal emotion is tied
};

struct ConfusionLaw {
  double mean_entropy = 0.0;
  std::vector<ConfusionLawEntry> entries;  // center-major, max before min
};

// Evaluates the second (max) and last (min) column of each center's sequence
// matrix and keeps the columns whose entropy is at most the mean of those
// twelve.
ConfusionLaw confusion_law_report(const std::array<SequenceMatrix, kNumEmotions>& sequences);

// Everything the confusion stage derives for one dataset.
struct ConfusionAnalysis {
  std::string dataset;
  PerspectiveSet perspectives;
  std::array<EigenDecomposition, kNumPerspectives> decompositions;
  EmotionFeatureMatrix features;
  std::array<DistanceScores, kNumEmotions> distances;
  std::array<SequenceMatrix, kNumEmotions> sequences;
  // Emotions by ascending absolute score: most confusable first.
  std::array<Emotion, kNumEmotions> confusion_ranking{};
  ConfusionLaw law;
};

ConfusionAnalysis analyze_confusion(std::string dataset, const PerspectiveSet& perspectives,
                                    double variance_threshold = 0.85);

}  // namespace emocorr

#endif  // EMOCORR_CONFUSION_HPP
