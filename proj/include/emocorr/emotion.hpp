#ifndef EMOCORR_EMOTION_HPP
#define EMOCORR_EMOTION_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace emocorr {

// Emotion categories in their canonical index order.
enum class Emotion : std::uint8_t {
  kLove = 0,
  kFear = 1,
  kJoy = 2,
  kSadness = 3,
  kSurprise = 4,
  kAnger = 5,
};

inline constexpr std::size_t kNumEmotions = 6;

inline constexpr std::array<Emotion, kNumEmotions> kAllEmotions = {
    Emotion::kLove,    Emotion::kFear,     Emotion::kJoy,
    Emotion::kSadness, Emotion::kSurprise, Emotion::kAnger};

constexpr std::size_t idx(Emotion e) { return static_cast<std::size_t>(e); }
constexpr Emotion emotion_at(std::size_t i) { return static_cast<Emotion>(i); }

std::string_view emotion_name(Emotion e);
std::optional<Emotion> emotion_from_name(std::string_view name);

using Matrix6 = std::array<std::array<double, kNumEmotions>, kNumEmotions>;
using CountMatrix = std::array<std::array<std::int64_t, kNumEmotions>, kNumEmotions>;

// The three text views a classifier can be trained on.
enum class FeatureView : std::uint8_t { kCharacter = 0, kImplicit = 1, kExplicit = 2 };

// M1 = CNN-LSTM2, M2 = CNN-LSTM2 plus the sigmoid stack branch.
enum class ModelVariant : std::uint8_t { kM1 = 1, kM2 = 2 };

inline constexpr std::array<FeatureView, 3> kAllViews = {
    FeatureView::kCharacter, FeatureView::kImplicit, FeatureView::kExplicit};
inline constexpr std::array<ModelVariant, 2> kAllVariants = {ModelVariant::kM1,
                                                             ModelVariant::kM2};

std::string_view view_name(FeatureView v);
std::optional<FeatureView> view_from_name(std::string_view name);
std::string_view variant_name(ModelVariant v);
std::optional<ModelVariant> variant_from_name(std::string_view name);

}  // namespace emocorr

#endif  // EMOCORR_EMOTION_HPP
