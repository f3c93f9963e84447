#include "emocorr/emotion.hpp"

namespace emocorr {

namespace {
constexpr std::array<std::string_view, kNumEmotions> kEmotionNames = {
    "love", "fear", "joy", "sadness", "surprise", "anger"};
constexpr std::array<std::string_view, 3> kViewNames = {"character", "implicit",
                                                        "explicit"};
}  // namespace

std::string_view emotion_name(Emotion e) { return kEmotionNames.at(idx(e)); }

std::optional<Emotion> emotion_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    if (kEmotionNames[i] == name) return emotion_at(i);
  }
  return std::nullopt;
}

std::string_view view_name(FeatureView v) {
  return kViewNames.at(static_cast<std::size_t>(v));
}

std::optional<FeatureView> view_from_name(std::string_view name) {
  for (auto v : kAllViews) {
    if (view_name(v) == name) return v;
  }
  return std::nullopt;
}

std::string_view variant_name(ModelVariant v) {
  return v == ModelVariant::kM1 ? "M1" : "M2";
}

std::optional<ModelVariant> variant_from_name(std::string_view name) {
  if (name == "M1") return ModelVariant::kM1;
  if (name == "M2") return ModelVariant::kM2;
  return std::nullopt;
}

}  // namespace emocorr
