#ifndef EMOCORR_VOCABULARY_HPP
#define EMOCORR_VOCABULARY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emocorr/emotion.hpp"

namespace emocorr {

using TokenId = std::int32_t;

// Bijection between token text and contiguous ids. Id 0 is always the padding
// token "none"; a literal "none" in the input text is treated as padding.
class Vocabulary {
 public:
  static constexpr std::string_view kPadToken = "none";
  static constexpr TokenId kPadId = 0;

  explicit Vocabulary(FeatureView view);

  // Returns the id of `token`, inserting it if new.
  TokenId add(std::string_view token);

  std::optional<TokenId> find(std::string_view token) const;
  // Unknown tokens map to the padding id.
  TokenId id_or_pad(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }

  std::size_t size() const { return tokens_.size(); }
  FeatureView view() const { return view_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  FeatureView view_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

}  // namespace emocorr

#endif  // EMOCORR_VOCABULARY_HPP
