#ifndef EMOCORR_FEATURES_HPP
#define EMOCORR_FEATURES_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emocorr/emotion.hpp"
#include "emocorr/vocabulary.hpp"

namespace emocorr {

// Splits text into words. Injected so that a language-specific segmenter can
// replace whitespace splitting.
using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

Tokenizer whitespace_tokenizer();

// UTF-8 code points of `text`, whitespace excluded. Invalid bytes are kept as
// single-byte glyphs.
std::vector<std::string> split_glyphs(std::string_view text);

// Word -> synonym-group tag. Immutable once loaded.
class SynonymLexicon {
 public:
  // Returns true if `word` already had a tag (which is replaced).
  bool insert(std::string word, std::string tag);

  std::optional<std::string_view> tag_of(std::string_view word) const;

  std::size_t word_count() const { return entries_.size(); }
  std::size_t tag_count() const;
  // Words that appeared in more than one group while loading.
  std::size_t duplicate_words() const { return duplicate_words_; }

 private:
  std::unordered_map<std::string, std::string> entries_;
  std::size_t duplicate_words_ = 0;
};

// Lines `tag<TAB>word1 word2 ...`; blank lines ignored; a repeated word takes
// the tag of its last group.
SynonymLexicon load_synonym_lexicon(const std::filesystem::path& path);
SynonymLexicon parse_synonym_lexicon(std::istream& in);

// Character or explicit (word) tokens of `text`. The implicit view needs a
// lexicon; use extract_view_tokens for it.
std::vector<std::string> tokenize(std::string_view text, FeatureView view,
                                  const Tokenizer& tokenizer);

// Replaces each word with its tag; words missing from the lexicon stand for
// themselves.
std::vector<std::string> apply_synonym_map(const std::vector<std::string>& words,
                                           const SynonymLexicon& lexicon);

std::vector<std::string> extract_view_tokens(std::string_view text, FeatureView view,
                                             const Tokenizer& tokenizer,
                                             const SynonymLexicon* lexicon);

struct FeatureSequence {
  std::vector<TokenId> tokens;
  std::vector<std::uint8_t> mask;
  FeatureView view = FeatureView::kExplicit;

  std::size_t length() const { return tokens.size(); }
  friend bool operator==(const FeatureSequence&, const FeatureSequence&) = default;
};

// Right-pads with "none" (mask 0) or keeps the first `length` tokens. Tokens
// outside the vocabulary become "none".
FeatureSequence pad_and_mask(const std::vector<std::string>& tokens,
                             const Vocabulary& vocab, std::size_t length);

// Token text at every position, padding included.
std::vector<std::string> decode(const FeatureSequence& seq, const Vocabulary& vocab);

}  // namespace emocorr

#endif  // EMOCORR_FEATURES_HPP
