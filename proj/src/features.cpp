#include "emocorr/features.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "emocorr/errors.hpp"

namespace emocorr {

Vocabulary::Vocabulary(FeatureView view) : view_(view) {
  tokens_.emplace_back(kPadToken);
  ids_.emplace(std::string(kPadToken), kPadId);
}

TokenId Vocabulary::add(std::string_view token) {
  if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  ids_.emplace(std::string(token), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
  return std::nullopt;
}

TokenId Vocabulary::id_or_pad(std::string_view token) const {
  return find(token).value_or(kPadId);
}

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 1;
}

}  // namespace

Tokenizer whitespace_tokenizer() {
  return [](std::string_view text) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && is_space(text[i])) ++i;
      const std::size_t start = i;
      while (i < text.size() && !is_space(text[i])) ++i;
      if (i > start) words.emplace_back(text.substr(start, i - start));
    }
    return words;
  };
}

std::vector<std::string> split_glyphs(std::string_view text) {
  std::vector<std::string> glyphs;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = utf8_length(static_cast<unsigned char>(text[i]));
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    if (!(len == 1 && is_space(text[i]))) glyphs.emplace_back(text.substr(i, len));
    i += len;
  }
  return glyphs;
}

bool SynonymLexicon::insert(std::string word, std::string tag) {
  auto [it, inserted] = entries_.insert_or_assign(std::move(word), std::move(tag));
  if (!inserted) ++duplicate_words_;
  return !inserted;
}

std::optional<std::string_view> SynonymLexicon::tag_of(std::string_view word) const {
  if (auto it = entries_.find(std::string(word)); it != entries_.end()) {
    return std::string_view(it->second);
  }
  return std::nullopt;
}

std::size_t SynonymLexicon::tag_count() const {
  std::set<std::string_view> tags;
  for (const auto& [word, tag] : entries_) tags.insert(tag);
  return tags.size();
}

SynonymLexicon parse_synonym_lexicon(std::istream& in) {
  SynonymLexicon lexicon;
  const Tokenizer split = whitespace_tokenizer();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected tag<TAB>words");
    const auto tag_tokens = split(std::string_view(line).substr(0, tab));
    if (tag_tokens.size() != 1) throw ParseError(line_no, "expected a single tag");
    const auto words = split(std::string_view(line).substr(tab + 1));
    if (words.empty()) throw ParseError(line_no, "synonym group has no words");
    for (const auto& w : words) lexicon.insert(w, tag_tokens.front());
  }
  return lexicon;
}

SynonymLexicon load_synonym_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon " + path.string());
  return parse_synonym_lexicon(in);
}

std::vector<std::string> tokenize(std::string_view text, FeatureView view,
                                  const Tokenizer& tokenizer) {
  switch (view) {
    case FeatureView::kCharacter:
      return split_glyphs(text);
    case FeatureView::kExplicit:
      return tokenizer(text);
    case FeatureView::kImplicit:
      break;
  }
  throw ConfigError("tokenize: the implicit view requires a synonym lexicon");
}

std::vector<std::string> apply_synonym_map(const std::vector<std::string>& words,
                                           const SynonymLexicon& lexicon) {
  std::vector<std::string> tags;
  tags.reserve(words.size());
  for (const auto& w : words) {
    if (auto tag = lexicon.tag_of(w)) {
      tags.emplace_back(*tag);
    } else {
      tags.push_back(w);
    }
  }
  return tags;
}

std::vector<std::string> extract_view_tokens(std::string_view text, FeatureView view,
                                             const Tokenizer& tokenizer,
                                             const SynonymLexicon* lexicon) {
  if (view != FeatureView::kImplicit) return tokenize(text, view, tokenizer);
  if (lexicon == nullptr) {
    throw ConfigError("implicit view requires a synonym lexicon");
  }
  return apply_synonym_map(tokenizer(text), *lexicon);
}

FeatureSequence pad_and_mask(const std::vector<std::string>& tokens,
                             const Vocabulary& vocab, std::size_t length) {
  if (length == 0) throw ConfigError("pad length must be at least 1");
  FeatureSequence seq;
  seq.view = vocab.view();
  seq.tokens.assign(length, Vocabulary::kPadId);
  seq.mask.assign(length, 0);
  const std::size_t n = std::min(length, tokens.size());
  for (std::size_t i = 0; i < n; ++i) {
    seq.tokens[i] = vocab.id_or_pad(tokens[i]);
    seq.mask[i] = seq.tokens[i] != Vocabulary::kPadId ? 1 : 0;
  }
  return seq;
}

std::vector<std::string> decode(const FeatureSequence& seq, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(seq.tokens.size());
  for (auto id : seq.tokens) out.push_back(vocab.token(id));
  return out;
}

}  // namespace emocorr
