#ifndef EMOCORR_CORPUS_HPP
#define EMOCORR_CORPUS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "emocorr/emotion.hpp"
#include "emocorr/features.hpp"
#include "emocorr/vocabulary.hpp"

namespace emocorr {

enum class SourceKind : std::uint8_t { kComment, kNewsBody, kNewsTitle };

std::string_view source_kind_name(SourceKind kind);
std::optional<SourceKind> source_kind_from_name(std::string_view name);

// Public votes, one count per emotion in canonical order.
using VoteCounts = std::array<std::int64_t, kNumEmotions>;

struct RawRecord {
  std::string id;
  std::string body;
  VoteCounts votes{};
  SourceKind source_kind = SourceKind::kComment;
};

enum class Split : std::uint8_t { kTrain, kTest };

struct LabeledText {
  std::string id;
  std::string body;
  Emotion label = Emotion::kLove;
  Split split = Split::kTrain;
  VoteCounts votes{};
};

// Corpus lines are `id<TAB>v0,v1,v2,v3,v4,v5<TAB>text`. Blank lines are skipped.
std::vector<RawRecord> parse_corpus(const std::filesystem::path& path, SourceKind kind);
std::vector<RawRecord> parse_corpus(std::istream& in, SourceKind kind);
RawRecord parse_corpus_line(std::string_view line, std::size_t line_no, SourceKind kind);

// Emotion whose vote share strictly exceeds `min_ratio`, provided the total
// strictly exceeds `min_total`. nullopt means the record is discarded.
std::optional<Emotion> label_by_votes(const VoteCounts& votes, std::int64_t min_total = 200,
                                      double min_ratio = 0.5);

struct LabelingResult {
  std::vector<LabeledText> labeled;
  std::size_t discarded = 0;
};

LabelingResult label_records(const std::vector<RawRecord>& records,
                             std::int64_t min_total = 200, double min_ratio = 0.5);

struct TrainTestSplit {
  std::vector<LabeledText> train;
  std::vector<LabeledText> test;
};

// Stratified by label. Each stratum is put in (id, body) order before a seeded
// shuffle, so the member sets do not depend on input order. A stratum of size c
// contributes round(c * test_fraction) test records.
TrainTestSplit split_train_test(std::vector<LabeledText> records, double test_fraction,
                                std::uint64_t seed);

// Corpus line format plus a trailing `train|test` column.
void write_split(std::ostream& out, const TrainTestSplit& split);

// Vocabulary of "none" plus every distinct token the view extracts from the
// records, ids assigned in lexicographic token order.
Vocabulary build_vocab(const std::vector<LabeledText>& records, FeatureView view,
                       const Tokenizer& tokenizer, const SynonymLexicon* lexicon);

}  // namespace emocorr

#endif  // EMOCORR_CORPUS_HPP
