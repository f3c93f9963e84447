#ifndef EMOCORR_SYNTHETIC_HPP
#define EMOCORR_SYNTHETIC_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "emocorr/corpus.hpp"

namespace emocorr {

// Generator for desk-scale corpora with a known signal. Every emotion owns a
// disjoint set of letters from which its signal words are spelled, so the
// character, implicit and explicit views all carry the label.
struct SyntheticOptions {
  std::size_t records_per_emotion = 60;
  std::size_t min_words = 5;
  std::size_t max_words = 8;
  std::size_t signal_words_per_emotion = 8;
  std::size_t filler_words = 24;
  std::size_t words_per_tag = 2;
  // Probability that a word is drawn from the text's own signal pool.
  double signal_rate = 0.6;
  // Fraction of love and anger texts whose votes name the other emotion.
  double love_anger_swap = 0.0;
  // Fraction of texts whose votes name a uniformly drawn different emotion.
  double label_noise = 0.0;
  // Fraction of records whose votes fail the labeling thresholds.
  double discard_rate = 0.05;
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  std::vector<RawRecord> records;
  // Emotion the text was generated from (before any vote swap or noise).
  std::vector<Emotion> source_emotion;
  // Synonym groups: tag and member words.
  std::vector<std::pair<std::string, std::vector<std::string>>> lexicon;
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& options);

// Each text holds filler words plus exactly one marker word of its emotion; no
// label noise.
SyntheticCorpus generate_separable_corpus(std::size_t records_per_emotion, std::size_t words,
                                          std::uint64_t seed);

void write_corpus(std::ostream& out, const std::vector<RawRecord>& records);
void write_lexicon(std::ostream& out, const SyntheticCorpus& corpus);

}  // namespace emocorr

#endif  // EMOCORR_SYNTHETIC_HPP
