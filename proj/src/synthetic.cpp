#include "emocorr/synthetic.hpp"

#include <algorithm>
#include <set>

#include "emocorr/errors.hpp"
#include "emocorr/random.hpp"

namespace emocorr {

namespace {

constexpr std::string_view kFillerLetters = "mnopqrstuvwxyz";

std::string_view signal_letters(Emotion e) {
  static constexpr std::string_view kLetters[kNumEmotions] = {"ab", "cd", "ef", "gh", "ij", "kl"};
  return kLetters[idx(e)];
}

std::vector<std::string> make_words(Rng& rng, std::string_view letters, std::size_t count,
                                    std::set<std::string>& taken) {
  std::vector<std::string> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > count * 1000) throw ConfigError("cannot generate enough distinct words");
    const std::size_t len = 3 + rng.below(3);
    std::string w;
    for (std::size_t i = 0; i < len; ++i) w += letters[rng.below(letters.size())];
    if (taken.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

void group_words(SyntheticCorpus& corpus, const std::vector<std::string>& words,
                 std::size_t per_tag, const std::string& prefix) {
  for (std::size_t i = 0; i < words.size(); i += per_tag) {
    const std::size_t end = std::min(words.size(), i + per_tag);
    corpus.lexicon.emplace_back(prefix + std::to_string(i / per_tag),
                                std::vector<std::string>(words.begin() + i, words.begin() + end));
  }
}

// Votes whose thresholds pass (or deliberately fail) for `label`.
VoteCounts make_votes(Rng& rng, Emotion label, bool discard) {
  VoteCounts v{};
  std::int64_t total = 0;
  double share = 0.0;
  if (!discard) {
    total = 220 + static_cast<std::int64_t>(rng.below(380));
    share = rng.uniform(0.55, 0.9);
  } else if (rng.below(2) == 0) {
    total = 40 + static_cast<std::int64_t>(rng.below(160));
    share = rng.uniform(0.55, 0.9);
  } else {
    total = 220 + static_cast<std::int64_t>(rng.below(380));
    share = rng.uniform(0.2, 0.45);
  }
  const auto top = static_cast<std::int64_t>(static_cast<double>(total) * share);
  v[idx(label)] = top;
  std::int64_t rest = total - top;
  // Spread the remainder over the other five emotions, none reaching `top`.
  for (std::size_t k = 0; rest > 0; k = (k + 1) % kNumEmotions) {
    if (k == idx(label)) continue;
    const std::int64_t room = std::min(rest, top - 1 - v[k]);
    if (room <= 0) continue;
    const auto take = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(room)));
    v[k] += take;
    rest -= take;
  }
  return v;
}

Emotion other_emotion(Rng& rng, Emotion e) {
  std::size_t k = rng.below(kNumEmotions - 1);
  if (k >= idx(e)) ++k;
  return emotion_at(k);
}

std::string make_id(std::size_t n) {
  std::string s = std::to_string(n);
  return "s" + std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& o) {
  if (o.min_words == 0 || o.max_words < o.min_words) throw ConfigError("bad word count range");
  if (o.words_per_tag == 0) throw ConfigError("words_per_tag must be positive");
  Rng rng(o.seed);
  SyntheticCorpus corpus;
  std::set<std::string> taken;
  std::array<std::vector<std::string>, kNumEmotions> signal;
  for (auto e : kAllEmotions) {
    signal[idx(e)] = make_words(rng, signal_letters(e), o.signal_words_per_emotion, taken);
    group_words(corpus, signal[idx(e)], o.words_per_tag,
                "T" + std::string(emotion_name(e)).substr(0, 3) + "_");
  }
  const auto filler = make_words(rng, kFillerLetters, o.filler_words, taken);
  group_words(corpus, filler, o.words_per_tag, "Tfill_");

  std::size_t n = 0;
  for (std::size_t r = 0; r < o.records_per_emotion; ++r) {
    for (auto e : kAllEmotions) {
      const std::size_t len = o.min_words + rng.below(o.max_words - o.min_words + 1);
      std::string text;
      for (std::size_t w = 0; w < len; ++w) {
        const bool sig = filler.empty() || rng.uniform01() < o.signal_rate;
        const auto& pool = sig ? signal[idx(e)] : filler;
        if (w) text += ' ';
        text += pool[rng.below(pool.size())];
      }
      Emotion label = e;
      if ((e == Emotion::kLove || e == Emotion::kAnger) && rng.uniform01() < o.love_anger_swap) {
        label = e == Emotion::kLove ? Emotion::kAnger : Emotion::kLove;
      } else if (rng.uniform01() < o.label_noise) {
        label = other_emotion(rng, e);
      }
      const bool discard = rng.uniform01() < o.discard_rate;
      corpus.records.push_back({make_id(n++), std::move(text), make_votes(rng, label, discard),
                                SourceKind::kComment});
      corpus.source_emotion.push_back(e);
    }
  }
  return corpus;
}

SyntheticCorpus generate_separable_corpus(std::size_t records_per_emotion, std::size_t words,
                                          std::uint64_t seed) {
  if (words == 0) throw ConfigError("words must be positive");
  Rng rng(seed);
  SyntheticCorpus corpus;
  std::set<std::string> taken;
  std::array<std::string, kNumEmotions> marker;
  for (auto e : kAllEmotions) {
    marker[idx(e)] = make_words(rng, signal_letters(e), 1, taken).front();
    corpus.lexicon.push_back({"M" + std::string(emotion_name(e)), {marker[idx(e)]}});
  }
  const auto filler = make_words(rng, kFillerLetters, 12, taken);
  group_words(corpus, filler, 3, "Tfill_");

  std::size_t n = 0;
  for (std::size_t r = 0; r < records_per_emotion; ++r) {
    for (auto e : kAllEmotions) {
      const std::size_t at = rng.below(words);
      std::string text;
      for (std::size_t w = 0; w < words; ++w) {
        if (w) text += ' ';
        text += w == at ? marker[idx(e)] : filler[rng.below(filler.size())];
      }
      corpus.records.push_back({make_id(n++), std::move(text), make_votes(rng, e, false),
                                SourceKind::kComment});
      corpus.source_emotion.push_back(e);
    }
  }
  return corpus;
}

void write_corpus(std::ostream& out, const std::vector<RawRecord>& records) {
  for (const auto& r : records) {
    out << r.id << '\t';
    for (std::size_t k = 0; k < kNumEmotions; ++k) out << (k ? "," : "") << r.votes[k];
    out << '\t' << r.body << '\n';
  }
}

void write_lexicon(std::ostream& out, const SyntheticCorpus& corpus) {
  for (const auto& [tag, words] : corpus.lexicon) {
    out << tag << '\t';
    for (std::size_t i = 0; i < words.size(); ++i) out << (i ? " " : "") << words[i];
    out << '\n';
  }
}

}  // namespace emocorr
