#include "emocorr/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <tuple>

#include "emocorr/errors.hpp"
#include "emocorr/random.hpp"

namespace emocorr {

namespace {

constexpr std::array<std::string_view, 3> kSourceKindNames = {"comment", "news_body",
                                                              "news_title"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

VoteCounts parse_votes(std::string_view field, std::size_t line_no) {
  VoteCounts votes{};
  std::size_t count = 0;
  std::size_t pos = 0;
  while (true) {
    const auto comma = field.find(',', pos);
    const auto item = trim(field.substr(pos, comma == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : comma - pos));
    if (count < kNumEmotions) {
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
        throw ParseError(line_no, "vote count '" + std::string(item) + "' is not an integer");
      }
      if (value < 0) throw ParseError(line_no, "vote counts must be non-negative");
      votes[count] = value;
    }
    ++count;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (count != kNumEmotions) {
    throw ParseError(line_no, "expected 6 vote counts");
  }
  return votes;
}

}  // namespace

std::string_view source_kind_name(SourceKind kind) {
  return kSourceKindNames.at(static_cast<std::size_t>(kind));
}

std::optional<SourceKind> source_kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kSourceKindNames.size(); ++i) {
    if (kSourceKindNames[i] == name) return static_cast<SourceKind>(i);
  }
  return std::nullopt;
}

RawRecord parse_corpus_line(std::string_view line, std::size_t line_no, SourceKind kind) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto tab1 = line.find('\t');
  const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
  if (tab2 == std::string_view::npos) {
    throw ParseError(line_no, "expected id<TAB>votes<TAB>text");
  }
  RawRecord rec;
  rec.id = std::string(trim(line.substr(0, tab1)));
  if (rec.id.empty()) throw ParseError(line_no, "empty id");
  rec.votes = parse_votes(line.substr(tab1 + 1, tab2 - tab1 - 1), line_no);
  rec.body = std::string(line.substr(tab2 + 1));
  if (trim(rec.body).empty()) throw ParseError(line_no, "empty text");
  rec.source_kind = kind;
  return rec;
}

std::vector<RawRecord> parse_corpus(std::istream& in, SourceKind kind) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    records.push_back(parse_corpus_line(line, line_no, kind));
  }
  return records;
}

std::vector<RawRecord> parse_corpus(const std::filesystem::path& path, SourceKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path.string());
  return parse_corpus(in, kind);
}

std::optional<Emotion> label_by_votes(const VoteCounts& votes, std::int64_t min_total,
                                      double min_ratio) {
  std::int64_t total = 0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    total += votes[i];
    if (votes[i] > votes[best]) best = i;
  }
  if (total <= min_total) return std::nullopt;
  if (!(static_cast<double>(votes[best]) > min_ratio * static_cast<double>(total))) {
    return std::nullopt;
  }
  return emotion_at(best);
}

LabelingResult label_records(const std::vector<RawRecord>& records, std::int64_t min_total,
                             double min_ratio) {
  LabelingResult result;
  for (const auto& rec : records) {
    auto label = label_by_votes(rec.votes, min_total, min_ratio);
    if (!label) {
      ++result.discarded;
      continue;
    }
    result.labeled.push_back(
        LabeledText{rec.id, rec.body, *label, Split::kTrain, rec.votes});
  }
  return result;
}

TrainTestSplit split_train_test(std::vector<LabeledText> records, double test_fraction,
                                std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie strictly between 0 and 1");
  }
  std::array<std::vector<LabeledText>, kNumEmotions> strata;
  for (auto& r : records) strata[idx(r.label)].push_back(std::move(r));

  TrainTestSplit out;
  for (std::size_t label = 0; label < kNumEmotions; ++label) {
    auto& stratum = strata[label];
    std::sort(stratum.begin(), stratum.end(), [](const LabeledText& a, const LabeledText& b) {
      return std::tie(a.id, a.body) < std::tie(b.id, b.body);
    });
    Rng rng(mix_seed(seed, label));
    rng.shuffle(stratum);
    const auto n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(stratum.size()) * test_fraction));
    for (std::size_t i = 0; i < stratum.size(); ++i) {
      auto& r = stratum[i];
      r.split = i < n_test ? Split::kTest : Split::kTrain;
      (i < n_test ? out.test : out.train).push_back(std::move(r));
    }
  }
  return out;
}

void write_split(std::ostream& out, const TrainTestSplit& split) {
  auto write = [&out](const LabeledText& r) {
    out << r.id << '\t';
    for (std::size_t i = 0; i < kNumEmotions; ++i) out << (i ? "," : "") << r.votes[i];
    out << '\t' << r.body << '\t' << (r.split == Split::kTest ? "test" : "train") << '\n';
  };
  for (const auto& r : split.train) write(r);
  for (const auto& r : split.test) write(r);
}

Vocabulary build_vocab(const std::vector<LabeledText>& records, FeatureView view,
                       const Tokenizer& tokenizer, const SynonymLexicon* lexicon) {
  if (view == FeatureView::kImplicit && lexicon == nullptr) {
    throw ConfigError("implicit view requires a synonym lexicon");
  }
  std::set<std::string> distinct;
  for (const auto& r : records) {
    for (auto& t : extract_view_tokens(r.body, view, tokenizer, lexicon)) {
      distinct.insert(std::move(t));
    }
  }
  Vocabulary vocab(view);
  for (const auto& t : distinct) vocab.add(t);
  return vocab;
}

}  // namespace emocorr
