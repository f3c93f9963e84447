#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "emocorr/corpus.hpp"
#include "emocorr/errors.hpp"
#include "emocorr/features.hpp"
#include "emocorr/synthetic.hpp"

using namespace emocorr;
using Words = std::vector<std::string>;

namespace {

SynonymLexicon lexicon_from(const std::string& text) {
  std::istringstream in(text);
  return parse_synonym_lexicon(in);
}

std::vector<LabeledText> texts(const Words& bodies) {
  std::vector<LabeledText> out;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    LabeledText t;
    t.id = std::to_string(i);
    t.body = bodies[i];
    out.push_back(t);
  }
  return out;
}

}  // namespace

TEST(Tokenize, CharacterView) {
  EXPECT_EQ(tokenize("love", FeatureView::kCharacter, whitespace_tokenizer()),
            (Words{"l", "o", "v", "e"}));
  EXPECT_EQ(tokenize("a b\tc", FeatureView::kCharacter, whitespace_tokenizer()),
            (Words{"a", "b", "c"}));
  EXPECT_TRUE(tokenize("", FeatureView::kCharacter, whitespace_tokenizer()).empty());
}

TEST(Tokenize, MultiByteGlyphsStayWhole) {
  EXPECT_EQ(split_glyphs("\xe7\x88\xb1 \xe4\xbd\xa0"), (Words{"\xe7\x88\xb1", "\xe4\xbd\xa0"}));
}

TEST(Tokenize, ExplicitView) {
  EXPECT_EQ(tokenize("I like cats", FeatureView::kExplicit, whitespace_tokenizer()),
            (Words{"I", "like", "cats"}));
  EXPECT_TRUE(tokenize("", FeatureView::kExplicit, whitespace_tokenizer()).empty());
}

TEST(Tokenize, ImplicitNeedsLexicon) {
  EXPECT_THROW(tokenize("x", FeatureView::kImplicit, whitespace_tokenizer()), ConfigError);
  EXPECT_THROW(extract_view_tokens("x", FeatureView::kImplicit, whitespace_tokenizer(), nullptr),
               ConfigError);
}

TEST(Tokenize, CustomTokenizerIsUsed) {
  Tokenizer comma = [](std::string_view s) {
    Words out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };
  EXPECT_EQ(tokenize("a b,c", FeatureView::kExplicit, comma), (Words{"a b", "c"}));
}

TEST(Lexicon, SynonymsShareTag) {
  const auto lex = lexicon_from("T1\tlove like\n");
  EXPECT_EQ(apply_synonym_map({"love", "like"}, lex), (Words{"T1", "T1"}));
  EXPECT_TRUE(apply_synonym_map({}, lex).empty());
  EXPECT_EQ(lex.word_count(), 2u);
  EXPECT_EQ(lex.tag_count(), 1u);
}

TEST(Lexicon, UnknownWordsStandForThemselves) {
  const auto lex = lexicon_from("T1\tlove like\n");
  EXPECT_EQ(apply_synonym_map({"love", "cat"}, lex), (Words{"T1", "cat"}));
}

TEST(Lexicon, EmptyFileIsIdentity) {
  const auto lex = lexicon_from("");
  EXPECT_EQ(lex.word_count(), 0u);
  EXPECT_EQ(apply_synonym_map({"a", "b"}, lex), (Words{"a", "b"}));
}

TEST(Lexicon, SecondGroupWins) {
  const auto lex = lexicon_from("T1\tlove like\nT2\tlike enjoy\n");
  EXPECT_EQ(lex.tag_of("like"), "T2");
  EXPECT_EQ(lex.duplicate_words(), 1u);
}

TEST(Lexicon, MalformedLineNamed) {
  try {
    lexicon_from("T1\ta b\nnotab\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Lexicon, MappingNeverIncreasesDistinctTokens) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::ostringstream lex_text;
    for (int g = 0; g < 5; ++g) {
      lex_text << "G" << g << '\t';
      for (int w = 0; w < 3; ++w) lex_text << "w" << gen() % 20 << ' ';
      lex_text << '\n';
    }
    const auto lex = lexicon_from(lex_text.str());
    Words words;
    for (int i = 0; i < 30; ++i) words.push_back("w" + std::to_string(gen() % 25));
    const auto mapped = apply_synonym_map(words, lex);
    EXPECT_LE(std::set<std::string>(mapped.begin(), mapped.end()).size(),
              std::set<std::string>(words.begin(), words.end()).size());
  }
}

TEST(Vocab, CharacterToyCorpus) {
  const auto v = build_vocab(texts({"ab", "ba"}), FeatureView::kCharacter, whitespace_tokenizer(), nullptr);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.tokens(), (Words{"none", "a", "b"}));
}

TEST(Vocab, ImplicitToyCorpus) {
  const auto lex = lexicon_from("T1\tlove like\n");
  const auto v = build_vocab(texts({"love like"}), FeatureView::kImplicit, whitespace_tokenizer(), &lex);
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(v.find("T1"), 1);
}

TEST(Vocab, IdsAreABijection) {
  const auto corpus = generate_synthetic_corpus({});
  std::vector<LabeledText> recs;
  for (const auto& r : corpus.records) recs.push_back({r.id, r.body, Emotion::kLove, Split::kTrain, r.votes});
  for (auto view : {FeatureView::kCharacter, FeatureView::kExplicit}) {
    const auto v = build_vocab(recs, view, whitespace_tokenizer(), nullptr);
    EXPECT_EQ(v.token(Vocabulary::kPadId), Vocabulary::kPadToken);
    for (std::size_t id = 0; id < v.size(); ++id) {
      EXPECT_EQ(v.find(v.token(static_cast<TokenId>(id))), static_cast<TokenId>(id));
    }
  }
}

TEST(Vocab, ViewSizesAreOrdered) {
  for (std::uint64_t seed : {1, 2, 3}) {
    SyntheticOptions o;
    o.seed = seed;
    const auto corpus = generate_synthetic_corpus(o);
    std::ostringstream lex_text;
    write_lexicon(lex_text, corpus);
    const auto lex = lexicon_from(lex_text.str());
    std::vector<LabeledText> recs;
    for (const auto& r : corpus.records) recs.push_back({r.id, r.body, Emotion::kLove, Split::kTrain, r.votes});
    const auto tok = whitespace_tokenizer();
    const auto vc = build_vocab(recs, FeatureView::kCharacter, tok, &lex).size();
    const auto vi = build_vocab(recs, FeatureView::kImplicit, tok, &lex).size();
    const auto ve = build_vocab(recs, FeatureView::kExplicit, tok, &lex).size();
    EXPECT_LE(vc, vi);
    EXPECT_LE(vi, ve);
  }
}

TEST(PadAndMask, PadsWithNone) {
  Vocabulary v(FeatureView::kExplicit);
  for (const char* w : {"I", "cat", "like", "small"}) v.add(w);
  const auto seq = pad_and_mask({"I", "like", "small", "cat"}, v, 5);
  EXPECT_EQ(seq.tokens, (std::vector<TokenId>{*v.find("I"), *v.find("like"), *v.find("small"),
                                              *v.find("cat"), 0}));
  EXPECT_EQ(seq.mask, (std::vector<std::uint8_t>{1, 1, 1, 1, 0}));
  EXPECT_EQ(decode(seq, v), (Words{"I", "like", "small", "cat", "none"}));
}

TEST(PadAndMask, ExactAndTruncated) {
  Vocabulary v(FeatureView::kExplicit);
  for (const char* w : {"a", "b", "c", "d", "e", "f", "g"}) v.add(w);
  const auto exact = pad_and_mask({"a", "b", "c", "d", "e"}, v, 5);
  EXPECT_EQ(exact.mask, std::vector<std::uint8_t>(5, 1));
  const auto cut = pad_and_mask({"a", "b", "c", "d", "e", "f", "g"}, v, 5);
  EXPECT_EQ(decode(cut, v), (Words{"a", "b", "c", "d", "e"}));
  EXPECT_EQ(cut.mask, std::vector<std::uint8_t>(5, 1));
}

TEST(PadAndMask, OutOfVocabularyBecomesNone) {
  Vocabulary v(FeatureView::kExplicit);
  v.add("a");
  const auto seq = pad_and_mask({"a", "zzz"}, v, 3);
  EXPECT_EQ(seq.tokens, (std::vector<TokenId>{1, 0, 0}));
  EXPECT_EQ(seq.mask, (std::vector<std::uint8_t>{1, 0, 0}));
}

TEST(PadAndMask, LengthInvariant) {
  Vocabulary v(FeatureView::kExplicit);
  v.add("a");
  for (std::size_t n = 1; n < 10; ++n) {
    for (std::size_t k = 0; k < 12; ++k) {
      const auto seq = pad_and_mask(Words(k, "a"), v, n);
      EXPECT_EQ(seq.tokens.size(), n);
      EXPECT_EQ(seq.mask.size(), n);
    }
  }
  EXPECT_THROW(pad_and_mask({"a"}, v, 0), ConfigError);
}
