// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/vocabulary.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ghost/container.hpp"
#include "ghost/text.hpp"
#include "oracles.hpp"
#include "synth.hpp"

namespace ghost::ngram {
namespace {

std::vector<std::string> Surfaces(const SubwordVocabulary& v, const std::vector<TokenId>& ids) {
  std::vector<std::string> out;
  for (TokenId t : ids) out.push_back(text::Encode(v.surface(t)));
  return out;
}

TEST(VocabularyTest, PiecesCarryTrailingSpace) {
  const auto p = SplitPieces(U"how are you");
  EXPECT_EQ(p, (std::vector<std::u32string>{U"how ", U"are ", U"you"}));
  EXPECT_EQ(SplitPieces(U"  hi  there "), (std::vector<std::u32string>{U"  ", U"hi  ", U"there "}));
}

TEST(VocabularyTest, ForcedMerge) {
  const auto v = SubwordVocabulary::Learn(std::vector<std::string>(100, "aaaa"), 5);
  bool has_aa = false;
  for (TokenId t = kFirstRegular; t < v.size(); ++t) has_aa |= v.surface(t) == U"aa";
  EXPECT_TRUE(has_aa);
  EXPECT_EQ(v.surface(kFirstRegular), U"a");
  EXPECT_EQ(v.surface(kEos), U"");
}

TEST(VocabularyTest, TargetBelowAlphabetIsError) {
  EXPECT_THROW(SubwordVocabulary::Learn({"abc"}, 2), Error);
  EXPECT_THROW(SubwordVocabulary::Learn({}, 10), Error);
  EXPECT_THROW(SubwordVocabulary::Learn({""}, 10), Error);
}

TEST(VocabularyTest, TargetSizeIsRespected) {
  const auto corpus = testing::SynthUtterances(300, 2);
  const auto v = SubwordVocabulary::Learn(corpus, 60);
  EXPECT_LE(v.size() - kFirstRegular, 60u);
  EXPECT_EQ(v.size() - kFirstRegular, 60u);
}

TEST(VocabularyTest, MergesMatchNaiveGreedyOracle) {
  const auto corpus = testing::SynthUtterances(200, 17);
  const std::size_t target = 120;
  const auto v = SubwordVocabulary::Learn(corpus, target);

  // Oracle: recount every pair each round over space-attached pieces.
  std::vector<std::vector<std::u32string>> words;
  std::set<char32_t> alphabet;
  for (const auto& u : corpus) {
    const auto chars = text::Decode(u);
    alphabet.insert(chars.begin(), chars.end());
    for (const auto& piece : SplitPieces(chars)) {
      std::vector<std::u32string> w;
      for (char32_t c : piece) w.emplace_back(1, c);
      words.push_back(std::move(w));
    }
  }
  std::vector<std::pair<std::u32string, std::u32string>> expected;
  while (alphabet.size() + expected.size() < target) {
    const auto counts = testing::BrutePairCounts(words);
    std::pair<std::u32string, std::u32string> best;
    std::size_t best_count = 0;
    for (const auto& [pair, count] : counts) {  // map order = surfaces ascending
      if (count > best_count) {
        best = pair;
        best_count = count;
      }
    }
    if (best_count < 2) break;
    expected.push_back(best);
    for (auto& w : words) {
      std::vector<std::u32string> out;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (i + 1 < w.size() && w[i] == best.first && w[i + 1] == best.second) {
          out.push_back(w[i] + w[i + 1]);
          ++i;
        } else {
          out.push_back(w[i]);
        }
      }
      w = std::move(out);
    }
  }
  ASSERT_EQ(v.merges().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(v.surface(v.merges()[i].first), expected[i].first) << "merge " << i;
    EXPECT_EQ(v.surface(v.merges()[i].second), expected[i].second) << "merge " << i;
  }
}

TEST(VocabularyTest, LongestPrefixMatch) {
  const auto v = SubwordVocabulary::FromSurfaces({"a", "b", "ab"});
  EXPECT_EQ(Surfaces(v, v.Encode(std::string_view("aab"))), (std::vector<std::string>{"a", "ab"}));
  EXPECT_TRUE(v.Encode(std::string_view("")).empty());
  const auto greedy = SubwordVocabulary::FromSurfaces({"a", "b", "c", "ab", "abc", "bc"});
  EXPECT_EQ(Surfaces(greedy, greedy.Encode(std::string_view("ababcbc"))),
            (std::vector<std::string>{"ab", "abc", "bc"}));
}

TEST(VocabularyTest, UnknownCharacterNamesCharacterAndOffset) {
  const auto v = SubwordVocabulary::FromSurfaces({"a", "b"});
  try {
    v.Encode(std::string_view("abz"));
    FAIL();
  } catch (const EncodeError& e) {
    EXPECT_EQ(e.character(), U'z');
    EXPECT_EQ(e.offset(), 2u);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(VocabularyTest, FromSurfacesRequiresCharacters) {
  EXPECT_THROW(SubwordVocabulary::FromSurfaces({"ab"}), Error);
  EXPECT_THROW(SubwordVocabulary::FromSurfaces({"a", "a"}), Error);
}

TEST(VocabularyTest, RoundTripOnRandomStrings) {
  const auto v = SubwordVocabulary::FromSurfaces({"a", "b", "c", " ", "ab", "bc", "a b", "cc", "abc"});
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int i = 0; i < 200; ++i) {
    std::string s;
    for (int j = 0; j < 50; ++j) s += "abc "[pick(rng)];
    ASSERT_EQ(v.Decode(v.Encode(std::string_view(s))), s);
  }
}

TEST(VocabularyTest, EncodesEveryTrainingUtterance) {
  const auto corpus = testing::SynthUtterances(300, 8);
  const auto v = SubwordVocabulary::Learn(corpus, 200);
  for (const auto& u : corpus) ASSERT_EQ(v.Decode(v.Encode(std::string_view(u))), u);
}

TEST(VocabularyTest, SerializationRoundTrip) {
  const auto corpus = testing::SynthUtterances(100, 8);
  const auto v = SubwordVocabulary::Learn(corpus, 90);
  ContainerWriter w(ModelKind::kNGram, 0);
  v.Serialize(w);
  const auto v2 = SubwordVocabulary::Deserialize(ContainerReader::FromBytes(w.Bytes()));
  ASSERT_EQ(v2.size(), v.size());
  for (const auto& u : corpus) EXPECT_EQ(v2.Encode(std::string_view(u)), v.Encode(std::string_view(u)));
  EXPECT_EQ(v2.merges(), v.merges());
}

}  // namespace
}  // namespace ghost::ngram
