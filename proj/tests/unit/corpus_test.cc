// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/corpus.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ghost/error.hpp"
#include "synth.hpp"

namespace ghost::corpus {
namespace {

std::vector<Dialog> Parse(const std::string& s, LoadOptions o = {}) {
  std::istringstream in(s);
  return ParseCorpus(in, o, "mem");
}

TEST(CorpusTest, TwoDialogJsonl) {
  const auto dialogs = Parse(
      R"({"dialog_id":"a","turns":[{"speaker":"human","text":"hi"},{"speaker":"bot","text":"hello"}]})"
      "\n"
      R"({"dialog_id":"b","turns":[{"speaker":"human","text":"one"},{"speaker":"bot","text":"two"},{"speaker":"human","text":"three"}]})"
      "\n");
  ASSERT_EQ(dialogs.size(), 2u);
  EXPECT_EQ(dialogs[0].turns.size(), 2u);
  EXPECT_EQ(dialogs[1].turns.size(), 3u);
  EXPECT_EQ(dialogs[1].turns[2].text, "three");
  EXPECT_EQ(dialogs[1].turns[1].speaker, Speaker::kBot);
}

TEST(CorpusTest, MalformedLineIsNamed) {
  std::string s;
  for (int i = 1; i <= 6; ++i) {
    s += R"({"dialog_id":"d)" + std::to_string(i) + R"(","turns":[{"speaker":"human","text":"x"}]})" "\n";
  }
  s += "{not json\n";
  try {
    Parse(s);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":7:"), std::string::npos) << e.what();
  }
}

TEST(CorpusTest, SchemaViolationsAreErrors) {
  EXPECT_THROW(Parse(R"({"dialog_id":"a"})" "\n"), Error);
  EXPECT_THROW(Parse(R"({"dialog_id":"a","turns":[{"speaker":"alien","text":"x"}]})" "\n"), Error);
  EXPECT_THROW(Parse(R"({"dialog_id":"a","turns":[{"speaker":"human","text":5}]})" "\n"), Error);
}

TEST(CorpusTest, EmptyInputIsError) {
  EXPECT_THROW(Parse(""), Error);
  EXPECT_THROW(Parse("\n\n"), Error);
  EXPECT_THROW(LoadCorpus("/nonexistent/corpus.jsonl"), Error);
}

TEST(CorpusTest, LowercaseOption) {
  LoadOptions o;
  o.lowercase = true;
  const auto d = Parse(R"({"dialog_id":"a","turns":[{"speaker":"human","text":"How ARE you"}]})" "\n", o);
  EXPECT_EQ(d[0].turns[0].text, "how are you");
}

TEST(CorpusTest, LinesFormat) {
  LoadOptions o;
  o.format = Format::kLines;
  const auto d = Parse("hello there\nhow are you\n", o);
  std::size_t humans = HumanUtterances(d).size();
  EXPECT_EQ(humans, 2u);
}

TEST(CorpusTest, LoadFromFile) {
  const auto dir = testing::TempDir("corpus");
  testing::SynthOptions so;
  so.dialogs = 12;
  const auto dialogs = testing::SynthDialogs(so);
  testing::WriteJsonl(dialogs, dir / "c.jsonl");
  const auto loaded = LoadCorpus(dir / "c.jsonl");
  ASSERT_EQ(loaded.size(), dialogs.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) EXPECT_EQ(loaded[i].turns.size(), dialogs[i].turns.size());
}

TEST(CorpusTest, HumanUtterancesCarryPriorTurns) {
  const auto d = Parse(
      R"({"dialog_id":"a","turns":[{"speaker":"human","text":"h1"},{"speaker":"bot","text":"b1"},{"speaker":"human","text":"h2"}]})"
      "\n");
  const auto u = HumanUtterances(d);
  ASSERT_EQ(u.size(), 2u);
  EXPECT_TRUE(u[0].context.empty());
  EXPECT_EQ(u[1].utterance, "h2");
  EXPECT_EQ(u[1].context, (std::vector<std::string>{"h1", "b1"}));
  EXPECT_NE(u[0].utterance_id, u[1].utterance_id);
}

TEST(CorpusTest, PrefixSplits) {
  const auto s = ExpandPrefixSplits("hi!", {});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].prefix, "h");
  EXPECT_EQ(s[0].target_completion, "i!");
  EXPECT_EQ(s[1].prefix, "hi");
  EXPECT_EQ(s[1].target_completion, "!");
  EXPECT_EQ(s[1].prefix_len_chars, 2u);
  EXPECT_EQ(ExpandPrefixSplits("who am I?", {}).size(), 8u);
  EXPECT_TRUE(ExpandPrefixSplits("a", {}).empty());
  EXPECT_TRUE(ExpandPrefixSplits("", {}).empty());
}

TEST(CorpusTest, PrefixSplitsAreCharacterBased) {
  const auto s = ExpandPrefixSplits("\xC3\xA9t\xC3\xA9", {});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].prefix, "\xC3\xA9");
  EXPECT_EQ(s[0].target_completion, "t\xC3\xA9");
}

TEST(CorpusTest, MarkSeen) {
  const auto hello = ExpandPrefixSplits("hello", {}, "t#0");
  const auto bang = ExpandPrefixSplits("hello!", {}, "t#1");
  std::vector<PrefixSample> test = hello;
  test.insert(test.end(), bang.begin(), bang.end());
  const auto flags = MarkSeen({"hello"}, test);
  EXPECT_TRUE(flags.at("t#0"));
  EXPECT_FALSE(flags.at("t#1"));
  const auto folded = MarkSeen({"HELLO"}, hello, /*lowercase=*/true);
  EXPECT_TRUE(folded.at("t#0"));
  EXPECT_FALSE(MarkSeen({"HELLO"}, hello).at("t#0"));
}

TEST(CorpusTest, Buckets) {
  EXPECT_EQ(BucketOf(1), Bucket::k1To5);
  EXPECT_EQ(BucketOf(5), Bucket::k1To5);
  EXPECT_EQ(BucketOf(6), Bucket::k6To12);
  EXPECT_EQ(BucketOf(12), Bucket::k6To12);
  EXPECT_EQ(BucketOf(13), Bucket::k13To25);
  EXPECT_EQ(BucketOf(25), Bucket::k13To25);
  EXPECT_EQ(BucketOf(26), Bucket::k26To50);
  EXPECT_EQ(BucketOf(50), Bucket::k26To50);
  EXPECT_EQ(BucketOf(51), Bucket::kOut);
  EXPECT_EQ(BucketName(Bucket::k13To25), "13-25");
}

TEST(CorpusTest, SplitMarksSeenUtterances) {
  const auto train = Parse(
      R"({"dialog_id":"a","turns":[{"speaker":"human","text":"good morning ."},{"speaker":"bot","text":"hi"}]})" "\n");
  const auto test = Parse(
      R"({"dialog_id":"b","turns":[{"speaker":"human","text":"good morning ."},{"speaker":"bot","text":"x"},{"speaker":"human","text":"bye ."}]})"
      "\n");
  const auto split = MakeSplit(train, test);
  EXPECT_EQ(split.train_utterances.size(), 1u);
  EXPECT_EQ(split.test_samples.size(), 13u + 4u);
  std::size_t seen = 0;
  for (const auto& [id, flag] : split.seen_flags) seen += flag;
  EXPECT_EQ(seen, 1u);
}

}  // namespace
}  // namespace ghost::corpus
