// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "ghost/error.hpp"
#include "ghost/report.hpp"
#include "ghost/text.hpp"
#include "ghost/trie.hpp"
#include "synth.hpp"

namespace ghost::eval {
namespace {

Suggestion Shown(const std::string& text, double score = 1.0) { return MakeSuggestion(text, score, Source::kMpc); }

UtteranceTrace Trace(const std::string& utterance, const std::vector<std::string>& outputs, bool seen = false) {
  UtteranceTrace t;
  t.utterance = utterance;
  t.seen = seen;
  for (const auto& o : outputs) t.positions.push_back({o, 1.0});
  return t;
}

TEST(ScoreSampleTest, Examples) {
  auto r = ScoreSample(Shown("abc"), "abc");
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.lcp_len, 3u);
  r = ScoreSample(Shown("abx"), "abc");
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.lcp_len, 2u);
  r = ScoreSample(Suggestion{}, "abc");
  EXPECT_FALSE(r.shown);
  EXPECT_FALSE(r.exact);
  r = ScoreSample(Shown("\xC3\xA9t\xC3\xA9"), "\xC3\xA9t");
  EXPECT_EQ(r.pred_len, 3u);
  EXPECT_EQ(r.lcp_len, 2u);
}

TEST(AggregateTest, AllExact) {
  std::vector<SampleResult> rs{ScoreSample(Shown("ab"), "ab"), ScoreSample(Shown("c"), "c")};
  const auto row = Aggregate(rs, 2);
  EXPECT_EQ(*row.mr, 1.0);
  EXPECT_EQ(*row.p_prec, 1.0);
  EXPECT_EQ(*row.p_rec, 1.0);
  EXPECT_EQ(*row.tr, 1.0);
}

TEST(AggregateTest, NothingShownIsUndefined) {
  std::vector<SampleResult> rs{ScoreSample(Suggestion{}, "ab")};
  const auto row = Aggregate(rs, 1);
  EXPECT_FALSE(row.mr.has_value());
  EXPECT_FALSE(row.p_prec.has_value());
  EXPECT_FALSE(row.pred_len.has_value());
  EXPECT_EQ(*row.tr, 0.0);
  EXPECT_THROW(Aggregate(rs, 0), Error);
  const auto j = RowToJson(row);
  EXPECT_TRUE(j["MR"].is_null());
  EXPECT_TRUE(j["P-Prec"].is_null());
  EXPECT_EQ(j["TR"], 0.0);
}

TEST(AggregateTest, MatchesSinglePassOracleAndIgnoresOrder) {
  std::mt19937_64 rng(2);
  std::vector<SampleResult> rs;
  for (int i = 0; i < 200; ++i) {
    SampleResult r;
    r.truth_len = 1 + rng() % 20;
    r.shown = rng() % 5 != 0;
    if (r.shown) {
      r.pred_len = 1 + rng() % 20;
      r.lcp_len = rng() % (std::min(r.pred_len, r.truth_len) + 1);
      r.exact = r.lcp_len == r.pred_len && r.pred_len == r.truth_len;
    }
    rs.push_back(r);
  }
  double shown = 0, exact = 0, prec = 0, rec = 0, lcp = 0, pred = 0;
  for (const auto& r : rs) {
    if (!r.shown) continue;
    shown += 1;
    exact += r.exact;
    prec += double(r.lcp_len) / double(r.pred_len);
    rec += double(r.lcp_len) / double(r.truth_len);
    lcp += double(r.lcp_len);
    pred += double(r.pred_len);
  }
  const auto row = Aggregate(rs, 250);
  EXPECT_NEAR(*row.mr, exact / shown, 1e-12);
  EXPECT_NEAR(*row.p_prec, prec / shown, 1e-12);
  EXPECT_NEAR(*row.p_rec, rec / shown, 1e-12);
  EXPECT_NEAR(*row.matched_len, lcp / shown, 1e-12);
  EXPECT_NEAR(*row.pred_len, pred / shown, 1e-12);
  EXPECT_NEAR(*row.tr, shown / 250.0, 1e-12);
  std::shuffle(rs.begin(), rs.end(), rng);
  const auto again = Aggregate(rs, 250);
  EXPECT_NEAR(*again.p_prec, *row.p_prec, 1e-12);
  EXPECT_EQ(again.exact, row.exact);
}

TEST(TesTest, WhoAmI) {
  const std::map<std::string, std::string> script{{"w", "ho"}, {"who", "x"}, {"who ", "is"}, {"who a", "m I?"}};
  const auto out = SimulateTes(
      [&](std::string_view p) {
        const auto it = script.find(std::string(p));
        return it == script.end() ? Suggestion{} : Shown(it->second);
      },
      "who am I?");
  EXPECT_EQ(out.typed, 3u);
  EXPECT_EQ(out.length, 9u);
  EXPECT_DOUBLE_EQ(out.value(), 1.0 - 3.0 / 9.0);
}

TEST(TesTest, AlwaysAbstainingSavesNothing) {
  const auto out = SimulateTes([](std::string_view) { return Suggestion{}; }, "hello");
  EXPECT_EQ(out.typed, 5u);
  EXPECT_EQ(out.value(), 0.0);
}

TEST(TesTest, FailuresCountAsNoSuggestion) {
  const auto out = SimulateTes(
      [](std::string_view) -> Suggestion { throw std::runtime_error("boom"); }, "abc");
  EXPECT_EQ(out.typed, 3u);
}

TEST(TesTest, AcceptanceIsAllOrNothing) {
  // "bcx" shares two characters with the remainder but is rejected whole.
  const auto out = SimulateTes([](std::string_view p) { return p == "a" ? Shown("bcx") : Suggestion{}; }, "abcd");
  EXPECT_EQ(out.typed, 4u);
}

TEST(TesTest, MrAndTesCanDisagree) {
  const auto a = Trace("abcde", {"x", "cde", "x", "x"});
  const auto b = Trace("abcde", {"x", "x", "de", "e"});
  const auto row_a = Aggregate(Results(a), 4);
  const auto row_b = Aggregate(Results(b), 4);
  EXPECT_EQ(row_a.exact, 1u);
  EXPECT_EQ(row_b.exact, 2u);
  EXPECT_EQ(Tes(a).typed, 2u);
  EXPECT_EQ(Tes(b).typed, 3u);
  EXPECT_EQ(Tes(a).length, 5u);
}

TEST(TruncateTest, Examples) {
  EXPECT_EQ(TruncateWords("e you later", 1), "e");
  EXPECT_EQ(TruncateWords(" you later", 1), " you");
  EXPECT_EQ(TruncateWords("e you later", 2), "e you");
  EXPECT_EQ(TruncateWords("e you later", 3), "e you later");
  EXPECT_EQ(TruncateWords("e you later", 10), "e you later");
  EXPECT_EQ(TruncateWords("ng to make", 2), "ng to");
}

TEST(TruncateTest, SweepTrends) {
  const auto corpus = testing::SynthUtterances(400, 71);
  const auto trie = trie::CharTrie::Build(corpus);
  std::vector<UtteranceTrace> traces;
  for (const auto& u : testing::SynthUtterances(80, 72)) {
    UtteranceTrace t;
    t.utterance = u;
    const auto chars = text::Decode(u);
    for (std::size_t n = 1; n < chars.size(); ++n) {
      const auto s = trie::MpcSuggest(trie, text::Encode(chars.substr(0, n)));
      t.positions.push_back({s.text, s.score});
    }
    traces.push_back(std::move(t));
  }
  double prev_prec = 2, prev_rec = -1;
  for (std::size_t t = 1; t <= 10; ++t) {
    Gate g;
    g.truncate_words = t;
    const auto row = Evaluate(traces, g).full;
    EXPECT_LE(*row.p_prec, prev_prec + 1e-12) << t;
    EXPECT_GE(*row.p_rec, prev_rec - 1e-12) << t;
    prev_prec = *row.p_prec;
    prev_rec = *row.p_rec;
  }
}

TEST(SweepTest, ThresholdSemantics) {
  std::vector<UtteranceTrace> traces{Trace("hello", {"ello", "x", "lo", "o"}), Trace("hey", {"ey", "y"})};
  traces[0].positions[1].confidence = 0.2;
  traces[0].positions[2].confidence = 0.5;
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> grid{-inf, 0.3, 0.6, 2.0};
  const auto curve = SweepThresholds(traces, grid);
  const auto max_tr = Evaluate(traces).full;
  EXPECT_EQ(*curve[0].row.tr, *max_tr.tr);
  EXPECT_EQ(*curve[0].row.mr, *max_tr.mr);
  EXPECT_EQ(*curve[0].row.tes, *max_tr.tes);
  EXPECT_EQ(*curve[3].row.tr, 0.0);
  EXPECT_FALSE(curve[3].row.mr.has_value());
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_LE(*curve[i].row.tr, *curve[i - 1].row.tr);
    EXPECT_LE(*curve[i].row.tes, *curve[i - 1].row.tes);
  }
}

TEST(SweepTest, GridIsDecimated) {
  std::vector<UtteranceTrace> traces(1);
  traces[0].utterance = std::string(400, 'a');
  for (int i = 0; i < 399; ++i) traces[0].positions.push_back({"a", i * 0.01});
  const auto grid = ThresholdGrid(traces, 100);
  EXPECT_LE(grid.size(), 100u);
  EXPECT_TRUE(std::isinf(grid[0]));
  EXPECT_DOUBLE_EQ(grid[1], 0.0);
  EXPECT_DOUBLE_EQ(grid.back(), 3.98);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  traces[0].positions.resize(5);
  EXPECT_EQ(ThresholdGrid(traces, 100).size(), 6u);
}

TEST(EvaluateTest, AbstentionsOnlyLowerTriggerRate) {
  // One abstention among ten positions.
  std::vector<std::string> outs;
  const std::string u = "abcdefghijk";
  for (std::size_t i = 1; i < u.size(); ++i) outs.push_back(i == 4 ? "" : u.substr(i));
  const auto row = Evaluate(std::vector<UtteranceTrace>{Trace(u, outs)}).full;
  EXPECT_EQ(row.positions, 10u);
  EXPECT_EQ(row.shown, 9u);
  EXPECT_DOUBLE_EQ(*row.tr, 0.9);
  EXPECT_DOUBLE_EQ(*row.mr, 1.0);
}

TEST(EvaluateTest, SplitsAndBuckets) {
  const std::string long_u(30, 'z');
  std::vector<std::string> outs;
  for (std::size_t i = 1; i < long_u.size(); ++i) outs.push_back(long_u.substr(i));
  std::vector<UtteranceTrace> traces{Trace(long_u, outs, true), Trace("ab", {"x"}, false)};
  const auto rows = Evaluate(traces);
  EXPECT_EQ(*rows.seen.mr, 1.0);
  EXPECT_EQ(*rows.unseen.mr, 0.0);
  EXPECT_EQ(rows.full.positions, 30u);
  const auto buckets = EvaluateBuckets(traces);
  EXPECT_EQ(buckets.at(corpus::Bucket::k26To50).seen.positions, 4u);
  EXPECT_EQ(buckets.at(corpus::Bucket::k26To50).unseen.positions, 0u);
  EXPECT_EQ(buckets.at(corpus::Bucket::k1To5).full.positions, 6u);
  EXPECT_FALSE(buckets.at(corpus::Bucket::k1To5).full.tes.has_value());
}

TEST(LatencyTest, NearestRank) {
  std::vector<double> ms;
  for (int i = 1; i <= 100; ++i) ms.push_back(i);
  const auto s = Summarize(ms);
  EXPECT_EQ(s.p50, 50);
  EXPECT_EQ(s.p95, 95);
  EXPECT_EQ(s.p99, 99);
  EXPECT_DOUBLE_EQ(s.mean, 50.5);
  EXPECT_EQ(s.n, 100u);
}

TEST(LatencyTest, ConstantStub) {
  const std::vector<std::string> prefixes(200, "x");
  const auto s = BenchLatency([](std::string_view) { return Suggestion{}; }, prefixes, 10);
  EXPECT_EQ(s.n, 200u);
  EXPECT_LE(s.p50, s.p95);
  EXPECT_LE(s.p95, s.p99);
  EXPECT_LT(s.p99 - s.p50, 1.0);
  EXPECT_THROW(BenchLatency([](std::string_view) { return Suggestion{}; }, {}, 0), Error);
}

TEST(ReportTest, JsonShapeAndCsv) {
  std::vector<UtteranceTrace> traces{Trace("hello", {"ello", "", "lo", "o"}, true)};
  const auto report = BuildReport(traces, "mpc");
  const auto j = ReportToJson(report);
  EXPECT_EQ(j["model"], "mpc");
  EXPECT_DOUBLE_EQ(j["splits"]["full"]["TR"].get<double>(), 75.0);
  EXPECT_TRUE(j["splits"]["unseen"]["MR"].is_null());
  EXPECT_EQ(j["truncation"].size(), 10u);
  EXPECT_EQ(j["buckets"].size(), 4u);
  EXPECT_EQ(j["tr_curve"][0]["threshold"], "-inf");
  const auto csv = CurveCsv(report.tr_curve);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "threshold,TR,MR,P-Rec,P-Prec,TES");
}

}  // namespace
}  // namespace ghost::eval
