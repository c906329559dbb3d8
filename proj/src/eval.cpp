// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "ghost/error.hpp"
#include "ghost/text.hpp"

namespace ghost::eval {

SampleResult ScoreSample(const Suggestion& suggestion, std::string_view truth) {
  SampleResult r;
  const std::u32string pred = text::Decode(suggestion.text);
  const std::u32string gold = text::Decode(truth);
  r.shown = !pred.empty();
  r.exact = r.shown && pred == gold;
  r.lcp_len = text::CommonPrefixLength(pred, gold);
  r.pred_len = pred.size();
  r.truth_len = gold.size();
  r.confidence = suggestion.score;
  return r;
}

MetricRow Aggregate(std::span<const SampleResult> results, std::size_t total_positions) {
  if (total_positions < results.size()) throw Error("total positions smaller than the number of results");
  MetricRow row;
  row.positions = total_positions;
  double prec = 0, rec = 0, pred = 0, lcp = 0;
  for (const auto& r : results) {
    if (!r.shown) continue;
    ++row.shown;
    if (r.exact) ++row.exact;
    prec += static_cast<double>(r.lcp_len) / static_cast<double>(r.pred_len);
    rec += r.truth_len ? static_cast<double>(r.lcp_len) / static_cast<double>(r.truth_len) : 0.0;
    pred += static_cast<double>(r.pred_len);
    lcp += static_cast<double>(r.lcp_len);
  }
  if (total_positions > 0) row.tr = static_cast<double>(row.shown) / static_cast<double>(total_positions);
  if (row.shown > 0) {
    const double n = static_cast<double>(row.shown);
    row.mr = static_cast<double>(row.exact) / n;
    row.p_prec = prec / n;
    row.p_rec = rec / n;
    row.pred_len = pred / n;
    row.matched_len = lcp / n;
  }
  return row;
}

TesOutcome SimulateTes(const SuggestFn& suggest, std::string_view utterance) {
  const std::u32string chars = text::Decode(utterance);
  TesOutcome out;
  out.length = chars.size();
  if (chars.empty()) return out;
  std::size_t pos = 1;
  out.typed = 1;
  while (pos < chars.size()) {
    std::u32string s;
    try {
      s = text::Decode(suggest(text::Encode(std::u32string_view(chars).substr(0, pos))).text);
    } catch (const std::exception&) {
      s.clear();
    }
    if (!s.empty() && pos + s.size() <= chars.size() &&
        std::u32string_view(chars).substr(pos, s.size()) == s) {
      pos += s.size();
    } else {
      ++out.typed;
      ++pos;
    }
  }
  return out;
}

std::string TruncateWords(std::string_view suggestion, std::size_t t) {
  const std::u32string chars = text::Decode(suggestion);
  std::size_t words = 0;
  bool after_space = true;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const bool space = text::IsSpace(chars[i]);
    if (!space && after_space && ++words > t) {
      std::size_t end = i;
      while (end > 0 && text::IsSpace(chars[end - 1])) --end;
      return text::Encode(std::u32string_view(chars).substr(0, end));
    }
    after_space = space;
  }
  return std::string(suggestion);
}

namespace {

Suggestion Gated(const PositionOutcome& p, const Gate& gate) {
  if (p.text.empty() || p.confidence < gate.threshold) return {};
  Suggestion s;
  s.text = gate.truncate_words ? TruncateWords(p.text, gate.truncate_words) : p.text;
  s.score = p.confidence;
  return s;
}

}  // namespace

std::vector<SampleResult> Results(const UtteranceTrace& trace, const Gate& gate) {
  const std::u32string chars = text::Decode(trace.utterance);
  std::vector<SampleResult> out;
  for (std::size_t i = 0; i < trace.positions.size() && i + 1 < chars.size(); ++i) {
    auto r = ScoreSample(Gated(trace.positions[i], gate), text::Encode(std::u32string_view(chars).substr(i + 1)));
    r.confidence = trace.positions[i].confidence;
    r.bucket = corpus::BucketOf(i + 1);
    r.seen = trace.seen;
    out.push_back(r);
  }
  return out;
}

TesOutcome Tes(const UtteranceTrace& trace, const Gate& gate) {
  return SimulateTes(
      [&](std::string_view prefix) -> Suggestion {
        const std::size_t n = text::Length(prefix);
        if (n == 0 || n > trace.positions.size()) return {};
        return Gated(trace.positions[n - 1], gate);
      },
      trace.utterance);
}

namespace {

struct Accumulator {
  std::vector<SampleResult> results;
  double tes_sum = 0.0;
  std::size_t utterances = 0;

  MetricRow Row(bool with_tes) const {
    MetricRow row = Aggregate(results, results.size());
    row.utterances = utterances;
    if (with_tes && utterances > 0) row.tes = tes_sum / static_cast<double>(utterances);
    return row;
  }
};

}  // namespace

SplitRows Evaluate(std::span<const UtteranceTrace> traces, const Gate& gate) {
  Accumulator seen, unseen, full;
  for (const auto& t : traces) {
    const auto results = Results(t, gate);
    const double tes = Tes(t, gate).value();
    for (Accumulator* acc : {&full, t.seen ? &seen : &unseen}) {
      acc->results.insert(acc->results.end(), results.begin(), results.end());
      acc->tes_sum += tes;
      ++acc->utterances;
    }
  }
  return {seen.Row(true), unseen.Row(true), full.Row(true)};
}

std::map<corpus::Bucket, SplitRows> EvaluateBuckets(std::span<const UtteranceTrace> traces, const Gate& gate) {
  std::map<corpus::Bucket, Accumulator[3]> acc;
  for (corpus::Bucket b : corpus::kReportedBuckets) acc[b];
  for (const auto& t : traces) {
    for (const auto& r : Results(t, gate)) {
      auto it = acc.find(r.bucket);
      if (it == acc.end()) continue;
      it->second[0].results.push_back(r);
      it->second[r.seen ? 1 : 2].results.push_back(r);
    }
  }
  std::map<corpus::Bucket, SplitRows> out;
  for (auto& [b, a] : acc) out[b] = {a[1].Row(false), a[2].Row(false), a[0].Row(false)};
  return out;
}

std::vector<CurvePoint> SweepThresholds(std::span<const UtteranceTrace> traces, std::span<const double> thresholds) {
  std::vector<CurvePoint> out;
  for (double t : thresholds) {
    Gate g;
    g.threshold = t;
    out.push_back({t, Evaluate(traces, g).full});
  }
  return out;
}

std::vector<double> ThresholdGrid(std::span<const UtteranceTrace> traces, std::size_t max_points) {
  std::set<double> distinct;
  for (const auto& t : traces) {
    for (const auto& p : t.positions) {
      if (!p.text.empty()) distinct.insert(p.confidence);
    }
  }
  std::vector<double> values(distinct.begin(), distinct.end());
  std::vector<double> grid{-std::numeric_limits<double>::infinity()};
  if (max_points <= 1 || values.empty()) return grid;
  const std::size_t room = max_points - 1;
  if (values.size() <= room) {
    grid.insert(grid.end(), values.begin(), values.end());
    return grid;
  }
  if (room == 1) {
    grid.push_back(values.front());
    return grid;
  }
  for (std::size_t i = 0; i < room; ++i) {
    grid.push_back(values[(i * (values.size() - 1) + (room - 1) / 2) / (room - 1)]);
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

LatencyStats Summarize(std::vector<double> millis) {
  LatencyStats s;
  s.n = millis.size();
  if (millis.empty()) return s;
  std::sort(millis.begin(), millis.end());
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(millis.size())));
    return millis[std::clamp<std::size_t>(idx, 1, millis.size()) - 1];
  };
  s.p50 = rank(0.50);
  s.p95 = rank(0.95);
  s.p99 = rank(0.99);
  double sum = 0;
  for (double m : millis) sum += m;
  s.mean = sum / static_cast<double>(millis.size());
  return s;
}

LatencyStats BenchLatency(const SuggestFn& suggest, std::span<const std::string> prefixes, std::size_t warmup) {
  if (prefixes.empty()) throw Error("latency benchmark needs at least one sample");
  for (std::size_t i = 0; i < warmup; ++i) suggest(prefixes[i % prefixes.size()]);
  std::vector<double> millis;
  millis.reserve(prefixes.size());
  for (const auto& p : prefixes) {
    const auto start = std::chrono::steady_clock::now();
    const Suggestion s = suggest(p);
    const auto stop = std::chrono::steady_clock::now();
    (void)s;
    millis.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return Summarize(std::move(millis));
}

}  // namespace ghost::eval
