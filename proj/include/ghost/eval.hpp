// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ghost/corpus.hpp"
#include "ghost/suggestion.hpp"

namespace ghost::eval {

struct SampleResult {
  bool shown = false;
  bool exact = false;
  std::size_t lcp_len = 0;
  std::size_t pred_len = 0;
  std::size_t truth_len = 0;
  double confidence = 0.0;
  corpus::Bucket bucket = corpus::Bucket::k1To5;
  bool seen = false;
};

SampleResult ScoreSample(const Suggestion& suggestion, std::string_view truth);

// Micro-averaged metrics over shown suggestions. Rates are fractions in
// [0, 1]; nullopt when nothing was shown (or, for TES, nothing simulated).
struct MetricRow {
  std::size_t positions = 0;
  std::size_t shown = 0;
  std::size_t exact = 0;
  std::optional<double> mr, p_rec, p_prec, tr, pred_len, matched_len, tes;
  std::size_t utterances = 0;
};

MetricRow Aggregate(std::span<const SampleResult> results, std::size_t total_positions);

// Typed characters over utterance length under the greedy accept-if-exact
// user: the first character is always typed; afterwards a non-empty
// suggestion that equals the next characters is accepted whole, otherwise one
// character is typed.
struct TesOutcome {
  std::size_t typed = 0;
  std::size_t length = 0;
  double value() const { return length == 0 ? 0.0 : 1.0 - static_cast<double>(typed) / static_cast<double>(length); }
};

using SuggestFn = std::function<Suggestion(std::string_view prefix)>;
TesOutcome SimulateTes(const SuggestFn& suggest, std::string_view utterance);

// Keeps text through the end of its t-th whitespace-delimited word; a
// suggestion starting mid-word contributes that fragment as word 1.
std::string TruncateWords(std::string_view suggestion, std::size_t t);

// Suggestions at every prefix position of one utterance, cached so that
// threshold and truncation sweeps can replay the user simulation.
struct PositionOutcome {
  std::string text;  // empty = abstained
  double confidence = 0.0;
};

struct UtteranceTrace {
  std::string utterance_id;
  std::string utterance;
  bool seen = false;
  std::vector<PositionOutcome> positions;  // [i] answers the prefix of i + 1 characters
};

struct Gate {
  double threshold = -std::numeric_limits<double>::infinity();
  std::size_t truncate_words = 0;  // 0 = no truncation
};

std::vector<SampleResult> Results(const UtteranceTrace& trace, const Gate& gate = {});
TesOutcome Tes(const UtteranceTrace& trace, const Gate& gate = {});

// Rows for one gate over a set of traces.
struct SplitRows {
  MetricRow seen, unseen, full;
};
SplitRows Evaluate(std::span<const UtteranceTrace> traces, const Gate& gate = {});
// Per-bucket rows (TES is utterance-level and left undefined here).
std::map<corpus::Bucket, SplitRows> EvaluateBuckets(std::span<const UtteranceTrace> traces, const Gate& gate = {});

struct CurvePoint {
  double threshold = 0.0;
  MetricRow row;
};

// Re-aggregates the full split counting only suggestions with confidence >=
// each threshold; TES is replayed under the same gate.
std::vector<CurvePoint> SweepThresholds(std::span<const UtteranceTrace> traces, std::span<const double> thresholds);
// -infinity followed by the sorted distinct confidences, decimated to at most
// max_points entries in total.
std::vector<double> ThresholdGrid(std::span<const UtteranceTrace> traces, std::size_t max_points = 100);

struct LatencyStats {
  double p50 = 0, p95 = 0, p99 = 0, mean = 0;  // milliseconds
  std::size_t n = 0;
};

// Single-threaded, one call per sample, after `warmup` untimed calls.
LatencyStats BenchLatency(const SuggestFn& suggest, std::span<const std::string> prefixes, std::size_t warmup);
LatencyStats Summarize(std::vector<double> millis);

}  // namespace ghost::eval
