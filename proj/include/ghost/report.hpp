// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghost/corpus.hpp"
#include "ghost/engine.hpp"
#include "ghost/eval.hpp"

namespace ghost::eval {

// Queries `engine` at every split point of every utterance. Work is spread
// over `jobs` threads; output order follows input order regardless.
std::vector<UtteranceTrace> CollectTraces(const Engine& engine,
                                          const std::vector<corpus::ContextualUtterance>& utterances,
                                          const corpus::SeenFlags& seen, const SuggestRequest& base,
                                          std::size_t jobs = 1);

struct ReportOptions {
  bool buckets = true;
  bool truncate = true;
  bool thresholds = true;
  std::size_t max_curve_points = 100;
};

struct EvalReport {
  std::string model;
  SplitRows splits;
  std::map<corpus::Bucket, SplitRows> buckets;
  std::vector<std::pair<std::size_t, MetricRow>> truncation;  // t = 1..10, full split
  std::vector<CurvePoint> tr_curve;
};

EvalReport BuildReport(const std::vector<UtteranceTrace>& traces, const std::string& model,
                       const ReportOptions& options = {});

// Rates as percentages, undefined values as null.
nlohmann::json RowToJson(const MetricRow& row);
nlohmann::json ReportToJson(const EvalReport& report);
std::string CurveCsv(const std::vector<CurvePoint>& curve);

}  // namespace ghost::eval
