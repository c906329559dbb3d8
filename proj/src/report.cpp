// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "ghost/text.hpp"

namespace ghost::eval {

std::vector<UtteranceTrace> CollectTraces(const Engine& engine,
                                          const std::vector<corpus::ContextualUtterance>& utterances,
                                          const corpus::SeenFlags& seen, const SuggestRequest& base,
                                          std::size_t jobs) {
  std::vector<UtteranceTrace> traces(utterances.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&] {
    SuggestRequest req = base;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= utterances.size()) return;
      const auto& u = utterances[i];
      auto& t = traces[i];
      t.utterance_id = u.utterance_id;
      t.utterance = u.utterance;
      auto it = seen.find(u.utterance_id);
      t.seen = it != seen.end() && it->second;
      const std::u32string chars = text::Decode(u.utterance);
      req.context = u.context;
      try {
        for (std::size_t n = 1; n < chars.size(); ++n) {
          req.prefix = text::Encode(std::u32string_view(chars).substr(0, n));
          const Suggestion s = engine.Suggest(req).suggestion;
          t.positions.push_back({s.shown() ? s.text : std::string(), s.score});
        }
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(utterances.size());
        return;
      }
    }
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, utterances.size()));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return traces;
}

EvalReport BuildReport(const std::vector<UtteranceTrace>& traces, const std::string& model,
                       const ReportOptions& options) {
  EvalReport r;
  r.model = model;
  r.splits = Evaluate(traces);
  if (options.buckets) r.buckets = EvaluateBuckets(traces);
  if (options.truncate) {
    for (std::size_t t = 1; t <= 10; ++t) {
      Gate g;
      g.truncate_words = t;
      r.truncation.emplace_back(t, Evaluate(traces, g).full);
    }
  }
  if (options.thresholds) {
    const auto grid = ThresholdGrid(traces, options.max_curve_points);
    r.tr_curve = SweepThresholds(traces, grid);
  }
  return r;
}

namespace {

nlohmann::json Pct(const std::optional<double>& v) {
  return v ? nlohmann::json(*v * 100.0) : nlohmann::json(nullptr);
}
nlohmann::json Num(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
nlohmann::json Threshold(double t) {
  return std::isfinite(t) ? nlohmann::json(t) : nlohmann::json("-inf");
}

nlohmann::json Splits(const SplitRows& rows) {
  return {{"seen", RowToJson(rows.seen)}, {"unseen", RowToJson(rows.unseen)}, {"full", RowToJson(rows.full)}};
}

std::string CsvCell(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os << std::setprecision(10) << *v * 100.0;
  return os.str();
}

}  // namespace

nlohmann::json RowToJson(const MetricRow& row) {
  return {{"MR", Pct(row.mr)},
          {"P-Rec", Pct(row.p_rec)},
          {"P-Prec", Pct(row.p_prec)},
          {"TES", Pct(row.tes)},
          {"TR", Pct(row.tr)},
          {"pred_len", Num(row.pred_len)},
          {"matched_len", Num(row.matched_len)},
          {"shown", row.shown},
          {"positions", row.positions},
          {"utterances", row.utterances}};
}

nlohmann::json ReportToJson(const EvalReport& report) {
  nlohmann::json j;
  j["model"] = report.model;
  j["splits"] = Splits(report.splits);
  nlohmann::json buckets = nlohmann::json::object();
  for (const auto& [b, rows] : report.buckets) buckets[std::string(corpus::BucketName(b))] = Splits(rows);
  j["buckets"] = buckets;
  nlohmann::json trunc = nlohmann::json::array();
  for (const auto& [t, row] : report.truncation) {
    auto e = RowToJson(row);
    e["t"] = t;
    trunc.push_back(e);
  }
  j["truncation"] = trunc;
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : report.tr_curve) {
    curve.push_back({{"threshold", Threshold(p.threshold)},
                     {"TR", Pct(p.row.tr)},
                     {"MR", Pct(p.row.mr)},
                     {"P-Rec", Pct(p.row.p_rec)},
                     {"P-Prec", Pct(p.row.p_prec)},
                     {"TES", Pct(p.row.tes)}});
  }
  j["tr_curve"] = curve;
  return j;
}

std::string CurveCsv(const std::vector<CurvePoint>& curve) {
  std::ostringstream os;
  os << "threshold,TR,MR,P-Rec,P-Prec,TES\n";
  for (const auto& p : curve) {
    if (std::isfinite(p.threshold)) {
      os << std::setprecision(10) << p.threshold;
    } else {
      os << "-inf";
    }
    os << ',' << CsvCell(p.row.tr) << ',' << CsvCell(p.row.mr) << ',' << CsvCell(p.row.p_rec) << ','
       << CsvCell(p.row.p_prec) << ',' << CsvCell(p.row.tes) << '\n';
  }
  return os.str();
}

}  // namespace ghost::eval
