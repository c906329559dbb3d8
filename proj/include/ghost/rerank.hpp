// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ghost/container.hpp"
#include "ghost/suggestion.hpp"

namespace ghost::rerank {

// Lowercased maximal alphanumeric runs. ASCII letters and digits plus every
// non-ASCII, non-space scalar count as alphanumeric.
std::vector<std::string> Tokenize(std::string_view text);

using SparseVector = std::vector<std::pair<std::uint32_t, double>>;  // sorted by index

class TfIdfModel {
 public:
  // idf(t) = ln((1 + N) / (1 + df(t))) + 1
  static TfIdfModel Fit(const std::vector<std::string>& documents);

  // Raw term frequency times idf, L2-normalized. Unknown terms are ignored;
  // the result is empty when no known term occurs.
  SparseVector Transform(std::string_view text) const;
  // Cosine similarity, 0 when either side has no known terms.
  double Cosine(std::string_view a, std::string_view b) const;

  std::size_t vocabulary_size() const { return terms_.size(); }
  std::uint64_t fingerprint() const { return fingerprint_; }
  // Document frequency and idf; -1 / 0 for unknown terms.
  long DocumentFrequency(std::string_view term) const;
  double Idf(std::string_view term) const;

  void Serialize(ContainerWriter& out) const;
  static TfIdfModel Deserialize(const ContainerReader& in);

 private:
  void Index();

  std::vector<std::string> terms_;  // sorted
  std::vector<std::uint64_t> df_;
  std::vector<double> idf_;
  std::uint64_t documents_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

ContainerWriter ToContainer(const TfIdfModel& model, std::uint64_t fingerprint);

struct RerankConfig {
  double alpha = 0.5;
  double beta = 0.3;
  double gamma = 0.2;
  std::size_t k = 10;
};

double LengthPenalty(std::size_t completion_len_chars);

// Min-max map onto [-1, 1]; a constant list maps to all zeros.
std::vector<double> ScaleToUnitInterval(std::span<const double> values);

struct Reranked {
  std::string text;
  double combined = 0.0;
  double model_score = 0.0;
  double cosine = 0.0;
  std::size_t original_rank = 0;
};

// alpha * scaled(model score) + beta * cos(prefix + completion, context)
//   + gamma * scaled(length penalty), sorted descending with ties kept in
// model rank order (score descending, then text). Context turns are joined
// with spaces.
std::vector<Reranked> Rerank(const std::vector<Candidate>& candidates, std::string_view prefix,
                             const std::vector<std::string>& context, const TfIdfModel& tfidf,
                             const RerankConfig& config = {});

}  // namespace ghost::rerank
