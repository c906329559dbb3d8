// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ghost/error.hpp"
#include "ghost/ngram.hpp"
#include "ghost/qb.hpp"
#include "ghost/rerank.hpp"
#include "ghost/suggestion.hpp"
#include "ghost/trie.hpp"

namespace ghost {

enum class ModelChoice { kMpc, kMpcpp, kQb };

ModelChoice ParseModel(std::string_view name);
std::string_view ModelName(ModelChoice model);

// Caller mistakes (unknown or unloaded model, missing rerank index, bad
// prefix), as opposed to model failures.
class RequestError : public Error {
 public:
  using Error::Error;
};

struct SuggestRequest {
  std::string prefix;
  std::vector<std::string> context;
  ModelChoice model = ModelChoice::kMpc;
  bool rerank = false;
  ngram::StopPolicy stop;
  std::optional<double> min_confidence;
};

struct SuggestOutcome {
  Suggestion suggestion;
  // Ranked candidates behind the suggestion (after reranking when requested).
  std::vector<Candidate> candidates;
};

struct EngineOptions {
  std::size_t k = trie::kDefaultTopK;
  std::size_t beam_width = 10;
  std::size_t max_chars = 256;
  rerank::RerankConfig rerank;
};

// Loaded models, immutable after setup and safe to query from many threads.
class Engine {
 public:
  explicit Engine(EngineOptions options = {}) : options_(options) {}

  // Loads a GHST container, dispatching on its kind tag. All loaded files
  // must share one corpus fingerprint.
  void LoadIndex(const std::filesystem::path& path);

  void SetMainTrie(trie::CharTrie t, std::uint64_t fingerprint = 0);
  void SetSuffixTrie(trie::SuffixTrie t, std::uint64_t fingerprint = 0);
  void SetQb(ngram::QbModel m, std::uint64_t fingerprint = 0);
  void SetTfIdf(rerank::TfIdfModel m, std::uint64_t fingerprint = 0);

  bool Has(ModelChoice model) const;
  bool has_tfidf() const { return tfidf_ != nullptr; }
  std::optional<std::uint64_t> fingerprint() const { return fingerprint_; }
  const EngineOptions& options() const { return options_; }
  // "mpc", "mpcpp", "qb", "tfidf" for whatever is loaded.
  std::vector<std::string> Inventory() const;
  const std::vector<std::string>& loaded_files() const { return files_; }

  SuggestOutcome Suggest(const SuggestRequest& request) const;

 private:
  void CheckFingerprint(std::uint64_t fp, const std::string& what);

  EngineOptions options_;
  std::shared_ptr<const trie::CharTrie> main_;
  std::shared_ptr<const trie::SuffixTrie> suffix_;
  std::shared_ptr<const ngram::QbModel> qb_;
  std::shared_ptr<const rerank::TfIdfModel> tfidf_;
  std::optional<std::uint64_t> fingerprint_;
  std::vector<std::string> files_;
};

}  // namespace ghost
