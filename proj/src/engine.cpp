// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/engine.hpp"

#include <sstream>

#include "ghost/container.hpp"
#include "ghost/text.hpp"

namespace ghost {

ModelChoice ParseModel(std::string_view name) {
  if (name == "mpc") return ModelChoice::kMpc;
  if (name == "mpcpp") return ModelChoice::kMpcpp;
  if (name == "qb") return ModelChoice::kQb;
  throw RequestError("unknown model '" + std::string(name) + "' (expected mpc, mpcpp or qb)");
}

std::string_view ModelName(ModelChoice model) {
  switch (model) {
    case ModelChoice::kMpc: return "mpc";
    case ModelChoice::kMpcpp: return "mpcpp";
    case ModelChoice::kQb: return "qb";
  }
  return "?";
}

void Engine::CheckFingerprint(std::uint64_t fp, const std::string& what) {
  if (fingerprint_ && *fingerprint_ != fp) {
    std::ostringstream msg;
    msg << what << ": corpus fingerprint " << std::hex << fp << " differs from previously loaded indices ("
        << *fingerprint_ << ")";
    throw Error(msg.str());
  }
  fingerprint_ = fp;
}

void Engine::LoadIndex(const std::filesystem::path& path) {
  const auto in = ContainerReader::FromFile(path);
  CheckFingerprint(in.fingerprint(), path.string());
  switch (in.kind()) {
    case ModelKind::kCharTrie:
      main_ = std::make_shared<const trie::CharTrie>(trie::CharTrie::Deserialize(in));
      break;
    case ModelKind::kSuffixTrie:
      suffix_ = std::make_shared<const trie::SuffixTrie>(trie::SuffixTrie::Deserialize(in));
      break;
    case ModelKind::kNGram:
      qb_ = std::make_shared<const ngram::QbModel>(ngram::QbFromContainer(in));
      break;
    case ModelKind::kTfIdf:
      tfidf_ = std::make_shared<const rerank::TfIdfModel>(rerank::TfIdfModel::Deserialize(in));
      break;
  }
  files_.push_back(path.string());
}

void Engine::SetMainTrie(trie::CharTrie t, std::uint64_t fp) {
  CheckFingerprint(fp, "main trie");
  main_ = std::make_shared<const trie::CharTrie>(std::move(t));
}

void Engine::SetSuffixTrie(trie::SuffixTrie t, std::uint64_t fp) {
  CheckFingerprint(fp, "suffix trie");
  suffix_ = std::make_shared<const trie::SuffixTrie>(std::move(t));
}

void Engine::SetQb(ngram::QbModel m, std::uint64_t fp) {
  CheckFingerprint(fp, "n-gram model");
  qb_ = std::make_shared<const ngram::QbModel>(std::move(m));
}

void Engine::SetTfIdf(rerank::TfIdfModel m, std::uint64_t fp) {
  CheckFingerprint(fp, "tf-idf model");
  tfidf_ = std::make_shared<const rerank::TfIdfModel>(std::move(m));
}

bool Engine::Has(ModelChoice model) const {
  switch (model) {
    case ModelChoice::kMpc: return main_ != nullptr;
    case ModelChoice::kMpcpp: return main_ != nullptr && suffix_ != nullptr;
    case ModelChoice::kQb: return qb_ != nullptr;
  }
  return false;
}

std::vector<std::string> Engine::Inventory() const {
  std::vector<std::string> out;
  for (auto m : {ModelChoice::kMpc, ModelChoice::kMpcpp, ModelChoice::kQb}) {
    if (Has(m)) out.emplace_back(ModelName(m));
  }
  if (tfidf_) out.emplace_back("tfidf");
  return out;
}

SuggestOutcome Engine::Suggest(const SuggestRequest& req) const {
  if (!Has(req.model)) throw RequestError("model '" + std::string(ModelName(req.model)) + "' is not loaded");
  if (req.rerank && !tfidf_) throw RequestError("rerank requested but no TF-IDF index is loaded");
  if (req.prefix.empty()) throw RequestError("prefix must be non-empty");

  // Reranking draws on the top-k; otherwise only the top-1 is needed for MPC.
  const std::size_t k = req.rerank ? options_.rerank.k : options_.k;
  SuggestOutcome out;
  Source source = Source::kMpc;
  std::string empty_reason;
  switch (req.model) {
    case ModelChoice::kMpc: {
      auto r = trie::MpcCandidates(*main_, req.prefix, k);
      out.candidates = std::move(r.candidates);
      source = Source::kMpc;
      empty_reason = "prefix not in main trie";
      break;
    }
    case ModelChoice::kMpcpp: {
      auto r = trie::MpcppCandidates(*main_, *suffix_, req.prefix, k);
      out.candidates = std::move(r.candidates);
      source = Source::kMpcpp;
      empty_reason = "no word-aligned tail in suffix trie";
      break;
    }
    case ModelChoice::kQb: {
      ngram::SearchOptions so;
      so.beam_width = options_.beam_width;
      so.max_chars = options_.max_chars;
      so.stop = req.stop;
      so.top_k = k;
      auto r = ngram::QbCandidates(*qb_, req.prefix, so);
      out.candidates = std::move(r.candidates);
      source = Source::kQb;
      empty_reason = r.abstain_reason;
      break;
    }
  }
  if (out.candidates.empty()) {
    out.suggestion = Abstain(source, empty_reason);
    return out;
  }
  if (req.rerank) {
    auto ranked = rerank::Rerank(out.candidates, req.prefix, req.context, *tfidf_, options_.rerank);
    out.candidates.clear();
    for (auto& r : ranked) out.candidates.push_back({std::move(r.text), r.combined});
    source = Source::kReranked;
  }
  const Candidate& top = out.candidates.front();
  if (req.min_confidence && top.score < *req.min_confidence) {
    out.suggestion = Abstain(source, "confidence below threshold");
  } else {
    out.suggestion = MakeSuggestion(top.text, top.score, source);
  }
  return out;
}

}  // namespace ghost
