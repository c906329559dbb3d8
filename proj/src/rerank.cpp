// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "ghost/error.hpp"
#include "ghost/text.hpp"

namespace ghost::rerank {

namespace {

bool IsAlnum(char32_t c) {
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  return !text::IsSpace(c);
}

char32_t Lower(char32_t c) { return (c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c; }

}  // namespace

std::vector<std::string> Tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char32_t c : text::Decode(s)) {
    if (IsAlnum(c)) {
      text::AppendUtf8(cur, Lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

TfIdfModel TfIdfModel::Fit(const std::vector<std::string>& documents) {
  if (documents.empty()) throw Error("cannot fit TF-IDF on an empty corpus");
  std::map<std::string, std::uint64_t> df;
  for (const auto& d : documents) {
    auto terms = Tokenize(d);
    std::set<std::string> unique(terms.begin(), terms.end());
    for (const auto& t : unique) ++df[t];
  }
  TfIdfModel m;
  m.documents_ = documents.size();
  m.fingerprint_ = Fingerprint(documents);
  for (const auto& [t, c] : df) {
    m.terms_.push_back(t);
    m.df_.push_back(c);
  }
  m.Index();
  return m;
}

void TfIdfModel::Index() {
  idf_.resize(terms_.size());
  index_.clear();
  const double n = static_cast<double>(documents_);
  for (std::uint32_t i = 0; i < terms_.size(); ++i) {
    idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df_[i]))) + 1.0;
    index_.emplace(terms_[i], i);
  }
}

SparseVector TfIdfModel::Transform(std::string_view s) const {
  std::map<std::uint32_t, double> tf;
  for (const auto& t : Tokenize(s)) {
    auto it = index_.find(t);
    if (it != index_.end()) tf[it->second] += 1.0;
  }
  SparseVector v;
  double norm = 0.0;
  for (const auto& [i, c] : tf) {
    const double w = c * idf_[i];
    v.emplace_back(i, w);
    norm += w * w;
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& e : v) e.second /= norm;
  }
  return v;
}

double TfIdfModel::Cosine(std::string_view a, std::string_view b) const {
  const auto va = Transform(a);
  const auto vb = Transform(b);
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < va.size() && j < vb.size()) {
    if (va[i].first == vb[j].first) {
      dot += va[i++].second * vb[j++].second;
    } else if (va[i].first < vb[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return dot;
}

long TfIdfModel::DocumentFrequency(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? -1 : static_cast<long>(df_[it->second]);
}

double TfIdfModel::Idf(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? 0.0 : idf_[it->second];
}

void TfIdfModel::Serialize(ContainerWriter& out) const {
  out.PutStrings("tfidf.terms", terms_);
  out.PutU64("tfidf.df", df_);
  const std::uint64_t header[2] = {documents_, fingerprint_};
  out.PutU64("tfidf.header", header);
}

TfIdfModel TfIdfModel::Deserialize(const ContainerReader& in) {
  in.ExpectKind(ModelKind::kTfIdf);
  TfIdfModel m;
  m.terms_ = in.Strings("tfidf.terms");
  m.df_ = in.U64("tfidf.df");
  const auto header = in.U64("tfidf.header");
  if (header.size() != 2 || m.df_.size() != m.terms_.size() || header[0] == 0) {
    throw Error(in.source() + ": inconsistent TF-IDF tables");
  }
  m.documents_ = header[0];
  m.fingerprint_ = header[1];
  m.Index();
  return m;
}

ContainerWriter ToContainer(const TfIdfModel& model, std::uint64_t fingerprint) {
  ContainerWriter w(ModelKind::kTfIdf, fingerprint);
  model.Serialize(w);
  return w;
}

double LengthPenalty(std::size_t completion_len_chars) {
  return 1.0 / (1.0 + static_cast<double>(completion_len_chars));
}

std::vector<double> ScaleToUnitInterval(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = 2.0 * (values[i] - *lo) / range - 1.0;
  return out;
}

std::vector<Reranked> Rerank(const std::vector<Candidate>& candidates, std::string_view prefix,
                             const std::vector<std::string>& context, const TfIdfModel& tfidf,
                             const RerankConfig& config) {
  std::vector<Reranked> out;
  if (candidates.empty()) return out;
  // Model rank: score descending, then text, independent of input order.
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (candidates[a].score != candidates[b].score) return candidates[a].score > candidates[b].score;
    return candidates[a].text < candidates[b].text;
  });
  order.resize(std::min(order.size(), config.k));
  const std::size_t n = order.size();
  std::vector<double> scores, penalties;
  for (std::size_t i : order) {
    scores.push_back(candidates[i].score);
    penalties.push_back(LengthPenalty(text::Length(candidates[i].text)));
  }
  const auto scaled_scores = ScaleToUnitInterval(scores);
  const auto scaled_penalties = ScaleToUnitInterval(penalties);
  const std::string history = text::Join(context, " ");
  const auto context_vec = tfidf.Transform(history);
  for (std::size_t i = 0; i < n; ++i) {
    Reranked r;
    const Candidate& c = candidates[order[i]];
    r.text = c.text;
    r.model_score = c.score;
    r.original_rank = i;
    r.cosine = context_vec.empty() ? 0.0 : tfidf.Cosine(std::string(prefix) + c.text, history);
    r.combined = config.alpha * scaled_scores[i] + config.beta * r.cosine + config.gamma * scaled_penalties[i];
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const Reranked& a, const Reranked& b) {
    if (a.combined != b.combined) return a.combined > b.combined;
    return a.original_rank < b.original_rank;
  });
  return out;
}

}  // namespace ghost::rerank
