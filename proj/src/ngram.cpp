// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/ngram.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "ghost/error.hpp"
#include "ghost/text.hpp"

namespace ghost::ngram {

namespace {

using Key = unsigned __int128;

struct ContextData {
  std::vector<std::pair<TokenId, double>> conts;
  double lambda = 1.0;
};

}  // namespace

NGramModel NGramModel::Train(const SubwordVocabulary& vocab, const std::vector<std::string>& utterances,
                             const TrainOptions& options) {
  if (options.order < 1) throw Error("n-gram order must be at least 1");
  if (options.prune.size() != options.order) {
    throw Error("expected " + std::to_string(options.order) + " pruning thresholds, got " +
                std::to_string(options.prune.size()));
  }
  if (utterances.empty()) throw Error("cannot train an n-gram model on an empty corpus");
  if (!(options.discount > 0.0 && options.discount < 1.0)) throw Error("discount must lie in (0, 1)");

  const std::size_t V = vocab.size();
  const unsigned bits = static_cast<unsigned>(std::bit_width(V - 1));
  if (bits * options.order > 128) {
    throw Error("order " + std::to_string(options.order) + " is too large for a vocabulary of " +
                std::to_string(V) + " tokens");
  }
  const Key mask = (Key{1} << bits) - 1;

  std::vector<std::vector<TokenId>> seqs;
  seqs.reserve(utterances.size());
  for (const auto& u : utterances) {
    std::vector<TokenId> s{kBos};
    for (TokenId t : vocab.Encode(u)) s.push_back(t);
    s.push_back(kEos);
    seqs.push_back(std::move(s));
  }

  NGramModel m;
  m.order_ = options.order;
  m.prune_ = options.prune;
  m.discount_ = options.discount;
  m.unigram_.assign(V, 0.0);
  m.ngram_counts_.assign(options.order, 0);

  std::map<std::vector<TokenId>, ContextData> contexts;  // key: history newest-first
  std::vector<Key> keys;
  for (std::size_t n = 1; n <= options.order; ++n) {
    keys.clear();
    for (const auto& s : seqs) {
      for (std::size_t i = 1; i < s.size(); ++i) {
        if (i + 1 < n) continue;
        Key k = 0;
        for (std::size_t j = i + 1 - n; j <= i; ++j) k = (k << bits) | s[j];
        keys.push_back(k);
      }
    }
    std::sort(keys.begin(), keys.end());

    // (key, count) runs that survive pruning.
    std::vector<std::pair<Key, std::uint64_t>> kept;
    for (std::size_t i = 0; i < keys.size();) {
      std::size_t j = i;
      while (j < keys.size() && keys[j] == keys[i]) ++j;
      if (j - i > options.prune[n - 1]) kept.emplace_back(keys[i], j - i);
      i = j;
    }
    m.ngram_counts_[n - 1] = kept.size();

    if (n == 1) {
      std::uint64_t total = 0;
      for (const auto& [k, c] : kept) total += c;
      for (const auto& [k, c] : kept) {
        m.unigram_[static_cast<TokenId>(k)] = static_cast<double>(c) / static_cast<double>(total);
      }
      continue;
    }
    for (std::size_t i = 0; i < kept.size();) {
      const Key hist = kept[i].first >> bits;
      std::size_t j = i;
      std::uint64_t total = 0;
      while (j < kept.size() && (kept[j].first >> bits) == hist) total += kept[j++].second;
      std::vector<TokenId> newest_first;
      for (std::size_t d = 0; d + 1 < n; ++d) newest_first.push_back(static_cast<TokenId>((hist >> (bits * d)) & mask));
      // Intermediate contexts exist structurally even without continuations.
      for (std::size_t d = 1; d < newest_first.size(); ++d) {
        contexts.try_emplace(std::vector<TokenId>(newest_first.begin(), newest_first.begin() + d));
      }
      auto& ctx = contexts[newest_first];
      const double c_h = static_cast<double>(total);
      for (std::size_t r = i; r < j; ++r) {
        const auto w = static_cast<TokenId>(kept[r].first & mask);
        ctx.conts.emplace_back(w, std::max(static_cast<double>(kept[r].second) - m.discount_, 0.0) / c_h);
      }
      ctx.lambda = m.discount_ * static_cast<double>(j - i) / c_h;
      i = j;
    }
  }

  // Breadth-first numbering: within one depth, lexicographic order of the
  // newest-first key groups siblings contiguously under their parent.
  std::vector<std::vector<const std::pair<const std::vector<TokenId>, ContextData>*>> by_depth(options.order);
  for (const auto& entry : contexts) by_depth[entry.first.size()].push_back(&entry);
  m.label_ = {0};
  m.lambda_ = {1.0};
  m.cont_begin_ = {0, 0};
  std::vector<std::uint32_t> parent_of = {0};
  std::vector<const std::vector<TokenId>*> key_of = {nullptr};
  std::map<std::vector<TokenId>, std::uint32_t> id_of;
  id_of[{}] = 0;
  for (std::size_t d = 1; d < options.order; ++d) {
    for (const auto* e : by_depth[d]) {
      const auto id = static_cast<std::uint32_t>(m.label_.size());
      id_of[e->first] = id;
      m.label_.push_back(e->first.back());
      m.lambda_.push_back(e->second.lambda);
      parent_of.push_back(id_of.at(std::vector<TokenId>(e->first.begin(), e->first.end() - 1)));
      for (const auto& [w, p] : e->second.conts) {
        m.cont_token_.push_back(w);
        m.cont_prob_.push_back(p);
      }
      m.cont_begin_.push_back(static_cast<std::uint32_t>(m.cont_token_.size()));
    }
  }
  // Parents are numbered before children and in the same order, so children
  // of each parent are contiguous.
  const std::size_t N = m.label_.size();
  m.child_begin_.assign(N + 1, 0);
  std::vector<std::uint32_t> child_count(N, 0);
  for (std::size_t i = 1; i < N; ++i) ++child_count[parent_of[i]];
  std::uint32_t next = 1;
  for (std::size_t i = 0; i < N; ++i) {
    m.child_begin_[i] = next;
    next += child_count[i];
  }
  m.child_begin_[N] = next;
  m.Finalize();
  return m;
}

void NGramModel::Finalize() {
  unigram_order_.clear();
  unigram_plogp_ = 0.0;
  for (TokenId t = 0; t < unigram_.size(); ++t) {
    if (t == kBos) continue;
    unigram_order_.push_back(t);
    if (unigram_[t] > 0.0) unigram_plogp_ += unigram_[t] * std::log(unigram_[t]);
  }
  std::stable_sort(unigram_order_.begin(), unigram_order_.end(),
                   [this](TokenId a, TokenId b) { return unigram_[a] > unigram_[b]; });
}

std::uint32_t NGramModel::ChildOf(std::uint32_t node, TokenId t) const {
  const auto first = label_.begin() + child_begin_[node];
  const auto last = label_.begin() + child_begin_[node + 1];
  const auto it = std::lower_bound(first, last, t);
  if (it == last || *it != t) return 0;
  return static_cast<std::uint32_t>(it - label_.begin());
}

NGramModel::Chain NGramModel::Lookup(std::span<const TokenId> history) const {
  Chain c;
  std::uint32_t node = 0;
  for (std::size_t d = 0; d + 1 < order_ && d < history.size(); ++d) {
    node = ChildOf(node, history[history.size() - 1 - d]);
    if (node == 0) break;
    c.nodes.push_back(node);
  }
  return c;
}

double NGramModel::Prob(const Chain& chain, TokenId w) const {
  double p = unigram_[w];
  for (std::uint32_t n : chain.nodes) {
    const auto first = cont_token_.begin() + cont_begin_[n];
    const auto last = cont_token_.begin() + cont_begin_[n + 1];
    const auto it = std::lower_bound(first, last, w);
    const double disc = (it != last && *it == w) ? cont_prob_[it - cont_token_.begin()] : 0.0;
    p = disc + lambda_[n] * p;
  }
  return p;
}

std::vector<double> NGramModel::Distribution(const Chain& chain) const {
  std::vector<double> dist = unigram_;
  for (std::uint32_t n : chain.nodes) {
    for (auto& p : dist) p *= lambda_[n];
    for (std::uint32_t i = cont_begin_[n]; i < cont_begin_[n + 1]; ++i) dist[cont_token_[i]] += cont_prob_[i];
  }
  return dist;
}

std::vector<double> NGramModel::Distribution(std::span<const TokenId> history) const {
  return Distribution(Lookup(history));
}

std::vector<TokenId> NGramModel::ExplicitTokens(const Chain& chain) const {
  std::vector<TokenId> out;
  for (std::uint32_t n : chain.nodes) {
    out.insert(out.end(), cont_token_.begin() + cont_begin_[n], cont_token_.begin() + cont_begin_[n + 1]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double NGramModel::ResidualScale(const Chain& chain) const {
  double scale = 1.0;
  for (std::uint32_t n : chain.nodes) scale *= lambda_[n];
  return scale;
}

double NGramModel::Entropy(const Chain& chain) const {
  const double scale = ResidualScale(chain);
  double h = 0.0;
  double explicit_u = 0.0;
  double explicit_ulogu = 0.0;
  for (TokenId w : ExplicitTokens(chain)) {
    const double p = Prob(chain, w);
    if (p > 0.0) h -= p * std::log(p);
    const double u = unigram_[w];
    if (u > 0.0) {
      explicit_u += u;
      explicit_ulogu += u * std::log(u);
    }
  }
  // Remaining tokens share one scale: sum of s*u*ln(s*u) = s*(sum u ln u + ln s * sum u).
  if (scale > 0.0) {
    const double rest_ulogu = unigram_plogp_ - explicit_ulogu;
    const double rest_u = std::max(0.0, 1.0 - explicit_u);
    h -= scale * (rest_ulogu + std::log(scale) * rest_u);
  }
  return std::max(h, 0.0);
}

double Entropy(std::span<const double> distribution) {
  double h = 0.0;
  for (double p : distribution) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

void NGramModel::Serialize(ContainerWriter& out) const {
  const std::uint32_t order = static_cast<std::uint32_t>(order_);
  out.PutU32("lm.order", std::span(&order, 1));
  out.PutU32("lm.prune", prune_);
  out.PutF64("lm.discount", std::span(&discount_, 1));
  out.PutString("lm.score_length_unit", "tokens");
  out.PutF64("lm.unigram", unigram_);
  out.PutU32("lm.label", label_);
  out.PutU32("lm.child_begin", child_begin_);
  out.PutU32("lm.cont_begin", cont_begin_);
  out.PutU32("lm.cont_token", cont_token_);
  out.PutF64("lm.cont_prob", cont_prob_);
  out.PutF64("lm.lambda", lambda_);
  std::vector<std::uint64_t> counts(ngram_counts_.begin(), ngram_counts_.end());
  out.PutU64("lm.ngram_counts", counts);
}

NGramModel NGramModel::Deserialize(const ContainerReader& in) {
  NGramModel m;
  const auto order = in.U32("lm.order");
  const auto discount = in.F64("lm.discount");
  if (order.size() != 1 || discount.size() != 1) throw Error(in.source() + ": bad n-gram header");
  m.order_ = order.front();
  m.discount_ = discount.front();
  m.prune_ = in.U32("lm.prune");
  m.unigram_ = in.F64("lm.unigram");
  m.label_ = in.U32("lm.label");
  m.child_begin_ = in.U32("lm.child_begin");
  m.cont_begin_ = in.U32("lm.cont_begin");
  m.cont_token_ = in.U32("lm.cont_token");
  m.cont_prob_ = in.F64("lm.cont_prob");
  m.lambda_ = in.F64("lm.lambda");
  for (auto c : in.U64("lm.ngram_counts")) m.ngram_counts_.push_back(c);
  const std::size_t N = m.label_.size();
  const bool ok = N >= 1 && m.child_begin_.size() == N + 1 && m.cont_begin_.size() == N + 1 &&
                  m.lambda_.size() == N && m.cont_token_.size() == m.cont_prob_.size() &&
                  m.cont_begin_.back() == m.cont_token_.size() && m.child_begin_.back() == N &&
                  m.prune_.size() == m.order_;
  if (!ok) throw Error(in.source() + ": inconsistent n-gram tables");
  for (TokenId t : m.cont_token_) {
    if (t >= m.unigram_.size()) throw Error(in.source() + ": token id out of range");
  }
  m.Finalize();
  return m;
}

QbModel TrainQb(const std::vector<std::string>& utterances, std::size_t vocab_size, const TrainOptions& options) {
  QbModel model;
  model.vocab = SubwordVocabulary::Learn(utterances, vocab_size);
  model.lm = NGramModel::Train(model.vocab, utterances, options);
  return model;
}

ContainerWriter ToContainer(const QbModel& model, std::uint64_t fingerprint) {
  ContainerWriter w(ModelKind::kNGram, fingerprint);
  model.vocab.Serialize(w);
  model.lm.Serialize(w);
  return w;
}

QbModel QbFromContainer(const ContainerReader& in) {
  in.ExpectKind(ModelKind::kNGram);
  QbModel model;
  model.vocab = SubwordVocabulary::Deserialize(in);
  model.lm = NGramModel::Deserialize(in);
  if (model.lm.vocab_size() != model.vocab.size()) throw Error(in.source() + ": vocabulary/model size mismatch");
  return model;
}

}  // namespace ghost::ngram
