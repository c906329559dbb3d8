// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ghost/container.hpp"
#include "ghost/vocabulary.hpp"

namespace ghost::ngram {

struct TrainOptions {
  std::size_t order = 8;
  // Order-i n-grams with count <= prune[i - 1] are dropped.
  std::vector<std::uint32_t> prune = {0, 1, 1, 2, 2, 3, 3, 4};
  double discount = 0.75;
};

// Backoff n-gram LM with interpolated absolute discounting:
//
//   P(w | h) = max(c(h, w) - D, 0) / c(h) + D * N1+(h .) / c(h) * P(w | h')
//
// where h' drops the oldest token of h and c(h) sums the kept continuations of
// h. Histories without kept continuations defer entirely to h'. The unigram
// level is the undiscounted relative frequency.
//
// Contexts live in a trie keyed by history tokens newest-first, so a lookup
// walks from the unigram root towards longer histories.
class NGramModel {
 public:
  static NGramModel Train(const SubwordVocabulary& vocab, const std::vector<std::string>& utterances,
                          const TrainOptions& options = {});

  // Context nodes matched by `history` (oldest..newest), shortest first. The
  // unigram root is implicit and not included.
  struct Chain {
    std::vector<std::uint32_t> nodes;
  };
  Chain Lookup(std::span<const TokenId> history) const;

  double Prob(const Chain& chain, TokenId w) const;
  double Prob(std::span<const TokenId> history, TokenId w) const { return Prob(Lookup(history), w); }
  // Dense distribution over the whole vocabulary (reserved ids included; the
  // begin-of-utterance id always has probability 0).
  std::vector<double> Distribution(std::span<const TokenId> history) const;
  std::vector<double> Distribution(const Chain& chain) const;

  // Sparse view for search: tokens with an explicit entry somewhere on the
  // chain; every other token w has probability residual_scale() * unigram(w).
  std::vector<TokenId> ExplicitTokens(const Chain& chain) const;
  double ResidualScale(const Chain& chain) const;
  // Entropy in nats of the distribution at `chain`, computed sparsely.
  double Entropy(const Chain& chain) const;

  double unigram(TokenId w) const { return unigram_[w]; }
  // Regular tokens (and end-of-utterance) by unigram probability descending.
  const std::vector<TokenId>& unigram_order() const { return unigram_order_; }

  std::size_t order() const { return order_; }
  std::size_t vocab_size() const { return unigram_.size(); }
  const std::vector<std::uint32_t>& prune() const { return prune_; }
  double discount() const { return discount_; }
  std::size_t context_count() const { return lambda_.size(); }
  // Number of stored n-grams of each order (index 0 = unigrams).
  const std::vector<std::size_t>& ngram_counts() const { return ngram_counts_; }

  void Serialize(ContainerWriter& out) const;
  static NGramModel Deserialize(const ContainerReader& in);

 private:
  void Finalize();
  std::uint32_t ChildOf(std::uint32_t node, TokenId t) const;

  std::size_t order_ = 1;
  std::vector<std::uint32_t> prune_;
  double discount_ = 0.75;
  std::vector<double> unigram_;

  // Context trie, breadth-first; node 0 is the empty history.
  std::vector<TokenId> label_;
  std::vector<std::uint32_t> child_begin_;
  std::vector<std::uint32_t> cont_begin_;
  std::vector<TokenId> cont_token_;
  std::vector<double> cont_prob_;  // discounted term
  std::vector<double> lambda_;     // interpolation weight of the shorter history

  std::vector<std::size_t> ngram_counts_;
  std::vector<TokenId> unigram_order_;
  double unigram_plogp_ = 0.0;
};

double Entropy(std::span<const double> distribution);

// Vocabulary plus language model: what the "NGRAM" container stores.
struct QbModel {
  SubwordVocabulary vocab;
  NGramModel lm;
};

QbModel TrainQb(const std::vector<std::string>& utterances, std::size_t vocab_size = kDefaultVocabSize,
                const TrainOptions& options = {});
ContainerWriter ToContainer(const QbModel& model, std::uint64_t fingerprint);
QbModel QbFromContainer(const ContainerReader& in);

}  // namespace ghost::ngram
