// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ghost/ngram.hpp"
#include "ghost/suggestion.hpp"

namespace ghost::ngram {

struct StopPolicy {
  enum class Kind { kNone, kMaxWords, kEntropy };
  Kind kind = Kind::kNone;
  std::size_t max_words = 0;  // 1..10 for kMaxWords
  double threshold = 0.0;     // nats, > 0 for kEntropy

  static StopPolicy None() { return {}; }
  static StopPolicy MaxWords(std::size_t t);
  static StopPolicy Entropy(double threshold);
};

struct SearchOptions {
  std::size_t beam_width = 10;
  StopPolicy stop;
  std::size_t max_chars = 256;
  std::size_t max_tokens = 0;  // 0 = bounded by max_chars only
  std::size_t top_k = 10;
  // Hypotheses must have re-generated the prefix fragment within this many tokens.
  std::size_t fragment_tokens = 3;
};

// The prefix split used for generation: `body` is encoded as context and
// `fragment` (from the last word start on) must be re-generated by the beam.
// A prefix ending in whitespace has an empty fragment.
struct PrefixSplit {
  std::u32string body;
  std::u32string fragment;
};
PrefixSplit SplitPrefix(std::u32string_view prefix);

struct QbResult {
  // Distinct completion texts, best first, scored by -(cum NLL / tokens).
  std::vector<Candidate> candidates;
  std::string abstain_reason;
};

// Beam search over the model. Hypotheses are admissible only while their
// surface agrees with the prefix fragment; a hypothesis finishes on
// end-of-utterance, on reaching max_tokens/max_chars, or when the word budget
// is spent. Entropy stopping is applied to the ranked results: each path is
// replayed and cut before the first token whose next-token entropy exceeds
// the threshold, keeping at least one suggestion token. Every stopped
// suggestion is therefore a prefix of its unstopped counterpart, and ranks
// are those of the unstopped search.
QbResult QbCandidates(const QbModel& model, std::string_view prefix, const SearchOptions& options = {});
Suggestion QbSuggest(const QbModel& model, std::string_view prefix, const SearchOptions& options = {});

// Word-count bookkeeping shared with truncation: the start of a suggestion is
// a boundary, so a mid-word continuation counts as the first word.
struct WordState {
  std::size_t words = 0;
  bool after_space = true;
  void Append(std::u32string_view chars);
};

}  // namespace ghost::ngram
