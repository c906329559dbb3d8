// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace ghost {

enum class Source { kMpc, kMpcpp, kQb, kReranked };

std::string_view SourceName(Source source);

// The unit every model emits. Scores are oriented so that higher means more
// confident. An empty text is an abstention and carries a reason instead.
struct Suggestion {
  std::string text;
  double score = 0.0;
  Source source = Source::kMpc;
  std::size_t len_chars = 0;
  std::string abstain_reason;

  bool shown() const { return !text.empty(); }
};

Suggestion MakeSuggestion(std::string text, double score, Source source);
Suggestion Abstain(Source source, std::string reason);

// A scored completion, as fed into reranking.
struct Candidate {
  std::string text;
  double score = 0.0;
};

}  // namespace ghost
