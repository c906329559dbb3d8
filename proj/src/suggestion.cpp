// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/suggestion.hpp"

#include "ghost/text.hpp"

namespace ghost {

std::string_view SourceName(Source source) {
  switch (source) {
    case Source::kMpc: return "MPC";
    case Source::kMpcpp: return "MPCPP";
    case Source::kQb: return "QB";
    case Source::kReranked: return "RERANKED";
  }
  return "?";
}

Suggestion MakeSuggestion(std::string text, double score, Source source) {
  Suggestion s;
  s.len_chars = text::Length(text);
  s.text = std::move(text);
  s.score = score;
  s.source = source;
  return s;
}

Suggestion Abstain(Source source, std::string reason) {
  Suggestion s;
  s.source = source;
  s.abstain_reason = std::move(reason);
  return s;
}

}  // namespace ghost
