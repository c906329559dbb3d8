// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ghost/ngram.hpp"

namespace ghost::testing {

struct ExhaustiveBest {
  std::string text;
  double score = 0.0;
};

// Enumerates every token sequence of at most `max_tokens` tokens that
// re-generates the prefix fragment (within `fragment_tokens` tokens) and
// scores finished ones by -(total NLL / tokens) using dense distributions.
// Mirrors the finishing rules of the search without any pruning.
std::optional<ExhaustiveBest> Exhaustive(const ngram::QbModel& model, std::string_view prefix,
                                         std::size_t max_tokens, std::size_t fragment_tokens = 3);

}  // namespace ghost::testing
