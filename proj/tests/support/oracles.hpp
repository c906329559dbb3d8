// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

// Deliberately naive reference implementations used to cross-check the
// library. None of them share code with the code under test beyond UTF-8
// decoding.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace ghost::testing {

struct OracleCompletion {
  std::string text;
  std::uint32_t frequency;
};

// Filters `strings` (truncated to max_len characters) by prefix, aggregates
// identical remainders, drops the empty one and sorts by (frequency desc,
// text asc).
std::vector<OracleCompletion> BruteTopK(const std::vector<std::string>& strings, const std::string& prefix,
                                        std::size_t k, std::size_t max_len = 500);

// Counts every suffix starting at a word start, keeping counts >= min_freq.
std::unordered_map<std::string, std::uint32_t> BruteSuffixCounts(const std::vector<std::string>& strings,
                                                                 std::uint32_t min_freq,
                                                                 std::size_t max_len = 500);

// Adjacent pair counts over space-attached pieces, recomputed from scratch.
std::map<std::pair<std::u32string, std::u32string>, std::size_t> BrutePairCounts(
    const std::vector<std::vector<std::u32string>>& pieces);

}  // namespace ghost::testing
