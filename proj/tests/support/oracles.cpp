// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>

#include "ghost/text.hpp"

namespace ghost::testing {

namespace {

bool Space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r'; }

}  // namespace

std::vector<OracleCompletion> BruteTopK(const std::vector<std::string>& strings, const std::string& prefix,
                                        std::size_t k, std::size_t max_len) {
  const std::u32string p = text::Decode(prefix);
  std::map<std::u32string, std::uint32_t> counts;
  for (const auto& s : strings) {
    std::u32string u = text::Decode(s);
    if (u.size() > max_len) u.resize(max_len);
    if (u.size() <= p.size() || u.compare(0, p.size(), p) != 0) continue;
    ++counts[u.substr(p.size())];
  }
  std::vector<std::pair<std::u32string, std::uint32_t>> all(counts.begin(), counts.end());
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<OracleCompletion> out;
  for (std::size_t i = 0; i < all.size() && i < k; ++i) out.push_back({text::Encode(all[i].first), all[i].second});
  return out;
}

std::unordered_map<std::string, std::uint32_t> BruteSuffixCounts(const std::vector<std::string>& strings,
                                                                 std::uint32_t min_freq, std::size_t max_len) {
  std::unordered_map<std::string, std::uint32_t> counts;
  for (const auto& s : strings) {
    const std::u32string u = text::Decode(s);
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (Space(u[i]) || (i > 0 && !Space(u[i - 1]))) continue;
      std::u32string suffix = u.substr(i);
      if (suffix.size() > max_len) suffix.resize(max_len);
      ++counts[text::Encode(suffix)];
    }
  }
  for (auto it = counts.begin(); it != counts.end();) {
    it = it->second < min_freq ? counts.erase(it) : std::next(it);
  }
  return counts;
}

std::map<std::pair<std::u32string, std::u32string>, std::size_t> BrutePairCounts(
    const std::vector<std::vector<std::u32string>>& pieces) {
  std::map<std::pair<std::u32string, std::u32string>, std::size_t> out;
  for (const auto& word : pieces) {
    for (std::size_t i = 0; i + 1 < word.size(); ++i) ++out[{word[i], word[i + 1]}];
  }
  return out;
}

}  // namespace ghost::testing
