// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ghost/container.hpp"
#include "ghost/error.hpp"

namespace ghost::ngram {

using TokenId = std::uint32_t;

inline constexpr TokenId kEos = 0;
inline constexpr TokenId kBos = 1;
inline constexpr TokenId kFirstRegular = 2;
inline constexpr std::size_t kDefaultVocabSize = 4096;

class EncodeError : public Error {
 public:
  EncodeError(char32_t c, std::size_t offset);
  char32_t character() const { return character_; }
  std::size_t offset() const { return offset_; }

 private:
  char32_t character_;
  std::size_t offset_;
};

// Pre-tokenization used for merge learning: a piece runs from one word start
// to the next, so "how are you" splits into "how ", "are ", "you".
std::vector<std::u32string> SplitPieces(std::u32string_view s);

// Subword units: two reserved ids (end/begin of utterance, empty surface),
// every character seen in training sorted by code point, then merged units in
// merge order.
class SubwordVocabulary {
 public:
  SubwordVocabulary() = default;

  // BPE-style merging of the most frequent adjacent pair (ties broken by the
  // pair's surfaces, ascending) until `target_size` regular tokens exist or no
  // pair occurs twice.
  static SubwordVocabulary Learn(const std::vector<std::string>& utterances,
                                 std::size_t target_size = kDefaultVocabSize);

  // Explicit vocabulary, e.g. {"a", "b", "ab"}. Surfaces must be distinct and
  // non-empty; all single characters of every surface must be present.
  static SubwordVocabulary FromSurfaces(const std::vector<std::string>& surfaces);

  // Greedy left-to-right longest-prefix match. Throws EncodeError on a
  // character outside the vocabulary.
  std::vector<TokenId> Encode(std::u32string_view text) const;
  std::vector<TokenId> Encode(std::string_view utf8) const;
  std::string Decode(std::span<const TokenId> tokens) const;

  std::size_t size() const { return surfaces_.size(); }
  const std::u32string& surface(TokenId id) const { return surfaces_[id]; }
  bool HasChar(char32_t c) const;
  // Merges in the order they were learned.
  const std::vector<std::pair<TokenId, TokenId>>& merges() const { return merges_; }

  void Serialize(ContainerWriter& out) const;
  static SubwordVocabulary Deserialize(const ContainerReader& in);

 private:
  void Index();

  std::vector<std::u32string> surfaces_;
  std::vector<std::pair<TokenId, TokenId>> merges_;

  // Surface trie for longest-prefix matching.
  struct Node {
    std::unordered_map<char32_t, std::uint32_t> next;
    TokenId token = 0;
    bool terminal = false;
  };
  std::vector<Node> nodes_;
};

}  // namespace ghost::ngram
