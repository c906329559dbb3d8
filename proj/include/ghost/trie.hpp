// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ghost/container.hpp"
#include "ghost/suggestion.hpp"

namespace ghost::trie {

inline constexpr std::size_t kDefaultMaxLen = 500;
inline constexpr std::size_t kDefaultTopK = 10;

struct Completion {
  std::string text;  // remainder after the query prefix
  std::uint32_t frequency = 0;

  friend bool operator==(const Completion&, const Completion&) = default;
};

// Frequency-annotated character trie, immutable once built.
//
// Nodes are numbered in breadth-first order so the children of a node occupy
// a contiguous id range [child_begin[n], child_begin[n + 1]), sorted by label.
// pass_count(n) = terminal_count(n) + sum of the children's pass counts.
class CharTrie {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kRoot = 0;
  static constexpr NodeId kNone = std::numeric_limits<NodeId>::max();

  CharTrie();

  // Each string is truncated to `max_len` characters before insertion.
  static CharTrie Build(const std::vector<std::string>& strings, std::size_t max_len = kDefaultMaxLen);
  // Builds from (string, count) pairs; duplicate strings have their counts summed.
  static CharTrie FromCounts(std::vector<std::pair<std::u32string, std::uint32_t>> counted,
                             std::size_t max_len = kDefaultMaxLen);

  NodeId Child(NodeId node, char32_t c) const;
  NodeId Find(std::u32string_view path, NodeId from = kRoot) const;
  NodeId Find(std::string_view utf8_path) const;

  std::uint32_t pass_count(NodeId n) const { return pass_[n]; }
  std::uint32_t terminal_count(NodeId n) const { return terminal_[n]; }
  // Total frequency of non-empty completions below `n`.
  std::uint32_t completion_mass(NodeId n) const { return pass_[n] - terminal_[n]; }
  std::size_t node_count() const { return label_.size(); }
  std::size_t max_len() const { return max_len_; }
  std::pair<NodeId, NodeId> children(NodeId n) const { return {child_begin_[n], child_begin_[n + 1]}; }
  char32_t label(NodeId n) const { return label_[n]; }

  // Up to k non-empty remainders below `node`, by frequency descending and
  // then lexicographically ascending.
  std::vector<Completion> TopK(NodeId node, std::size_t k) const;

  void Serialize(ContainerWriter& out) const;
  static CharTrie Deserialize(const ContainerReader& in);

 private:
  std::vector<char32_t> label_;
  std::vector<std::uint32_t> child_begin_;
  std::vector<std::uint32_t> pass_;
  std::vector<std::uint32_t> terminal_;
  std::vector<std::uint32_t> best_;  // max terminal count in the subtree
  std::size_t max_len_ = kDefaultMaxLen;
};

// Character trie over word-aligned suffixes that occur at least `min_freq`
// times in the training corpus.
class SuffixTrie {
 public:
  static SuffixTrie Build(const std::vector<std::string>& utterances, std::uint32_t min_freq = 2,
                          std::size_t max_len = kDefaultMaxLen);

  const CharTrie& trie() const { return trie_; }
  std::uint32_t min_freq() const { return min_freq_; }

  void Serialize(ContainerWriter& out) const;
  static SuffixTrie Deserialize(const ContainerReader& in);

 private:
  CharTrie trie_;
  std::uint32_t min_freq_ = 2;
};

ContainerWriter ToContainer(const CharTrie& trie, std::uint64_t fingerprint);
ContainerWriter ToContainer(const SuffixTrie& trie, std::uint64_t fingerprint);

std::vector<Completion> MpcTopK(const CharTrie& trie, std::string_view prefix,
                                std::size_t k = kDefaultTopK);

// frequency / sibling_total, where sibling_total is the completion mass under
// the prefix node.
double MpcConfidence(std::uint32_t frequency, std::uint32_t sibling_total);

// Scored candidates as used for ranking and reranking.
struct Ranked {
  std::vector<Candidate> candidates;
  Source source = Source::kMpc;
  // For MPC++: true when the suffix trie answered, with the matched tail.
  bool from_suffix = false;
  std::string matched_tail;
};

Ranked MpcCandidates(const CharTrie& trie, std::string_view prefix, std::size_t k = kDefaultTopK);
Ranked MpcppCandidates(const CharTrie& main, const SuffixTrie& suffix, std::string_view prefix,
                       std::size_t k = kDefaultTopK);

Suggestion MpcSuggest(const CharTrie& trie, std::string_view prefix);
Suggestion MpcppSuggest(const CharTrie& main, const SuffixTrie& suffix, std::string_view prefix,
                        std::size_t k = kDefaultTopK);

}  // namespace ghost::trie
