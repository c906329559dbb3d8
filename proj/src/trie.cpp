// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/trie.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <unordered_map>

#include "ghost/error.hpp"
#include "ghost/text.hpp"

namespace ghost::trie {

namespace {

struct Range {
  CharTrie::NodeId node;
  std::size_t lo, hi, depth;
};

}  // namespace

CharTrie::CharTrie() : label_{0}, child_begin_{1, 1}, pass_{0}, terminal_{0}, best_{0} {}

CharTrie CharTrie::Build(const std::vector<std::string>& strings, std::size_t max_len) {
  std::vector<std::pair<std::u32string, std::uint32_t>> counted;
  counted.reserve(strings.size());
  for (const auto& s : strings) counted.emplace_back(text::Decode(s), 1);
  return FromCounts(std::move(counted), max_len);
}

CharTrie CharTrie::FromCounts(std::vector<std::pair<std::u32string, std::uint32_t>> counted,
                              std::size_t max_len) {
  for (auto& [s, c] : counted) {
    if (s.size() > max_len) s.resize(max_len);
  }
  std::sort(counted.begin(), counted.end());
  // Merge duplicates.
  std::size_t w = 0;
  for (std::size_t r = 0; r < counted.size(); ++r) {
    if (w > 0 && counted[w - 1].first == counted[r].first) {
      counted[w - 1].second += counted[r].second;
    } else {
      if (w != r) counted[w] = std::move(counted[r]);
      ++w;
    }
  }
  counted.resize(w);

  CharTrie t;
  t.max_len_ = max_len;
  t.label_.assign(1, 0);
  t.child_begin_.clear();
  t.pass_.clear();
  t.terminal_.clear();

  std::deque<Range> queue;
  queue.push_back({kRoot, 0, counted.size(), 0});
  NodeId next_id = 1;
  while (!queue.empty()) {
    const Range r = queue.front();
    queue.pop_front();
    std::uint64_t pass = 0;
    for (std::size_t i = r.lo; i < r.hi; ++i) pass += counted[i].second;
    std::uint32_t terminal = 0;
    std::size_t i = r.lo;
    // Sorted order puts the string equal to this node's path first.
    if (i < r.hi && counted[i].first.size() == r.depth) terminal = counted[i++].second;
    t.pass_.push_back(static_cast<std::uint32_t>(pass));
    t.terminal_.push_back(terminal);
    t.child_begin_.push_back(next_id);
    while (i < r.hi) {
      const char32_t c = counted[i].first[r.depth];
      std::size_t j = i + 1;
      while (j < r.hi && counted[j].first[r.depth] == c) ++j;
      t.label_.push_back(c);
      queue.push_back({next_id++, i, j, r.depth + 1});
      i = j;
    }
  }
  t.child_begin_.push_back(next_id);

  t.best_.assign(t.label_.size(), 0);
  for (std::size_t n = t.label_.size(); n-- > 0;) {
    std::uint32_t best = t.terminal_[n];
    for (NodeId c = t.child_begin_[n]; c < t.child_begin_[n + 1]; ++c) best = std::max(best, t.best_[c]);
    t.best_[n] = best;
  }
  return t;
}

CharTrie::NodeId CharTrie::Child(NodeId node, char32_t c) const {
  const auto first = label_.begin() + child_begin_[node];
  const auto last = label_.begin() + child_begin_[node + 1];
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return kNone;
  return static_cast<NodeId>(it - label_.begin());
}

CharTrie::NodeId CharTrie::Find(std::u32string_view path, NodeId from) const {
  NodeId n = from;
  for (char32_t c : path) {
    n = Child(n, c);
    if (n == kNone) return kNone;
  }
  return n;
}

CharTrie::NodeId CharTrie::Find(std::string_view utf8_path) const { return Find(text::Decode(utf8_path)); }

std::vector<Completion> CharTrie::TopK(NodeId node, std::size_t k) const {
  // Best-first search. An internal entry is keyed by the best terminal count
  // in its subtree and its path, which orders it no later than any of its
  // descendants, so terminals pop in final (count desc, text asc) order.
  struct Entry {
    std::uint32_t count;
    std::u32string path;
    NodeId node;
    bool terminal;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.count != b.count) return a.count < b.count;
      if (a.path != b.path) return a.path > b.path;
      return a.terminal && !b.terminal;
    }
  };
  std::vector<Completion> out;
  if (node == kNone || k == 0) return out;
  std::priority_queue<Entry, std::vector<Entry>, Later> frontier;
  auto push_children = [&](NodeId n, const std::u32string& path) {
    for (NodeId c = child_begin_[n]; c < child_begin_[n + 1]; ++c) {
      if (best_[c] == 0) continue;
      std::u32string p = path;
      p.push_back(label_[c]);
      frontier.push({best_[c], std::move(p), c, false});
    }
  };
  push_children(node, {});
  while (!frontier.empty() && out.size() < k) {
    Entry e = frontier.top();
    frontier.pop();
    if (e.terminal) {
      out.push_back({text::Encode(e.path), e.count});
      continue;
    }
    if (terminal_[e.node] > 0) frontier.push({terminal_[e.node], e.path, e.node, true});
    push_children(e.node, e.path);
  }
  return out;
}

void CharTrie::Serialize(ContainerWriter& out) const {
  std::vector<std::uint32_t> labels(label_.begin(), label_.end());
  const std::uint32_t max_len = static_cast<std::uint32_t>(max_len_);
  out.PutU32("max_len", std::span(&max_len, 1));
  out.PutU32("label", labels);
  out.PutU32("child_begin", child_begin_);
  out.PutU32("pass", pass_);
  out.PutU32("terminal", terminal_);
  out.PutU32("best", best_);
}

CharTrie CharTrie::Deserialize(const ContainerReader& in) {
  CharTrie t;
  const auto max_len = in.U32("max_len");
  const auto labels = in.U32("label");
  t.label_.assign(labels.begin(), labels.end());
  t.child_begin_ = in.U32("child_begin");
  t.pass_ = in.U32("pass");
  t.terminal_ = in.U32("terminal");
  t.best_ = in.U32("best");
  const std::size_t n = t.label_.size();
  bool ok = max_len.size() == 1 && n >= 1 && t.child_begin_.size() == n + 1 && t.pass_.size() == n &&
            t.terminal_.size() == n && t.best_.size() == n;
  for (std::size_t i = 0; ok && i < n; ++i) {
    ok = t.child_begin_[i] <= t.child_begin_[i + 1] && t.child_begin_[i + 1] <= n &&
         t.child_begin_[i] > i;
  }
  if (!ok) throw Error(in.source() + ": inconsistent trie node table");
  t.max_len_ = max_len.front();
  return t;
}

SuffixTrie SuffixTrie::Build(const std::vector<std::string>& utterances, std::uint32_t min_freq,
                             std::size_t max_len) {
  std::unordered_map<std::u32string, std::uint32_t> counts;
  for (const auto& u : utterances) {
    const std::u32string chars = text::Decode(u);
    for (std::size_t start : text::WordStarts(chars)) ++counts[chars.substr(start)];
  }
  std::vector<std::pair<std::u32string, std::uint32_t>> kept;
  for (auto& [s, c] : counts) {
    if (c >= min_freq) kept.emplace_back(s, c);
  }
  SuffixTrie t;
  t.trie_ = CharTrie::FromCounts(std::move(kept), max_len);
  t.min_freq_ = min_freq;
  return t;
}

void SuffixTrie::Serialize(ContainerWriter& out) const {
  trie_.Serialize(out);
  out.PutU32("min_freq", std::span(&min_freq_, 1));
}

SuffixTrie SuffixTrie::Deserialize(const ContainerReader& in) {
  SuffixTrie t;
  t.trie_ = CharTrie::Deserialize(in);
  const auto mf = in.U32("min_freq");
  if (mf.size() != 1) throw Error(in.source() + ": bad min_freq section");
  t.min_freq_ = mf.front();
  return t;
}

ContainerWriter ToContainer(const CharTrie& trie, std::uint64_t fingerprint) {
  ContainerWriter w(ModelKind::kCharTrie, fingerprint);
  trie.Serialize(w);
  return w;
}

ContainerWriter ToContainer(const SuffixTrie& trie, std::uint64_t fingerprint) {
  ContainerWriter w(ModelKind::kSuffixTrie, fingerprint);
  trie.Serialize(w);
  return w;
}

std::vector<Completion> MpcTopK(const CharTrie& trie, std::string_view prefix, std::size_t k) {
  return trie.TopK(trie.Find(prefix), k);
}

double MpcConfidence(std::uint32_t frequency, std::uint32_t sibling_total) {
  if (sibling_total == 0) return 0.0;
  return static_cast<double>(frequency) / static_cast<double>(sibling_total);
}

namespace {

std::vector<Candidate> Score(const CharTrie& trie, CharTrie::NodeId node, std::size_t k) {
  std::vector<Candidate> out;
  if (node == CharTrie::kNone) return out;
  const std::uint32_t mass = trie.completion_mass(node);
  for (auto& c : trie.TopK(node, k)) out.push_back({std::move(c.text), MpcConfidence(c.frequency, mass)});
  return out;
}

Suggestion Top(const Ranked& r, std::string_view empty_reason) {
  if (r.candidates.empty()) return Abstain(r.source, std::string(empty_reason));
  return MakeSuggestion(r.candidates.front().text, r.candidates.front().score, r.source);
}

}  // namespace

Ranked MpcCandidates(const CharTrie& trie, std::string_view prefix, std::size_t k) {
  Ranked r;
  r.source = Source::kMpc;
  r.candidates = Score(trie, trie.Find(prefix), k);
  return r;
}

Ranked MpcppCandidates(const CharTrie& main, const SuffixTrie& suffix, std::string_view prefix,
                       std::size_t k) {
  Ranked r;
  r.source = Source::kMpcpp;
  const std::u32string chars = text::Decode(prefix);
  r.candidates = Score(main, main.Find(chars), k);
  if (!r.candidates.empty()) return r;
  // Left backoff: the longest word-aligned tail present in the suffix trie wins.
  for (std::size_t start : text::WordStarts(chars)) {
    const std::u32string_view tail = std::u32string_view(chars).substr(start);
    auto cands = Score(suffix.trie(), suffix.trie().Find(tail), k);
    if (!cands.empty()) {
      r.candidates = std::move(cands);
      r.from_suffix = true;
      r.matched_tail = text::Encode(tail);
      return r;
    }
  }
  return r;
}

Suggestion MpcSuggest(const CharTrie& trie, std::string_view prefix) {
  return Top(MpcCandidates(trie, prefix, 1), "prefix not in main trie");
}

Suggestion MpcppSuggest(const CharTrie& main, const SuffixTrie& suffix, std::string_view prefix,
                        std::size_t k) {
  return Top(MpcppCandidates(main, suffix, prefix, k), "no word-aligned tail in suffix trie");
}

}  // namespace ghost::trie
