// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/vocabulary.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "ghost/text.hpp"

namespace ghost::ngram {

namespace {

std::string Describe(char32_t c) {
  std::string s = "'";
  text::AppendUtf8(s, c);
  s += "' (U+";
  static const char* kHex = "0123456789ABCDEF";
  std::string hex;
  for (char32_t v = c; v > 0 || hex.size() < 4; v >>= 4) hex.insert(hex.begin(), kHex[v & 0xF]);
  return s + hex + ")";
}

using Pair = std::pair<TokenId, TokenId>;

struct PairHash {
  std::size_t operator()(const Pair& p) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(p.first) << 32) | p.second);
  }
};

}  // namespace

EncodeError::EncodeError(char32_t c, std::size_t offset)
    : Error("character " + Describe(c) + " at offset " + std::to_string(offset) + " is not in the vocabulary"),
      character_(c),
      offset_(offset) {}

std::vector<std::u32string> SplitPieces(std::u32string_view s) {
  std::vector<std::u32string> pieces;
  std::size_t begin = 0;
  for (std::size_t start : text::WordStarts(s)) {
    if (start == 0) continue;
    pieces.emplace_back(s.substr(begin, start - begin));
    begin = start;
  }
  if (begin < s.size()) pieces.emplace_back(s.substr(begin));
  return pieces;
}

SubwordVocabulary SubwordVocabulary::Learn(const std::vector<std::string>& utterances, std::size_t target_size) {
  std::map<std::u32string, std::uint64_t> piece_freq;
  std::set<char32_t> alphabet;
  for (const auto& u : utterances) {
    const std::u32string chars = text::Decode(u);
    for (char32_t c : chars) alphabet.insert(c);
    for (auto& p : SplitPieces(chars)) ++piece_freq[std::move(p)];
  }
  if (alphabet.empty()) throw Error("cannot learn a vocabulary from an empty corpus");
  if (target_size < alphabet.size()) {
    throw Error("vocabulary size " + std::to_string(target_size) + " is smaller than the alphabet (" +
                std::to_string(alphabet.size()) + " characters)");
  }

  SubwordVocabulary v;
  v.surfaces_ = {U"", U""};
  std::unordered_map<char32_t, TokenId> char_id;
  for (char32_t c : alphabet) {
    char_id[c] = static_cast<TokenId>(v.surfaces_.size());
    v.surfaces_.push_back(std::u32string(1, c));
  }

  std::vector<std::vector<TokenId>> words;
  std::vector<std::uint64_t> freq;
  for (const auto& [piece, f] : piece_freq) {
    std::vector<TokenId> w;
    for (char32_t c : piece) w.push_back(char_id[c]);
    words.push_back(std::move(w));
    freq.push_back(f);
  }

  std::unordered_map<Pair, std::int64_t, PairHash> counts;
  std::unordered_map<Pair, std::set<std::size_t>, PairHash> where;
  auto account = [&](std::size_t wi, std::int64_t sign) {
    const auto& w = words[wi];
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      const Pair p{w[i], w[i + 1]};
      counts[p] += sign * static_cast<std::int64_t>(freq[wi]);
      if (sign > 0) where[p].insert(wi);
    }
  };
  for (std::size_t wi = 0; wi < words.size(); ++wi) account(wi, +1);

  // Max-heap on (count, then smaller surfaces first); stale entries are
  // skipped when popped.
  struct Entry {
    std::int64_t count;
    Pair pair;
  };
  auto later = [&v](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count < b.count;
    const auto& al = v.surfaces_[a.pair.first];
    const auto& bl = v.surfaces_[b.pair.first];
    if (al != bl) return al > bl;
    return v.surfaces_[a.pair.second] > v.surfaces_[b.pair.second];
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> heap(later);
  for (const auto& [p, c] : counts) {
    if (c > 0) heap.push({c, p});
  }

  while (v.surfaces_.size() - kFirstRegular < target_size && !heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    const auto it = counts.find(top.pair);
    if (it == counts.end() || it->second != top.count) continue;
    if (top.count < 2) break;

    const Pair pair = top.pair;
    const TokenId merged = static_cast<TokenId>(v.surfaces_.size());
    v.surfaces_.push_back(v.surfaces_[pair.first] + v.surfaces_[pair.second]);
    v.merges_.push_back(pair);

    std::set<Pair> touched;
    // May hold words that no longer contain the pair; re-merging those is a no-op.
    const std::set<std::size_t> affected = where[pair];
    for (std::size_t wi : affected) {
      auto& w = words[wi];
      for (std::size_t i = 0; i + 1 < w.size(); ++i) touched.insert({w[i], w[i + 1]});
      account(wi, -1);
      std::vector<TokenId> out;
      out.reserve(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (i + 1 < w.size() && w[i] == pair.first && w[i + 1] == pair.second) {
          out.push_back(merged);
          ++i;
        } else {
          out.push_back(w[i]);
        }
      }
      w = std::move(out);
      account(wi, +1);
      for (std::size_t i = 0; i + 1 < w.size(); ++i) touched.insert({w[i], w[i + 1]});
    }
    for (const auto& p : touched) {
      auto c = counts.find(p);
      if (c == counts.end()) continue;
      if (c->second <= 0) {
        counts.erase(c);
        where.erase(p);
        continue;
      }
      heap.push({c->second, p});
    }
  }
  v.Index();
  return v;
}

SubwordVocabulary SubwordVocabulary::FromSurfaces(const std::vector<std::string>& surfaces) {
  SubwordVocabulary v;
  v.surfaces_ = {U"", U""};
  std::set<std::u32string> seen;
  std::set<char32_t> chars;
  for (const auto& s : surfaces) {
    auto u = text::Decode(s);
    if (u.empty() || !seen.insert(u).second) throw Error("vocabulary surfaces must be distinct and non-empty");
    for (char32_t c : u) chars.insert(c);
  }
  for (char32_t c : chars) {
    if (!seen.contains(std::u32string(1, c))) {
      throw Error("vocabulary lacks single-character token " + Describe(c));
    }
  }
  for (const auto& s : surfaces) v.surfaces_.push_back(text::Decode(s));
  v.Index();
  return v;
}

void SubwordVocabulary::Index() {
  nodes_.assign(1, Node{});
  for (TokenId id = kFirstRegular; id < surfaces_.size(); ++id) {
    std::uint32_t n = 0;
    for (char32_t c : surfaces_[id]) {
      auto it = nodes_[n].next.find(c);
      if (it == nodes_[n].next.end()) {
        nodes_.push_back(Node{});
        const auto child = static_cast<std::uint32_t>(nodes_.size() - 1);
        nodes_[n].next.emplace(c, child);
        n = child;
      } else {
        n = it->second;
      }
    }
    nodes_[n].terminal = true;
    nodes_[n].token = id;
  }
}

bool SubwordVocabulary::HasChar(char32_t c) const {
  if (nodes_.empty()) return false;
  auto it = nodes_[0].next.find(c);
  return it != nodes_[0].next.end() && nodes_[it->second].terminal;
}

std::vector<TokenId> SubwordVocabulary::Encode(std::u32string_view s) const {
  std::vector<TokenId> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::uint32_t n = 0;
    std::size_t best_len = 0;
    TokenId best = 0;
    for (std::size_t j = i; j < s.size(); ++j) {
      auto it = nodes_[n].next.find(s[j]);
      if (it == nodes_[n].next.end()) break;
      n = it->second;
      if (nodes_[n].terminal) {
        best = nodes_[n].token;
        best_len = j - i + 1;
      }
    }
    if (best_len == 0) throw EncodeError(s[i], i);
    out.push_back(best);
    i += best_len;
  }
  return out;
}

std::vector<TokenId> SubwordVocabulary::Encode(std::string_view utf8) const { return Encode(text::Decode(utf8)); }

std::string SubwordVocabulary::Decode(std::span<const TokenId> tokens) const {
  std::u32string out;
  for (TokenId t : tokens) out += surfaces_.at(t);
  return text::Encode(out);
}

void SubwordVocabulary::Serialize(ContainerWriter& out) const {
  std::vector<std::string> regular;
  for (TokenId id = kFirstRegular; id < surfaces_.size(); ++id) regular.push_back(text::Encode(surfaces_[id]));
  out.PutStrings("vocab.surfaces", regular);
  std::vector<std::uint32_t> flat;
  for (const auto& [a, b] : merges_) {
    flat.push_back(a);
    flat.push_back(b);
  }
  out.PutU32("vocab.merges", flat);
}

SubwordVocabulary SubwordVocabulary::Deserialize(const ContainerReader& in) {
  SubwordVocabulary v = FromSurfaces(in.Strings("vocab.surfaces"));
  const auto flat = in.U32("vocab.merges");
  if (flat.size() % 2 != 0) throw Error(in.source() + ": bad merge table");
  for (std::size_t i = 0; i < flat.size(); i += 2) v.merges_.push_back({flat[i], flat[i + 1]});
  return v;
}

}  // namespace ghost::ngram
