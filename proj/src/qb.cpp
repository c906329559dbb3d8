// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/qb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "ghost/error.hpp"
#include "ghost/text.hpp"

namespace ghost::ngram {

StopPolicy StopPolicy::MaxWords(std::size_t t) {
  if (t < 1) throw Error("word budget must be at least 1");
  StopPolicy p;
  p.kind = Kind::kMaxWords;
  p.max_words = t;
  return p;
}

StopPolicy StopPolicy::Entropy(double threshold) {
  if (!(threshold > 0.0)) throw Error("entropy threshold must be positive");
  StopPolicy p;
  p.kind = Kind::kEntropy;
  p.threshold = threshold;
  return p;
}

void WordState::Append(std::u32string_view chars) {
  for (char32_t c : chars) {
    const bool space = text::IsSpace(c);
    if (!space && after_space) ++words;
    after_space = space;
  }
}

PrefixSplit SplitPrefix(std::u32string_view prefix) {
  std::size_t cut = 0;
  for (std::size_t start : text::WordStarts(prefix)) cut = start;
  // After trailing whitespace the next word has not started yet.
  if (!prefix.empty() && text::IsSpace(prefix.back())) cut = prefix.size();
  return {std::u32string(prefix.substr(0, cut)), std::u32string(prefix.substr(cut))};
}

namespace {

struct Hyp {
  std::vector<TokenId> context;  // last order-1 tokens
  std::u32string surface;        // everything generated, fragment included
  double cum_nll = 0.0;
  std::size_t tokens = 0;
  WordState words;  // over the suggestion part only
  std::vector<TokenId> path;  // emitted tokens, end-of-utterance excluded
};

struct Finished {
  double score = 0.0;
  std::vector<TokenId> path;
};

}  // namespace

QbResult QbCandidates(const QbModel& model, std::string_view prefix_utf8, const SearchOptions& options) {
  QbResult result;
  const std::u32string prefix = text::Decode(prefix_utf8);
  if (prefix.empty()) {
    result.abstain_reason = "empty prefix";
    return result;
  }
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!model.vocab.HasChar(prefix[i])) {
      result.abstain_reason = EncodeError(prefix[i], i).what();
      return result;
    }
  }
  const auto& lm = model.lm;
  const PrefixSplit split = SplitPrefix(prefix);
  const std::u32string& frag = split.fragment;
  const std::size_t window = lm.order() - 1;

  Hyp init;
  init.context.push_back(kBos);
  for (TokenId t : model.vocab.Encode(split.body)) init.context.push_back(t);
  if (init.context.size() > window) init.context.erase(init.context.begin(), init.context.end() - window);

  std::unordered_map<std::u32string, Finished> finished;  // suggestion -> best path
  // Scores of finished texts only ever rise, so anything below the current
  // k-th best distinct score can never reach the top-k.
  double floor = -std::numeric_limits<double>::infinity();
  auto finish_with = [&](const std::u32string& surface, double cum_nll, std::size_t tokens,
                         const std::vector<TokenId>& path) {
    if (surface.size() <= frag.size() || tokens == 0) return;
    const double score = -(cum_nll / static_cast<double>(tokens));
    if (score < floor) return;
    auto [it, inserted] = finished.try_emplace(surface.substr(frag.size()), Finished{score, path});
    if (!inserted && score > it->second.score) it->second = Finished{score, path};
  };
  auto finish = [&](const Hyp& h) { finish_with(h.surface, h.cum_nll, h.tokens, h.path); };
  auto raise_floor = [&] {
    if (options.top_k == 0 || finished.size() < options.top_k) return;
    std::vector<double> scores;
    scores.reserve(finished.size());
    for (const auto& [t, f] : finished) scores.push_back(f.score);
    std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(options.top_k - 1), scores.end(),
                     std::greater<>());
    floor = scores[options.top_k - 1];
  };
  auto push_context = [window](std::vector<TokenId> ctx, TokenId t) {
    ctx.push_back(t);
    if (ctx.size() > window) ctx.erase(ctx.begin(), ctx.end() - window);
    return ctx;
  };

  const bool word_budget = options.stop.kind == StopPolicy::Kind::kMaxWords;
  const bool entropy_stop = options.stop.kind == StopPolicy::Kind::kEntropy;
  std::vector<Hyp> live{init};
  std::vector<char> is_explicit(lm.vocab_size(), 0);

  // Expansions are kept as light records and only the survivors of beam
  // pruning are materialized.
  struct Child {
    std::uint32_t parent;
    TokenId token;
    double cum_nll;
    WordState words;
  };
  auto child_before = [&](const Child& a, const Child& b) {
    if (a.cum_nll != b.cum_nll) return a.cum_nll < b.cum_nll;
    const Hyp& pa = live[a.parent];
    const Hyp& pb = live[b.parent];
    const std::u32string sa = pa.surface + model.vocab.surface(a.token);
    const std::u32string sb = pb.surface + model.vocab.surface(b.token);
    if (sa != sb) return sa < sb;
    return push_context(pa.context, a.token) < push_context(pb.context, b.token);
  };

  while (!live.empty()) {
    std::vector<Child> next;
    for (std::uint32_t hi = 0; hi < live.size(); ++hi) {
      const Hyp& h = live[hi];
      const bool consumed = h.surface.size() >= frag.size();
      const auto chain = lm.Lookup(h.context);
      if (consumed && word_budget && h.words.words >= options.stop.max_words) finish(h);

      // Returns true when the token produced a live hypothesis.
      auto expand = [&](TokenId w) -> bool {
        const double p = lm.Prob(chain, w);
        if (!(p > 0.0)) return false;
        const double nll = -std::log(p);
        if (w == kEos) {
          if (consumed) {
            finish_with(h.surface, h.cum_nll + nll, h.tokens + 1, h.path);
          }
          return false;
        }
        const std::u32string& piece = model.vocab.surface(w);
        const std::size_t old_len = h.surface.size();
        // Admissible iff the new surface and the fragment agree on their overlap.
        if (old_len < frag.size()) {
          const std::size_t overlap = std::min(piece.size(), frag.size() - old_len);
          if (std::u32string_view(piece).substr(0, overlap) !=
              std::u32string_view(frag).substr(old_len, overlap)) {
            return false;
          }
        }
        const std::size_t sugg_begin = old_len >= frag.size() ? 0 : frag.size() - old_len;
        WordState words = h.words;
        if (sugg_begin < piece.size()) words.Append(std::u32string_view(piece).substr(sugg_begin));
        if (word_budget && words.words > options.stop.max_words) return false;

        const std::size_t new_len = old_len + piece.size();
        const std::size_t new_tokens = h.tokens + 1;
        if (new_len < frag.size() && new_tokens >= options.fragment_tokens) return false;
        const std::size_t sugg_len = new_len > frag.size() ? new_len - frag.size() : 0;
        if (sugg_len >= options.max_chars || (options.max_tokens > 0 && new_tokens >= options.max_tokens)) {
          if (-((h.cum_nll + nll) / static_cast<double>(new_tokens)) >= floor) {
            std::vector<TokenId> path = h.path;
            path.push_back(w);
            finish_with(h.surface + piece, h.cum_nll + nll, new_tokens, path);
          }
          return false;
        }
        next.push_back({hi, w, h.cum_nll + nll, words});
        return true;
      };

      const auto explicit_tokens = lm.ExplicitTokens(chain);
      for (TokenId w : explicit_tokens) is_explicit[w] = 1;
      for (TokenId w : explicit_tokens) expand(w);
      if (!is_explicit[kEos]) expand(kEos);
      // Off-chain tokens all share one scale, so the unigram order ranks them;
      // at most beam_width of them can survive pruning.
      std::size_t taken = 0;
      for (TokenId w : lm.unigram_order()) {
        if (taken >= options.beam_width) break;
        if (is_explicit[w] || w == kEos) continue;
        if (expand(w)) ++taken;
      }
      for (TokenId w : explicit_tokens) is_explicit[w] = 0;
    }
    if (next.size() > options.beam_width) {
      std::partial_sort(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(options.beam_width), next.end(),
                        child_before);
      next.resize(options.beam_width);
    }
    std::vector<Hyp> survivors;
    survivors.reserve(next.size());
    for (const Child& c : next) {
      const Hyp& parent = live[c.parent];
      Hyp n;
      n.context = push_context(parent.context, c.token);
      n.surface = parent.surface + model.vocab.surface(c.token);
      n.cum_nll = c.cum_nll;
      n.tokens = parent.tokens + 1;
      n.words = c.words;
      n.path = parent.path;
      n.path.push_back(c.token);
      survivors.push_back(std::move(n));
    }
    live = std::move(survivors);
    raise_floor();
  }

  std::vector<std::pair<std::u32string, Finished>> ranked(std::make_move_iterator(finished.begin()),
                                                          std::make_move_iterator(finished.end()));
  const std::size_t keep = std::min(ranked.size(), options.top_k);
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second.score != b.second.score) return a.second.score > b.second.score;
                      return a.first < b.first;
                    });
  ranked.resize(keep);

  // Entropy stopping replays each path and halts before the first token
  // whose predictive distribution is too flat. The first suggestion token is
  // always kept, and ranks stay those of the unstopped search.
  auto stop_early = [&](const std::vector<TokenId>& path, std::u32string& text, double& score) {
    std::vector<TokenId> ctx = init.context;
    std::u32string surface;
    double cum_nll = 0.0;
    std::size_t i = 0;
    for (; i < path.size(); ++i) {
      const auto chain = lm.Lookup(ctx);
      if (surface.size() > frag.size() && lm.Entropy(chain) > options.stop.threshold) break;
      cum_nll -= std::log(lm.Prob(chain, path[i]));
      surface += model.vocab.surface(path[i]);
      ctx = push_context(std::move(ctx), path[i]);
    }
    if (i == path.size()) return;
    text = surface.substr(frag.size());
    score = -(cum_nll / static_cast<double>(i));
  };
  std::unordered_set<std::u32string> emitted;
  for (auto& [t, f] : ranked) {
    std::u32string text = t;
    double score = f.score;
    if (entropy_stop) stop_early(f.path, text, score);
    if (!emitted.insert(text).second) continue;
    result.candidates.push_back({text::Encode(text), score});
  }
  if (result.candidates.empty()) result.abstain_reason = "no admissible hypothesis finished";
  return result;
}

Suggestion QbSuggest(const QbModel& model, std::string_view prefix, const SearchOptions& options) {
  QbResult r = QbCandidates(model, prefix, options);
  if (r.candidates.empty()) return Abstain(Source::kQb, std::move(r.abstain_reason));
  return MakeSuggestion(std::move(r.candidates.front().text), r.candidates.front().score, Source::kQb);
}

}  // namespace ghost::ngram
