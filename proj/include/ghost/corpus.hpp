// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ghost::corpus {

enum class Speaker { kHuman, kBot };

struct DialogTurn {
  Speaker speaker = Speaker::kHuman;
  std::string text;
};

struct Dialog {
  std::string id;
  std::vector<DialogTurn> turns;
};

enum class Format { kJsonl, kLines };

Format ParseFormat(std::string_view name);

struct LoadOptions {
  Format format = Format::kJsonl;
  // Exact match is the default; case folding is opt-in.
  bool lowercase = false;
};

// Dialogs in file order. Throws ghost::Error naming the 1-based line of the
// first malformed record, or when the file holds no dialogs.
std::vector<Dialog> LoadCorpus(const std::filesystem::path& path, const LoadOptions& options = {});
std::vector<Dialog> ParseCorpus(std::istream& in, const LoadOptions& options,
                                const std::string& source = "<stream>");

// A human turn together with every turn that preceded it in its dialog.
struct ContextualUtterance {
  std::string utterance;
  std::vector<std::string> context;
  std::string utterance_id;
};

std::vector<ContextualUtterance> HumanUtterances(const std::vector<Dialog>& dialogs);

struct PrefixSample {
  std::vector<std::string> context;
  std::string prefix;
  std::string target_completion;
  std::string utterance;
  std::string utterance_id;
  std::size_t prefix_len_chars = 0;
};

// One sample per split point after characters 1..l-1. Utterances shorter
// than two characters yield nothing.
std::vector<PrefixSample> ExpandPrefixSplits(std::string_view utterance,
                                             const std::vector<std::string>& context,
                                             std::string_view utterance_id = {});

using SeenFlags = std::unordered_map<std::string, bool>;

// utterance_id -> whether the sample's full utterance occurs verbatim in `train`.
SeenFlags MarkSeen(const std::vector<std::string>& train, const std::vector<PrefixSample>& test,
                   bool lowercase = false);

struct CorpusSplit {
  std::vector<ContextualUtterance> train_utterances;
  std::vector<PrefixSample> test_samples;
  SeenFlags seen_flags;
};

CorpusSplit MakeSplit(const std::vector<Dialog>& train, const std::vector<Dialog>& test,
                      bool lowercase = false);

enum class Bucket { k1To5, k6To12, k13To25, k26To50, kOut };

inline constexpr Bucket kReportedBuckets[] = {Bucket::k1To5, Bucket::k6To12, Bucket::k13To25,
                                              Bucket::k26To50};

Bucket BucketOf(std::size_t prefix_len_chars);
std::string_view BucketName(Bucket bucket);

// Prior turns joined with " <eou> " for string-based consumers.
std::string SerializeContext(const std::vector<std::string>& context);

}  // namespace ghost::corpus
