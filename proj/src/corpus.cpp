// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/corpus.hpp"

#include <fstream>
#include <istream>
#include <unordered_set>

#include <json.hpp>

#include "ghost/error.hpp"
#include "ghost/text.hpp"

namespace ghost::corpus {

namespace {

using nlohmann::json;

bool BlankAfterTrim(std::string_view s) {
  for (char32_t c : text::Decode(s)) {
    if (!text::IsSpace(c)) return false;
  }
  return true;
}

void StripCr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

Dialog ParseJsonDialog(const std::string& line, bool lowercase) {
  const json obj = json::parse(line);
  if (!obj.is_object()) throw Error("record is not a JSON object");
  Dialog d;
  const auto id = obj.find("dialog_id");
  if (id == obj.end() || !id->is_string()) throw Error("missing string field 'dialog_id'");
  d.id = id->get<std::string>();
  const auto turns = obj.find("turns");
  if (turns == obj.end() || !turns->is_array()) throw Error("missing array field 'turns'");
  for (const auto& t : *turns) {
    if (!t.is_object()) throw Error("turn is not an object");
    const auto speaker = t.find("speaker");
    const auto body = t.find("text");
    if (speaker == t.end() || !speaker->is_string()) throw Error("turn without string 'speaker'");
    if (body == t.end() || !body->is_string()) throw Error("turn without string 'text'");
    DialogTurn turn;
    const auto& who = speaker->get_ref<const std::string&>();
    if (who == "human") {
      turn.speaker = Speaker::kHuman;
    } else if (who == "bot") {
      turn.speaker = Speaker::kBot;
    } else {
      throw Error("unknown speaker '" + who + "'");
    }
    turn.text = body->get<std::string>();
    if (BlankAfterTrim(turn.text)) throw Error("turn text is empty");
    if (lowercase) turn.text = text::AsciiLower(turn.text);
    d.turns.push_back(std::move(turn));
  }
  return d;
}

}  // namespace

Format ParseFormat(std::string_view name) {
  if (name == "jsonl") return Format::kJsonl;
  if (name == "lines") return Format::kLines;
  throw Error("unknown corpus format '" + std::string(name) + "' (expected jsonl or lines)");
}

std::vector<Dialog> ParseCorpus(std::istream& in, const LoadOptions& options, const std::string& source) {
  std::vector<Dialog> dialogs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    if (BlankAfterTrim(line)) continue;
    if (options.format == Format::kLines) {
      Dialog d;
      d.id = "line" + std::to_string(line_no);
      d.turns.push_back({Speaker::kHuman, options.lowercase ? text::AsciiLower(line) : line});
      dialogs.push_back(std::move(d));
      continue;
    }
    try {
      dialogs.push_back(ParseJsonDialog(line, options.lowercase));
    } catch (const std::exception& e) {
      throw Error(source + ":" + std::to_string(line_no) + ": malformed record: " + e.what());
    }
  }
  if (dialogs.empty()) throw Error(source + ": corpus is empty");
  return dialogs;
}

std::vector<Dialog> LoadCorpus(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus " + path.string());
  return ParseCorpus(in, options, path.string());
}

std::vector<ContextualUtterance> HumanUtterances(const std::vector<Dialog>& dialogs) {
  std::vector<ContextualUtterance> out;
  for (const auto& d : dialogs) {
    std::vector<std::string> history;
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
      const auto& turn = d.turns[i];
      if (turn.speaker == Speaker::kHuman) {
        out.push_back({turn.text, history, d.id + "#" + std::to_string(i)});
      }
      history.push_back(turn.text);
    }
  }
  return out;
}

std::vector<PrefixSample> ExpandPrefixSplits(std::string_view utterance,
                                             const std::vector<std::string>& context,
                                             std::string_view utterance_id) {
  const std::u32string chars = text::Decode(utterance);
  std::vector<PrefixSample> out;
  if (chars.size() < 2) return out;
  out.reserve(chars.size() - 1);
  const std::string full = text::Encode(chars);
  for (std::size_t split = 1; split < chars.size(); ++split) {
    PrefixSample s;
    s.context = context;
    s.prefix = text::Encode(std::u32string_view(chars).substr(0, split));
    s.target_completion = text::Encode(std::u32string_view(chars).substr(split));
    s.utterance = full;
    s.utterance_id = std::string(utterance_id);
    s.prefix_len_chars = split;
    out.push_back(std::move(s));
  }
  return out;
}

SeenFlags MarkSeen(const std::vector<std::string>& train, const std::vector<PrefixSample>& test,
                   bool lowercase) {
  std::unordered_set<std::string> index;
  index.reserve(train.size());
  for (const auto& u : train) index.insert(lowercase ? text::AsciiLower(u) : u);
  SeenFlags flags;
  for (const auto& s : test) {
    const std::string key = lowercase ? text::AsciiLower(s.utterance) : s.utterance;
    flags[s.utterance_id] = index.contains(key);
  }
  return flags;
}

CorpusSplit MakeSplit(const std::vector<Dialog>& train, const std::vector<Dialog>& test, bool lowercase) {
  CorpusSplit split;
  split.train_utterances = HumanUtterances(train);
  std::vector<std::string> train_text;
  train_text.reserve(split.train_utterances.size());
  for (const auto& u : split.train_utterances) train_text.push_back(u.utterance);
  for (const auto& u : HumanUtterances(test)) {
    auto samples = ExpandPrefixSplits(u.utterance, u.context, u.utterance_id);
    split.test_samples.insert(split.test_samples.end(), std::make_move_iterator(samples.begin()),
                              std::make_move_iterator(samples.end()));
  }
  split.seen_flags = MarkSeen(train_text, split.test_samples, lowercase);
  return split;
}

Bucket BucketOf(std::size_t n) {
  if (n <= 5) return Bucket::k1To5;
  if (n <= 12) return Bucket::k6To12;
  if (n <= 25) return Bucket::k13To25;
  if (n <= 50) return Bucket::k26To50;
  return Bucket::kOut;
}

std::string_view BucketName(Bucket bucket) {
  switch (bucket) {
    case Bucket::k1To5: return "1-5";
    case Bucket::k6To12: return "6-12";
    case Bucket::k13To25: return "13-25";
    case Bucket::k26To50: return "26-50";
    case Bucket::kOut: return "51+";
  }
  return "?";
}

std::string SerializeContext(const std::vector<std::string>& context) {
  return text::Join(context, " <eou> ");
}

}  // namespace ghost::corpus
