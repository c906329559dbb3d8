// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "synth.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

namespace ghost::testing {

namespace {

const char* const kSyllables[] = {"ka", "lo", "mi", "ne", "ru", "ta", "so", "vi", "de", "po",
                                  "an", "el", "is", "or", "un", "ba", "ge", "hu", "ji", "fe"};

const char* const kStock[] = {
    "thank you .",        "how are you ?",          "that sounds great !", "see you later .",
    "what do you mean ?", "i am not sure .",        "good morning .",      "yes , of course .",
    "no problem .",       "what time is it now ?",  "i see .",             "really ?",
    "sounds good to me .", "where are you going ?", "nice to meet you .",  "have a nice day !",
};

const char* const kOpeners[] = {"i think", "do you", "can you", "what about", "let's", "i would like to",
                                "how about", "it is", "we should", "are you"};

const char* const kEnds[] = {" .", " ?", " !", " ."};

class Generator {
 public:
  Generator(const SynthOptions& o) : options_(o), rng_(o.seed) {
    std::mt19937_64 words_rng(0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<std::size_t> syl(0, std::size(kSyllables) - 1);
    std::uniform_int_distribution<int> len(1, 3);
    while (words_.size() < o.vocabulary) {
      std::string w;
      for (int i = len(words_rng); i > 0; --i) w += kSyllables[syl(words_rng)];
      words_.push_back(w);
    }
    double total = 0;
    for (std::size_t r = 1; r <= words_.size(); ++r) {
      total += 1.0 / static_cast<double>(r);
      cdf_.push_back(total);
    }
    for (double& c : cdf_) c /= total;
  }

  std::string Word() {
    const double u = std::uniform_real_distribution<double>(0, 1)(rng_);
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return words_[std::min<std::size_t>(it - cdf_.begin(), words_.size() - 1)];
  }

  std::string Turn() {
    if (std::bernoulli_distribution(options_.stock_rate)(rng_)) {
      return kStock[Pick(std::size(kStock))];
    }
    std::string s = kOpeners[Pick(std::size(kOpeners))];
    const std::size_t n = 1 + Pick(9);
    for (std::size_t i = 0; i < n; ++i) {
      s += ' ';
      s += Word();
      if (i + 1 < n && Pick(8) == 0) s += " ,";
    }
    s += kEnds[Pick(std::size(kEnds))];
    return s;
  }

  std::size_t Pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  std::vector<corpus::Dialog> Dialogs() {
    std::vector<corpus::Dialog> out;
    for (std::size_t d = 0; d < options_.dialogs; ++d) {
      corpus::Dialog dialog;
      dialog.id = "synth-" + std::to_string(options_.seed) + "-" + std::to_string(d);
      const std::size_t turns = options_.min_turns + Pick(options_.max_turns - options_.min_turns + 1);
      for (std::size_t t = 0; t < turns; ++t) {
        dialog.turns.push_back({t % 2 == 0 ? corpus::Speaker::kHuman : corpus::Speaker::kBot, Turn()});
      }
      out.push_back(std::move(dialog));
    }
    return out;
  }

 private:
  SynthOptions options_;
  std::mt19937_64 rng_;
  std::vector<std::string> words_;
  std::vector<double> cdf_;
};

}  // namespace

std::vector<corpus::Dialog> SynthDialogs(const SynthOptions& options) { return Generator(options).Dialogs(); }

std::vector<std::string> SynthUtterances(std::size_t n, std::uint64_t seed) {
  SynthOptions o;
  o.seed = seed;
  o.dialogs = n / 2 + 8;
  o.min_turns = 2;
  o.max_turns = 6;
  std::vector<std::string> out;
  while (out.size() < n) {
    for (const auto& u : corpus::HumanUtterances(SynthDialogs(o))) {
      if (out.size() == n) break;
      out.push_back(u.utterance);
    }
    ++o.seed;
  }
  return out;
}

std::filesystem::path TempDir(const std::string& name) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("ghost-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void WriteJsonl(const std::vector<corpus::Dialog>& dialogs, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  for (const auto& d : dialogs) {
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& t : d.turns) {
      turns.push_back({{"speaker", t.speaker == corpus::Speaker::kHuman ? "human" : "bot"}, {"text", t.text}});
    }
    f << nlohmann::json{{"dialog_id", d.id}, {"turns", turns}}.dump() << "\n";
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace ghost::testing
