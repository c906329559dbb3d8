// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#include "ghost/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>
#include <unordered_map>

#include "ghost/container.hpp"
#include "ghost/corpus.hpp"
#include "ghost/engine.hpp"
#include "ghost/eval.hpp"
#include "ghost/ngram.hpp"
#include "ghost/report.hpp"
#include "ghost/rerank.hpp"
#include "ghost/service.hpp"
#include "ghost/trie.hpp"

namespace ghost::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CorpusFlags {
  std::string format = "jsonl";
  bool lowercase = false;

  corpus::LoadOptions Options() const { return {corpus::ParseFormat(format), lowercase}; }
};

struct EngineFlags {
  std::vector<std::string> indices;
  std::size_t k = trie::kDefaultTopK;
  std::size_t beam_width = 10;
  std::size_t max_chars = 256;
  double alpha = 0.5, beta = 0.3, gamma = 0.2;

  std::shared_ptr<Engine> Load() const {
    EngineOptions o;
    o.k = k;
    o.beam_width = beam_width;
    o.max_chars = max_chars;
    o.rerank = {alpha, beta, gamma, k};
    auto engine = std::make_shared<Engine>(o);
    for (const auto& p : indices) engine->LoadIndex(p);
    return engine;
  }
};

struct RequestFlags {
  std::string model = "mpc";
  bool rerank = false;
  std::optional<double> entropy;
  std::optional<std::size_t> max_words;
  std::optional<double> min_confidence;

  SuggestRequest Base() const {
    SuggestRequest r;
    r.model = ParseModel(model);
    r.rerank = rerank;
    if (entropy) r.stop = ngram::StopPolicy::Entropy(*entropy);
    if (max_words) r.stop = ngram::StopPolicy::MaxWords(*max_words);
    r.min_confidence = min_confidence;
    return r;
  }
};

void AddCorpusFlags(CLI::App* app, CorpusFlags& f) {
  app->add_option("--format", f.format, "Corpus format: jsonl or lines")->check(CLI::IsMember({"jsonl", "lines"}));
  app->add_flag("--lowercase", f.lowercase, "Lowercase ASCII letters on load");
}

void AddEngineFlags(CLI::App* app, EngineFlags& f, bool require_index) {
  auto* idx = app->add_option("--index", f.indices, "Index or model file (repeatable)");
  if (require_index) idx->required();
  app->add_option("--k", f.k, "Candidates per query")->check(CLI::PositiveNumber);
  app->add_option("--beam-width", f.beam_width, "Beam width for the n-gram model")->check(CLI::PositiveNumber);
  app->add_option("--max-chars", f.max_chars, "Maximum generated characters")->check(CLI::PositiveNumber);
  app->add_option("--alpha", f.alpha, "Rerank weight of the model score")->check(CLI::NonNegativeNumber);
  app->add_option("--beta", f.beta, "Rerank weight of context similarity")->check(CLI::NonNegativeNumber);
  app->add_option("--gamma", f.gamma, "Rerank weight of the length penalty")->check(CLI::NonNegativeNumber);
}

void AddRequestFlags(CLI::App* app, RequestFlags& f) {
  app->add_option("--model", f.model, "mpc, mpcpp or qb")->check(CLI::IsMember({"mpc", "mpcpp", "qb"}));
  app->add_flag("--rerank", f.rerank, "Rerank candidates against the context");
  auto* e = app->add_option("--entropy-threshold,--entropy", f.entropy, "Entropy stop threshold in nats");
  e->check(CLI::PositiveNumber);
  auto* w = app->add_option("--max-words", f.max_words, "Stop after this many words")->check(CLI::Range(1, 10));
  e->excludes(w);
  app->add_option("--min-confidence", f.min_confidence, "Hide suggestions scoring below this");
}

std::vector<std::string> TrainUtterances(const std::vector<corpus::Dialog>& dialogs) {
  std::vector<std::string> out;
  for (auto& u : corpus::HumanUtterances(dialogs)) out.push_back(std::move(u.utterance));
  return out;
}

std::vector<std::string> AllTurns(const std::vector<corpus::Dialog>& dialogs) {
  std::vector<std::string> out;
  for (const auto& d : dialogs) {
    for (const auto& t : d.turns) out.push_back(t.text);
  }
  return out;
}

void WriteText(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::atomic<bool> g_stop{false};
extern "C" void OnSignal(int) { g_stop.store(true); }

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chat ghosting engine: build indices, train, evaluate, benchmark and serve suggestions"};
  app.name("ghost");
  app.set_config("--config", "", "TOML-style config file; explicit flags win");
  app.require_subcommand(1);

  CorpusFlags corpus_flags;
  EngineFlags engine_flags;
  RequestFlags request_flags;
  std::string output_dir = ".";

  // build
  auto* build = app.add_subcommand("build", "Build the main trie, suffix trie and TF-IDF index");
  std::string build_corpus;
  std::size_t max_len = trie::kDefaultMaxLen;
  std::uint32_t min_freq = 2;
  build->add_option("--corpus", build_corpus, "Training corpus")->required();
  build->add_option("--output-dir", output_dir, "Directory for index files");
  build->add_option("--max-len", max_len, "Maximum indexed characters per string")->check(CLI::PositiveNumber);
  build->add_option("--min-freq", min_freq, "Minimum suffix frequency")->check(CLI::PositiveNumber);
  AddCorpusFlags(build, corpus_flags);

  // train-ngram
  auto* train = app.add_subcommand("train-ngram", "Train the subword vocabulary and n-gram model");
  std::string train_corpus;
  ngram::TrainOptions train_opts;
  std::size_t vocab_size = ngram::kDefaultVocabSize;
  std::vector<std::uint32_t> prune;
  train->add_option("--corpus", train_corpus, "Training corpus")->required();
  train->add_option("--output-dir", output_dir, "Directory for the model file");
  train->add_option("--order", train_opts.order, "N-gram order")->check(CLI::PositiveNumber);
  train->add_option("--vocab-size", vocab_size, "Subword vocabulary size")->check(CLI::PositiveNumber);
  train->add_option("--prune", prune, "Per-order count thresholds, comma separated")->delimiter(',');
  train->add_option("--discount", train_opts.discount, "Absolute discount")->check(CLI::Range(0.0, 1.0));
  AddCorpusFlags(train, corpus_flags);

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate models on a test corpus");
  std::string eval_train, eval_test;
  std::vector<std::string> eval_models;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::size_t limit = 0;
  bool buckets = true, truncate = true, thresholds = true;
  eval->add_option("--train", eval_train, "Corpus the indices were built from")->required();
  eval->add_option("--test", eval_test, "Test corpus")->required();
  eval->add_option("--models", eval_models, "Models to evaluate (default: all loaded)")
      ->delimiter(',')
      ->check(CLI::IsMember({"mpc", "mpcpp", "qb"}));
  eval->add_option("--output-dir", output_dir, "Directory for report.json and curve CSVs");
  eval->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  eval->add_option("--limit", limit, "Evaluate only the first N test utterances (0 = all)");
  eval->add_flag("--buckets,!--no-buckets", buckets, "Per-bucket rows");
  eval->add_flag("--truncate,!--no-truncate", truncate, "Truncation rows for t = 1..10");
  eval->add_flag("--thresholds,!--no-thresholds", thresholds, "Threshold sweep (TR curve)");
  AddCorpusFlags(eval, corpus_flags);
  AddEngineFlags(eval, engine_flags, true);
  eval->add_flag("--rerank", request_flags.rerank, "Rerank candidates against the context");
  {
    auto* e = eval->add_option("--entropy-threshold,--entropy", request_flags.entropy, "Entropy stop threshold");
    e->check(CLI::PositiveNumber);
    auto* w = eval->add_option("--max-words", request_flags.max_words, "Word budget")->check(CLI::Range(1, 10));
    e->excludes(w);
  }

  // bench
  auto* bench = app.add_subcommand("bench", "Single-query latency benchmark");
  std::string bench_corpus;
  std::size_t samples = 1000, warmup = 50;
  bench->add_option("--corpus", bench_corpus, "Corpus to draw prefixes from")->required();
  bench->add_option("--samples", samples, "Timed queries")->check(CLI::PositiveNumber);
  bench->add_option("--warmup", warmup, "Untimed warmup queries");
  AddCorpusFlags(bench, corpus_flags);
  AddEngineFlags(bench, engine_flags, true);
  AddRequestFlags(bench, request_flags);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve suggestions over HTTP");
  std::string bind = "127.0.0.1:8080";
  std::string allow_origin = "*";
  serve->add_option("--bind", bind, "host:port (GHOST_BIND overrides)");
  serve->add_option("--allow-origin", allow_origin, "CORS origin");
  AddEngineFlags(serve, engine_flags, true);

  // suggest
  auto* suggest = app.add_subcommand("suggest", "Print one suggestion for a prefix");
  std::string prefix;
  std::vector<std::string> context;
  std::optional<std::size_t> topk;
  suggest->add_option("--prefix,prefix", prefix, "Typed prefix")->required();
  suggest->add_option("--context", context, "Prior turn, oldest first (repeatable)");
  suggest->add_option("--topk", topk, "Also print up to N ranked candidates");
  AddEngineFlags(suggest, engine_flags, true);
  AddRequestFlags(suggest, request_flags);

  std::vector<std::string> argv_store{"ghost"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ghost: " << e.what() << "\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kExitUsage;
  }

  try {
    if (*build) {
      const auto dialogs = corpus::LoadCorpus(build_corpus, corpus_flags.Options());
      const auto utts = TrainUtterances(dialogs);
      const std::uint64_t fp = Fingerprint(utts);
      fs::create_directories(output_dir);
      const auto main = trie::CharTrie::Build(utts, max_len);
      trie::ToContainer(main, fp).WriteFile(fs::path(output_dir) / "main.ghst");
      const auto suffix = trie::SuffixTrie::Build(utts, min_freq, max_len);
      trie::ToContainer(suffix, fp).WriteFile(fs::path(output_dir) / "suffix.ghst");
      const auto tfidf = rerank::TfIdfModel::Fit(AllTurns(dialogs));
      rerank::ToContainer(tfidf, fp).WriteFile(fs::path(output_dir) / "tfidf.ghst");
      err << "ghost: indexed " << utts.size() << " utterances (" << main.node_count() << " trie nodes, "
          << suffix.trie().node_count() << " suffix nodes, " << tfidf.vocabulary_size() << " terms) into "
          << output_dir << "\n";
      return kExitOk;
    }

    if (*train) {
      if (!prune.empty()) train_opts.prune = prune;
      if (prune.empty() && train_opts.order != 8) {
        throw RequestError("--prune must list one threshold per order when --order is not 8");
      }
      const auto utts = TrainUtterances(corpus::LoadCorpus(train_corpus, corpus_flags.Options()));
      const auto model = ngram::TrainQb(utts, vocab_size, train_opts);
      fs::create_directories(output_dir);
      ngram::ToContainer(model, Fingerprint(utts)).WriteFile(fs::path(output_dir) / "qb.ghst");
      err << "ghost: trained order-" << model.lm.order() << " model over " << model.vocab.size()
          << " tokens into " << output_dir << "\n";
      return kExitOk;
    }

    if (*eval) {
      const auto engine = engine_flags.Load();
      const auto train_dialogs = corpus::LoadCorpus(eval_train, corpus_flags.Options());
      const std::uint64_t fp = Fingerprint(TrainUtterances(train_dialogs));
      if (engine->fingerprint() && *engine->fingerprint() != fp) {
        err << "ghost: refusing to evaluate: the loaded indices were built from a different corpus than "
            << eval_train << " (fingerprint mismatch); rebuild them or pass the matching --train corpus\n";
        return kExitFailure;
      }
      const auto test_dialogs = corpus::LoadCorpus(eval_test, corpus_flags.Options());
      const auto split = corpus::MakeSplit(train_dialogs, test_dialogs, corpus_flags.lowercase);
      auto test_utts = corpus::HumanUtterances(test_dialogs);
      if (limit > 0 && test_utts.size() > limit) test_utts.resize(limit);
      if (eval_models.empty()) {
        for (auto m : {ModelChoice::kMpc, ModelChoice::kMpcpp, ModelChoice::kQb}) {
          if (engine->Has(m)) eval_models.emplace_back(ModelName(m));
        }
      }
      if (eval_models.empty()) throw RequestError("no models loaded");
      eval::ReportOptions ro;
      ro.buckets = buckets;
      ro.truncate = truncate;
      ro.thresholds = thresholds;
      json doc;
      doc["test_utterances"] = test_utts.size();
      doc["models"] = json::array();
      fs::create_directories(output_dir);
      for (const auto& name : eval_models) {
        RequestFlags rf = request_flags;
        rf.model = name;
        const auto traces = eval::CollectTraces(*engine, test_utts, split.seen_flags, rf.Base(), jobs);
        const auto report = eval::BuildReport(traces, name, ro);
        doc["models"].push_back(eval::ReportToJson(report));
        if (thresholds) WriteText(fs::path(output_dir) / ("tr_curve_" + name + ".csv"), eval::CurveCsv(report.tr_curve));
        err << "ghost: evaluated " << name << "\n";
      }
      WriteText(fs::path(output_dir) / "report.json", doc.dump(2) + "\n");
      return kExitOk;
    }

    if (*bench) {
      const auto engine = engine_flags.Load();
      const auto utts = corpus::HumanUtterances(corpus::LoadCorpus(bench_corpus, corpus_flags.Options()));
      std::vector<std::pair<std::string, std::vector<std::string>>> all;
      for (const auto& u : utts) {
        for (auto& s : corpus::ExpandPrefixSplits(u.utterance, u.context)) all.emplace_back(s.prefix, s.context);
      }
      if (all.empty()) throw Error("corpus yields no prefixes");
      std::vector<std::string> picked;
      std::vector<std::vector<std::string>> contexts;
      const std::size_t n = std::min(samples, all.size());
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = all[i * all.size() / n];
        picked.push_back(s.first);
        contexts.push_back(s.second);
      }
      std::unordered_map<std::string, std::size_t> context_of;
      for (std::size_t i = 0; i < picked.size(); ++i) context_of.emplace(picked[i], i);
      const SuggestRequest base = request_flags.Base();
      const auto stats = eval::BenchLatency(
          [&](std::string_view p) {
            SuggestRequest r = base;
            r.prefix = std::string(p);
            r.context = contexts[context_of.at(r.prefix)];
            return engine->Suggest(r).suggestion;
          },
          picked, warmup);
      out << json{{"model", request_flags.model}, {"n", stats.n},        {"p50_ms", stats.p50},
                  {"p95_ms", stats.p95},          {"p99_ms", stats.p99}, {"mean_ms", stats.mean}}
                 .dump()
          << "\n";
      return kExitOk;
    }

    if (*serve) {
      const auto engine = engine_flags.Load();
      const auto addr = service::ResolveBind(service::ParseBind(bind));
      service::Server server(engine, allow_origin);
      const int port = server.Start(addr);
      err << "ghost: serving " << engine->Inventory().size() << " models on " << addr.host << ":" << port << "\n";
      g_stop.store(false);
      std::signal(SIGINT, OnSignal);
      std::signal(SIGTERM, OnSignal);
      while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.Stop();
      err << "ghost: stopped\n";
      return kExitOk;
    }

    if (*suggest) {
      const auto engine = engine_flags.Load();
      SuggestRequest req = request_flags.Base();
      req.prefix = prefix;
      req.context = context;
      const auto outcome = engine->Suggest(req);
      const auto& s = outcome.suggestion;
      json line{{"suggestion", s.text},
                {"confidence", s.shown() ? json(s.score) : json(nullptr)},
                {"source", std::string(SourceName(s.source))}};
      if (topk) {
        json cands = json::array();
        for (std::size_t i = 0; i < outcome.candidates.size() && i < *topk; ++i) {
          cands.push_back({{"text", outcome.candidates[i].text}, {"score", outcome.candidates[i].score}});
        }
        line["candidates"] = cands;
      }
      out << line.dump() << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "ghost: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ghost::cli
