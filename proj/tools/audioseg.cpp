/* Copyright 2026 The audioseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// audioseg command-line tool. Every subcommand is a thin layer over the C
// API; exit codes are its status values.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "audioseg/audioseg.h"

namespace fs = std::filesystem;

namespace {

void log_to_stderr(void* user, const char* message) {
  if (!*static_cast<const bool*>(user)) std::cerr << message << "\n";
}

// Owns a context for the lifetime of one command.
class Session {
 public:
  Session() {
    if (as_context_create(&ctx_) != AS_OK) ctx_ = nullptr;
  }
  ~Session() { as_context_destroy(ctx_); }
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  as_context* get() const { return ctx_; }

  // Prints the context's error for a failed status.
  int check(as_status s) const {
    if (s != AS_OK) {
      std::cerr << "audioseg: " << as_status_name(s) << ": " << as_last_error(ctx_) << "\n";
    }
    return static_cast<int>(s);
  }

 private:
  as_context* ctx_ = nullptr;
};

struct Globals {
  std::optional<uint64_t> seed;
  std::optional<size_t> threads;
  std::string config;
  bool quiet = false;
};

int configure(const Session& s, const Globals& g) {
  if (!s.get()) {
    std::cerr << "audioseg: cannot create a context\n";
    return AS_ERR_DATA;
  }
  as_set_log_callback(s.get(), log_to_stderr, const_cast<bool*>(&g.quiet));
  if (!g.config.empty()) {
    if (int rc = s.check(as_load_config(s.get(), g.config.c_str()))) return rc;
  }
  if (g.seed) {
    if (int rc = s.check(as_set_seed(s.get(), *g.seed))) return rc;
  }
  if (g.threads) {
    if (int rc = s.check(as_set_threads(s.get(), *g.threads))) return rc;
  }
  return s.check(as_validate_config(s.get()));
}

bool is_jsonl(const std::string& p) { return fs::path(p).extension() == ".jsonl"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic segmentation of audio programs from text and audio embeddings", "audioseg"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", as_version());

  Globals g;
  app.add_option("--seed", g.seed, "Random seed (overrides the config)")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", g.threads, "Worker threads (overrides the config)")
      ->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "Run configuration (JSON)");
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress messages");

  std::function<int(const Session&)> action;

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "WAV files to log-Mel spectrogram stacks");
  std::string pre_in, pre_out;
  bool pre_fit = false;
  pre->add_option("--in", pre_in, "Directory of .wav files")->required();
  pre->add_option("--out", pre_out, "Output directory")->required();
  pre->add_flag("--fit", pre_fit, "Pad or truncate each clip to one second instead of chunking");
  pre->callback([&] {
    action = [&](const Session& s) {
      size_t n = 0;
      int rc = s.check(as_preprocess(s.get(), pre_in.c_str(), pre_out.c_str(), pre_fit, &n));
      if (!rc) std::cout << n << " files\n";
      return rc;
    };
  });

  // make-corpus
  auto* mc = app.add_subcommand("make-corpus", "Synthesize a benchmark corpus");
  int mc_shows = -1, mc_topics = -1;
  double mc_duration = -1;
  std::optional<bool> mc_informative;
  std::string mc_out;
  mc->add_option("--shows", mc_shows, "Number of shows")->check(CLI::PositiveNumber);
  mc->add_option("--topics", mc_topics, "Number of topics")->check(CLI::PositiveNumber);
  mc->add_option("--duration", mc_duration, "Seconds per show")->check(CLI::PositiveNumber);
  mc->add_flag("--audio-informative,!--no-audio-informative", mc_informative,
               "Mark fragment starts with an audio cue");
  mc->add_option("--out", mc_out, "Corpus directory")->required();
  mc->callback([&] {
    action = [&](const Session& s) {
      const int informative = mc_informative ? int(*mc_informative) : -1;
      return s.check(
          as_make_corpus(s.get(), mc_out.c_str(), mc_shows, mc_topics, mc_duration, informative));
    };
  });

  // train-generator
  auto* tg = app.add_subcommand("train-generator", "Train an audio embedding generator");
  std::string tg_task, tg_data, tg_out;
  tg->add_option("--task", tg_task, "sec, fpc or wc")
      ->required()
      ->check(CLI::IsMember({"sec", "fpc", "wc"}, CLI::ignore_case));
  tg->add_option("--data", tg_data, "Clip manifest (JSON); omit for the configured synthetic recipe");
  tg->add_option("--out", tg_out, "Checkpoint directory")->required();
  tg->callback([&] {
    action = [&](const Session& s) {
      double acc = 0;
      int rc = s.check(as_train_generator(s.get(), tg_task.c_str(),
                                          tg_data.empty() ? nullptr : tg_data.c_str(),
                                          tg_out.c_str(), &acc));
      if (!rc) std::printf("validation accuracy %.4f\n", acc);
      return rc;
    };
  });

  // embed
  auto* em = app.add_subcommand("embed", "Embed spectrogram stacks or clips with a generator");
  std::string em_ckpt, em_in, em_out;
  em->add_option("--ckpt", em_ckpt, "Generator checkpoint")->required();
  em->add_option("--in", em_in, "Directory of .tnsr stacks or .wav clips")
      ->required();
  em->add_option("--out", em_out, "Output directory")->required();
  em->callback([&] {
    action = [&](const Session& s) {
      size_t n = 0;
      int rc = s.check(as_embed(s.get(), em_ckpt.c_str(), em_in.c_str(), em_out.c_str(), &n));
      if (!rc) std::cout << n << " files\n";
      return rc;
    };
  });

  // train-seg
  auto* ts = app.add_subcommand("train-seg", "Train a segmenter on a corpus");
  std::string ts_corpus, ts_features, ts_out, ts_sec, ts_fpc, ts_wc;
  ts->add_option("--corpus", ts_corpus, "Corpus directory")->required();
  ts->add_option("--features", ts_features, "Feature blocks, e.g. txt+sec or all")->required();
  ts->add_option("--out", ts_out, "Bundle directory")->required();
  ts->add_option("--sec", ts_sec, "SEC generator checkpoint");
  ts->add_option("--fpc", ts_fpc, "FPC generator checkpoint");
  ts->add_option("--wc", ts_wc, "WC generator checkpoint");
  ts->callback([&] {
    action = [&](const Session& s) {
      for (const auto& [task, dir] : {std::pair<const char*, std::string*>{"sec", &ts_sec},
                                      {"fpc", &ts_fpc},
                                      {"wc", &ts_wc}}) {
        if (dir->empty()) continue;
        if (int rc = s.check(as_set_generator_checkpoint(s.get(), task, dir->c_str()))) return rc;
      }
      double f1 = 0;
      int rc = s.check(
          as_train_segmenter(s.get(), ts_corpus.c_str(), ts_features.c_str(), ts_out.c_str(), &f1));
      if (!rc) std::printf("validation WinPR F1 %.4f\n", f1);
      return rc;
    };
  });

  // predict
  auto* pr = app.add_subcommand("predict", "Tag the tokens of one or more shows");
  std::string pr_ckpt, pr_out;
  std::vector<std::string> pr_shows;
  pr->add_option("--ckpt", pr_ckpt, "Segmenter bundle")->required();
  pr->add_option("--show", pr_shows, "Show directory (repeatable)")
      ->required();
  pr->add_option("--out", pr_out,
                 "A .jsonl file for a single show, otherwise a directory of <show>.jsonl files")
      ->required();
  pr->callback([&] {
    action = [&](const Session& s) {
      if (pr_shows.size() > 1 && is_jsonl(pr_out)) {
        std::cerr << "audioseg: usage error: --out must be a directory for several shows\n";
        return int(AS_ERR_USAGE);
      }
      as_segmenter* seg = nullptr;
      if (int rc = s.check(as_segmenter_load(s.get(), pr_ckpt.c_str(), &seg))) return rc;
      int rc = 0;
      for (const auto& show : pr_shows) {
        as_prediction* p = nullptr;
        rc = s.check(as_segmenter_predict(s.get(), seg, show.c_str(), &p));
        if (rc) break;
        const fs::path target =
            is_jsonl(pr_out) ? fs::path(pr_out)
                             : fs::path(pr_out) / (fs::path(show).lexically_normal().filename().string() + ".jsonl");
        rc = s.check(as_prediction_write(s.get(), p, target.string().c_str()));
        as_prediction_destroy(p);
        if (rc) break;
      }
      as_segmenter_destroy(seg);
      return rc;
    };
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Score predictions with WinPR");
  std::vector<std::string> ev_pred;
  std::string ev_ref, ev_out, ev_method = "model";
  size_t ev_k = 10;
  ev->add_option("--pred", ev_pred, "Prediction files or directories, named <show_id>.jsonl")
      ->required();
  ev->add_option("--ref", ev_ref, "Corpus directory")->required();
  ev->add_option("--k", ev_k, "WinPR window")->check(CLI::PositiveNumber);
  ev->add_option("--method", ev_method, "Method label for the results rows");
  ev->add_option("--out", ev_out, "results.tsv path")->required();
  ev->callback([&] {
    action = [&](const Session& s) {
      std::vector<const char*> paths;
      for (const auto& p : ev_pred) paths.push_back(p.c_str());
      return s.check(as_eval(s.get(), paths.data(), paths.size(), ev_ref.c_str(), ev_k,
                             ev_method.c_str(), ev_out.c_str()));
    };
  });

  // stats
  auto* st = app.add_subcommand("stats", "Friedman aligned ranks and Bonferroni-Dunn tests");
  std::string st_results, st_baseline = "TXT", st_out;
  st->add_option("--results", st_results, "results.tsv")->required();
  st->add_option("--baseline", st_baseline, "Baseline method");
  st->add_option("--out", st_out, "report.json path")->required();
  st->callback([&] {
    action = [&](const Session& s) {
      return s.check(as_stats(s.get(), st_results.c_str(), st_baseline.c_str(), st_out.c_str()));
    };
  });

  // run
  auto* run = app.add_subcommand("run", "Run the full experiment from --config");
  std::string run_out;
  run->add_option("--out", run_out, "Output directory (default: the configured output)");
  run->callback([&] {
    action = [&](const Session& s) {
      return s.check(as_run(s.get(), run_out.empty() ? nullptr : run_out.c_str()));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return AS_ERR_USAGE;
  }

  Session session;
  if (int rc = configure(session, g)) return rc;
  return action(session);
}
