// Copyright 2026 The smtkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line front end for the smtkit toolkit.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smt/bleu.h"
#include "smt/common.h"
#include "smt/corpus.h"
#include "smt/decoder.h"
#include "smt/pipeline.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInvariant = 3;

void copy_into(const std::string &from, const fs::path &to) {
  if (from.empty()) return;
  smt::write_file(to, smt::read_file(from));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Phrase-based statistical machine translation toolkit", "smt"};
  app.require_subcommand(1);

  // prepare
  std::string prep_src, prep_tgt, prep_out, prep_case = "lowercase";
  size_t prep_max_len = 80;
  double prep_max_ratio = 9.0;
  auto *prepare = app.add_subcommand("prepare", "Normalize, tokenize, truecase and clean a parallel corpus");
  prepare->add_option("--src", prep_src, "Source side")->required();
  prepare->add_option("--tgt", prep_tgt, "Target side")->required();
  prepare->add_option("--out-dir", prep_out, "Output directory")->required();
  prepare->add_option("--max-len", prep_max_len, "Maximum sentence length");
  prepare->add_option("--max-ratio", prep_max_ratio, "Maximum length ratio");
  prepare->add_option("--case", prep_case, "lowercase, uppercase or none");

  // train-lm
  std::string lm_corpus, lm_out, lm_smoothing = "witten-bell";
  int lm_order = 3;
  auto *train_lm = app.add_subcommand("train-lm", "Train an n-gram language model");
  train_lm->add_option("--corpus", lm_corpus, "Tokenized text")->required();
  train_lm->add_option("--order", lm_order, "N-gram order (1-5)");
  train_lm->add_option("--smoothing", lm_smoothing, "witten-bell or mle");
  train_lm->add_option("--out", lm_out, "ARPA output")->required();

  // train-align
  std::string al_src, al_tgt, al_out, al_sym = "gdfa";
  int al_m1 = 5, al_m2 = 5;
  auto *train_align = app.add_subcommand("train-align", "Word-align a prepared corpus");
  train_align->add_option("--src", al_src, "Source side")->required();
  train_align->add_option("--tgt", al_tgt, "Target side")->required();
  train_align->add_option("--iterations-m1", al_m1, "IBM Model 1 iterations");
  train_align->add_option("--iterations-m2", al_m2, "IBM Model 2 iterations");
  train_align->add_option("--sym", al_sym, "gdfa, intersection or union");
  train_align->add_option("--out-dir", al_out, "Output directory")->required();

  // extract
  std::string ex_dir, ex_out;
  int ex_max = 7;
  auto *extract = app.add_subcommand("extract", "Extract and score a phrase table");
  extract->add_option("--aligned", ex_dir, "Directory written by train-align")->required();
  extract->add_option("--max-phrase-len", ex_max, "Longest phrase");
  extract->add_option("--out", ex_out, "Phrase table output")->required();

  // binarise
  std::string bin_in, bin_out;
  auto *binarise = app.add_subcommand("binarise", "Convert a text table to binary");
  binarise->add_option("--in", bin_in, "Text table")->required();
  binarise->add_option("--out", bin_out, "Binary table")->required();

  // train-reorder
  std::string ro_dir, ro_out;
  double ro_sigma = 0.5;
  int ro_max = 7;
  auto *train_reorder = app.add_subcommand("train-reorder", "Train a lexicalized reordering table");
  train_reorder->add_option("--aligned", ro_dir, "Directory written by train-align")->required();
  train_reorder->add_option("--sigma", ro_sigma, "Smoothing mass");
  train_reorder->add_option("--max-phrase-len", ro_max, "Longest phrase");
  train_reorder->add_option("--out", ro_out, "Reordering table output")->required();

  // package-model
  std::string pk_model, pk_lm, pk_pt, pk_rt, pk_lex, pk_tc, pk_case = "lowercase";
  auto *package = app.add_subcommand("package-model", "Assemble a model directory");
  package->add_option("--model", pk_model, "Model directory")->required();
  package->add_option("--lm", pk_lm, "ARPA language model to copy in");
  package->add_option("--phrase-table", pk_pt, "Phrase table to copy in");
  package->add_option("--reordering-table", pk_rt, "Reordering table to copy in");
  package->add_option("--lex-dir", pk_lex, "Directory holding lex.f2e and lex.e2f");
  package->add_option("--truecase-dir", pk_tc, "Directory holding truecase.src and truecase.tgt");
  package->add_option("--case", pk_case, "Case policy recorded in config.txt");

  // tune
  std::string tu_model, tu_src, tu_ref, tu_out;
  smt::TuneOptions tu;
  auto *tune = app.add_subcommand("tune", "Tune feature weights on a dev set");
  tune->add_option("--model", tu_model, "Model directory")->required();
  tune->add_option("--dev-src", tu_src, "Dev source")->required();
  tune->add_option("--dev-ref", tu_ref, "Dev reference")->required();
  tune->add_option("--iterations", tu.max_iterations, "Maximum iterations");
  tune->add_option("--nbest", tu.nbest_size, "N-best size");
  tune->add_option("--restarts", tu.num_restarts, "Random restarts");
  tune->add_option("--seed", tu.seed, "Random seed");
  tune->add_option("--out", tu_out, "Weights output")->required();

  // translate
  std::string tr_model, tr_in, tr_out, tr_nbest_file, tr_log;
  size_t tr_nbest = 1;
  std::optional<size_t> tr_stack;
  std::optional<int> tr_dist;
  bool tr_interactive = false, tr_no_restore = false;
  auto *translate = app.add_subcommand("translate", "Translate text");
  translate->add_option("--model", tr_model, "Model directory")->required();
  translate->add_option("--input", tr_in, "Input file");
  translate->add_option("--output", tr_out, "Output file");
  translate->add_option("--nbest", tr_nbest, "N-best size");
  translate->add_option("--nbest-file", tr_nbest_file, "N-best output");
  translate->add_option("--stack", tr_stack, "Stack size");
  translate->add_option("--distortion-limit", tr_dist, "Distortion limit (-1: none)");
  translate->add_flag("--interactive", tr_interactive, "Read sentences from stdin");
  translate->add_flag("--no-restore", tr_no_restore, "Print raw tokens");
  translate->add_option("--log", tr_log, "Session log (source<TAB>translation)");

  // evaluate
  std::string ev_hyp;
  std::vector<std::string> ev_refs;
  auto *evaluate = app.add_subcommand("evaluate", "Score a translation with BLEU");
  evaluate->add_option("--hyp", ev_hyp, "Hypothesis file")->required();
  evaluate->add_option("--ref", ev_refs, "Reference file (repeatable)")->required();

  // pipeline
  std::string pl_config, pl_model, pl_train_src, pl_train_tgt, pl_dev_src,
      pl_dev_tgt;
  std::optional<std::uint64_t> pl_seed;
  std::vector<std::string> pl_set;
  auto *pipeline = app.add_subcommand("pipeline", "Run the full training pipeline");
  pipeline->add_option("--config", pl_config, "Config file (key = value)");
  pipeline->add_option("--model-dir", pl_model, "Model directory");
  pipeline->add_option("--train-src", pl_train_src, "Training source");
  pipeline->add_option("--train-tgt", pl_train_tgt, "Training target");
  pipeline->add_option("--dev-src", pl_dev_src, "Dev source");
  pipeline->add_option("--dev-tgt", pl_dev_tgt, "Dev target");
  pipeline->add_option("--seed", pl_seed, "Random seed");
  pipeline->add_option("--set", pl_set, "Override a config key (key=value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*prepare) {
      smt::PrepareOptions o;
      o.case_policy = smt::parse_case_policy(prep_case);
      o.clean.max_len = prep_max_len;
      o.clean.max_ratio = prep_max_ratio;
      auto p = smt::prepare_files(prep_src, prep_tgt, o, prep_out);
      std::cerr << "prepared " << p.corpus.size() << " sentence pairs\n";
    } else if (*train_lm) {
      smt::train_lm_file(lm_corpus, lm_order,
                         smt::parse_smoothing(lm_smoothing), lm_out);
    } else if (*train_align) {
      smt::AlignerOptions o{al_m1, al_m2, smt::parse_symmetrization(al_sym)};
      smt::train_align_files(al_src, al_tgt, o, al_out);
    } else if (*extract) {
      smt::extract_phrase_table(ex_dir, ex_max, ex_out);
    } else if (*binarise) {
      smt::binarise_table(bin_in, bin_out);
    } else if (*train_reorder) {
      smt::train_reordering_table(ro_dir, ro_max, ro_sigma, ro_out);
    } else if (*package) {
      fs::path dir = pk_model;
      fs::create_directories(dir);
      copy_into(pk_lm, dir / "lm.arpa");
      copy_into(pk_pt, dir / "phrase-table.txt");
      copy_into(pk_rt, dir / "reordering-table.txt");
      if (!pk_lex.empty()) {
        copy_into((fs::path(pk_lex) / "lex.f2e").string(), dir / "lex.f2e");
        copy_into((fs::path(pk_lex) / "lex.e2f").string(), dir / "lex.e2f");
      }
      if (!pk_tc.empty()) {
        copy_into((fs::path(pk_tc) / "truecase.src").string(),
                  dir / "truecase.src");
        copy_into((fs::path(pk_tc) / "truecase.tgt").string(),
                  dir / "truecase.tgt");
      }
      smt::package_model(dir, smt::DecoderConfig{},
                         smt::parse_case_policy(pk_case));
    } else if (*tune) {
      auto r = smt::tune_model(tu_model, tu_src, tu_ref, tu, tu_out);
      std::cerr << "best dev BLEU " << r.dev_bleu << "\n";
    } else if (*translate) {
      smt::TranslationModel model = smt::load_translation_model(tr_model);
      smt::DecoderConfig params = model.config;
      if (tr_stack) params.stack_size = *tr_stack;
      if (tr_dist) params.distortion_limit = *tr_dist;
      params.nbest_size = tr_nbest;
      std::optional<fs::path> log;
      if (!tr_log.empty()) log = tr_log;
      smt::TranslationSession session(model, params, !tr_no_restore, log);
      if (tr_interactive) {
        smt::serve_interactive(session, std::cin, std::cout, std::cerr);
      } else {
        if (tr_in.empty()) throw smt::UsageError("translate needs --input or --interactive");
        std::vector<std::string> out, nbest;
        auto lines = smt::read_lines(tr_in);
        for (size_t i = 0; i < lines.size(); ++i) {
          try {
            out.push_back(session.process(lines[i]));
          } catch (const smt::DataError &e) {
            throw smt::DataError(tr_in + " line " + std::to_string(i + 1) +
                                 ": " + e.what());
          }
          for (const auto &entry : session.last_result().nbest) {
            nbest.push_back(smt::format_nbest_line(i, entry));
          }
        }
        if (tr_out.empty()) {
          for (const auto &l : out) std::cout << l << '\n';
        } else {
          smt::write_lines(tr_out, out);
        }
        if (!tr_nbest_file.empty()) smt::write_lines(tr_nbest_file, nbest);
      }
    } else if (*evaluate) {
      auto hyps = smt::lines_to_sentences(smt::read_lines(ev_hyp),
                                          smt::Language::kTarget);
      std::vector<std::vector<smt::Sentence>> refs(hyps.size());
      for (const auto &file : ev_refs) {
        auto r = smt::lines_to_sentences(smt::read_lines(file),
                                         smt::Language::kTarget);
        if (r.size() != hyps.size()) {
          throw smt::DataError(file + " has " + std::to_string(r.size()) +
                               " lines, hypotheses have " +
                               std::to_string(hyps.size()));
        }
        for (size_t k = 0; k < r.size(); ++k) refs[k].push_back(r[k]);
      }
      std::cout << smt::format_bleu_report(smt::bleu(hyps, refs)) << '\n';
    } else if (*pipeline) {
      smt::PipelineConfig config;
      if (!pl_config.empty()) config = smt::PipelineConfig::load(pl_config);
      if (!pl_model.empty()) config.model_dir = pl_model;
      if (!pl_train_src.empty()) config.train_src = pl_train_src;
      if (!pl_train_tgt.empty()) config.train_tgt = pl_train_tgt;
      if (!pl_dev_src.empty()) config.dev_src = pl_dev_src;
      if (!pl_dev_tgt.empty()) config.dev_tgt = pl_dev_tgt;
      if (pl_seed) config.seed = *pl_seed;
      for (const auto &kv : pl_set) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
          throw smt::UsageError("--set expects key=value, got " + kv);
        }
        config.set(smt::trim(std::string_view(kv).substr(0, eq)),
                   smt::trim(std::string_view(kv).substr(eq + 1)));
      }
      auto report = smt::run_pipeline(
          config, [](std::string_view m) { std::cerr << m << '\n'; });
      std::cerr << "executed " << report.executed.size() << " of "
                << smt::pipeline_steps().size() << " steps\n";
    }
  } catch (const smt::UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const smt::DataError &e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const smt::InvariantError &e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::filesystem::filesystem_error &e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return 0;
}
