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

#ifndef SMT_PIPELINE_H_
#define SMT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smt/aligner.h"
#include "smt/corpus.h"
#include "smt/decoder.h"
#include "smt/language_model.h"
#include "smt/tuner.h"

namespace smt {

struct PipelineConfig {
  std::filesystem::path train_src;
  std::filesystem::path train_tgt;
  std::filesystem::path dev_src;  // optional
  std::filesystem::path dev_tgt;  // optional
  std::filesystem::path model_dir;

  PrepareOptions prepare;
  int lm_order = 3;
  Smoothing lm_smoothing = Smoothing::kWittenBell;
  AlignerOptions aligner;
  int max_phrase_len = 7;
  double reordering_sigma = 0.5;
  DecoderConfig decoder;
  size_t tune_iterations = 10;
  size_t tune_nbest = 100;
  size_t tune_restarts = 8;
  std::uint64_t seed = 42;

  // Applies one "key = value" setting; unknown keys throw UsageError.
  void set(std::string_view key, std::string_view value);
  // Relative paths are resolved against `base_dir`.
  static PipelineConfig parse(const std::vector<std::string> &lines,
                              const std::filesystem::path &base_dir = {});
  static PipelineConfig load(const std::filesystem::path &file);
  std::vector<std::string> to_lines() const;
};

// Training steps in execution order.
const std::vector<std::string> &pipeline_steps();

struct ManifestEntry {
  std::string step;
  std::string checksum;
};

struct ModelManifest {
  std::string created;  // timestamp comment; not part of the model
  std::vector<ManifestEntry> done;

  const ManifestEntry *find(std::string_view step) const;
  std::vector<std::string> to_lines() const;
  static ModelManifest from_lines(const std::vector<std::string> &lines);
};

struct PipelineReport {
  ModelManifest manifest;
  std::vector<std::string> executed;
};

// Runs every step that is not already complete and verified, resuming from
// the first invalid one. `log`, when set, receives progress lines.
PipelineReport run_pipeline(
    const PipelineConfig &config,
    const std::function<void(std::string_view)> &log = {});

// Individual stages, shared by the pipeline and the command line tool.
PreparedCorpus prepare_files(const std::filesystem::path &src,
                             const std::filesystem::path &tgt,
                             const PrepareOptions &options,
                             const std::filesystem::path &out_dir);
void train_lm_file(const std::filesystem::path &corpus, int order,
                   Smoothing smoothing, const std::filesystem::path &out);
void train_align_files(const std::filesystem::path &src,
                       const std::filesystem::path &tgt,
                       const AlignerOptions &options,
                       const std::filesystem::path &out_dir);
void extract_phrase_table(const std::filesystem::path &aligned_dir,
                          int max_phrase_len,
                          const std::filesystem::path &out);
void train_reordering_table(const std::filesystem::path &aligned_dir,
                            int max_phrase_len, double sigma,
                            const std::filesystem::path &out);
// Converts a text phrase or reordering table into its binary form.
void binarise_table(const std::filesystem::path &in,
                    const std::filesystem::path &out);
// Writes decoder defaults, initial weights and the component checksums.
void package_model(const std::filesystem::path &model_dir,
                   const DecoderConfig &decoder, CasePolicy case_policy);
TuneResult tune_model(const std::filesystem::path &model_dir,
                      const std::filesystem::path &dev_src,
                      const std::filesystem::path &dev_ref,
                      const TuneOptions &options,
                      const std::filesystem::path &weights_out);

// Line-level translation shared by batch and interactive modes.
class TranslationSession {
 public:
  TranslationSession(const TranslationModel &model, DecoderConfig params,
                     bool restore,
                     std::optional<std::filesystem::path> log = std::nullopt);

  std::string process(std::string_view raw_line);
  size_t processed() const { return processed_; }
  // Decoder output for the most recent non-empty line.
  const TranslationResult &last_result() const { return last_; }

 private:
  const TranslationModel &model_;
  DecoderConfig params_;
  bool restore_;
  std::optional<std::filesystem::path> log_;
  size_t processed_ = 0;
  TranslationResult last_;
};

// Truecases, capitalizes the first letter and detokenizes.
std::string restore_output(const TranslationModel &model,
                           const std::vector<std::string> &tokens);

// Reads lines until end of input; per-line failures are reported on `err`.
void serve_interactive(TranslationSession &session, std::istream &in,
                       std::ostream &out, std::ostream &err);

}  // namespace smt

#endif  // SMT_PIPELINE_H_
