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

#ifndef SMT_DECODER_H_
#define SMT_DECODER_H_

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smt/aligner.h"
#include "smt/binary_table.h"
#include "smt/corpus.h"
#include "smt/language_model.h"
#include "smt/phrase_model.h"
#include "smt/reordering.h"

namespace smt {

// Log-linear feature layout. Translation scores are natural logs; the word
// penalty and distortion features are negated counts so that every feature
// reads as "higher is better" under a positive weight.
enum Feature : int {
  kFeatLm = 0,
  kFeatPhiSrcGivenTgt,
  kFeatLexSrcGivenTgt,
  kFeatPhiTgtGivenSrc,
  kFeatLexTgtGivenSrc,
  kFeatPhrasePenalty,
  kFeatWordPenalty,
  kFeatDistortion,
  kFeatFwdMono,
  kFeatFwdSwap,
  kFeatFwdDisc,
  kFeatBwdMono,
  kFeatBwdSwap,
  kFeatBwdDisc,
  kNumFeatures,
};

const std::array<std::string_view, kNumFeatures> &feature_names();

using FeatureVector = std::vector<double>;

class FeatureWeights {
 public:
  FeatureWeights() : values_(kNumFeatures, 0.0) {}
  // Rejects a wrong dimension or non-finite values.
  explicit FeatureWeights(std::vector<double> values);

  static FeatureWeights uniform();
  static FeatureWeights defaults();

  double operator[](size_t k) const { return values_[k]; }
  const std::vector<double> &values() const { return values_; }
  FeatureWeights scaled(double factor) const;

  // Lines "feature_name value", preceded by a "# dimension N" comment.
  std::vector<std::string> to_lines() const;
  static FeatureWeights from_lines(const std::vector<std::string> &lines);

  bool operator==(const FeatureWeights &) const = default;

 private:
  std::vector<double> values_;
};

// Dot product; throws InvariantError on a dimension mismatch.
double score_features(std::span<const double> features,
                      std::span<const double> weights);

struct DecoderConfig {
  size_t stack_size = 100;
  int distortion_limit = 6;  // negative: unlimited
  size_t nbest_size = 1;
  size_t max_options_per_span = 20;  // 0: unlimited
  double oov_penalty = -10.0;
  bool recombine = true;
};

// Everything the translator needs, loaded from one model directory.
struct TranslationModel {
  std::optional<NGramLanguageModel> lm;
  TableStore phrases;     // 4 scores per record
  TableStore reordering;  // 6 scores per record
  LexicalTable lex_f2e;
  LexicalTable lex_e2f;
  FeatureWeights weights = FeatureWeights::defaults();
  DecoderConfig config;
  CasePolicy case_policy = CasePolicy::kLowercase;
  TruecaseModel source_truecaser;
  TruecaseModel target_truecaser;
};

TranslationModel make_translation_model(
    NGramLanguageModel lm, const std::vector<PhraseTableEntry> &phrases,
    const std::vector<ReorderingEntry> &reordering,
    const FeatureWeights &weights);

// Reads a model directory. Binary tables are preferred over text ones.
TranslationModel load_translation_model(const std::filesystem::path &dir);

// Decoder options derived from a config file ("key = value" lines).
DecoderConfig parse_decoder_config(const std::vector<std::string> &lines,
                                   CasePolicy *case_policy = nullptr);
std::vector<std::string> decoder_config_to_lines(const DecoderConfig &config,
                                                 CasePolicy case_policy);

struct TranslationOption {
  Span src_span;
  std::vector<std::string> tgt;
  // Context-independent feature values (phrase scores and penalties).
  FeatureVector local;
  OrientationProbs forward{1.0 / 3, 1.0 / 3, 1.0 / 3};
  OrientationProbs backward{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double lm_estimate = 0.0;
  double future_score = 0.0;
  bool oov = false;
};

// options[start][len - 1]: options translating exactly that span, best
// first. Single unknown words get a copy-through option whose four
// translation features all equal `oov_penalty`.
using OptionTable = std::vector<std::vector<std::vector<TranslationOption>>>;
OptionTable collect_options(const TranslationModel &model, const Sentence &src,
                            const FeatureWeights &weights,
                            size_t max_options_per_span,
                            double oov_penalty = -10.0);

// cost[start][end]: best weighted score obtainable for the span, either by a
// single option or by the best split.
using FutureCostTable = std::vector<std::vector<double>>;
FutureCostTable compute_future_cost(const OptionTable &options,
                                    size_t sentence_length);
FutureCostTable compute_future_cost(const TranslationModel &model,
                                    const Sentence &src,
                                    const FeatureWeights &weights);

struct NBestEntry {
  std::vector<std::string> target;
  double total = 0.0;
  FeatureVector features;
};

struct TranslationResult {
  std::vector<std::string> best;
  double best_score = 0.0;
  // Source/target spans of the best derivation, in target order.
  std::vector<std::pair<Span, Span>> segmentation;
  std::vector<NBestEntry> nbest;
  size_t hypotheses_created = 0;
};

TranslationResult translate(const TranslationModel &model, const Sentence &src,
                            const FeatureWeights &weights,
                            const DecoderConfig &params);
TranslationResult translate(const TranslationModel &model, const Sentence &src,
                            const DecoderConfig &params);

// "id ||| target ||| f1 ... f14 ||| total"
std::string format_nbest_line(size_t sentence_id, const NBestEntry &entry);
struct NBestLine {
  size_t sentence_id = 0;
  NBestEntry entry;
};
NBestLine parse_nbest_line(std::string_view line);

// Decodes a file of tokenized sentences line by line.
void translate_file(const TranslationModel &model,
                    const std::filesystem::path &input,
                    const std::filesystem::path &output,
                    const DecoderConfig &params,
                    const std::optional<std::filesystem::path> &nbest_output);

}  // namespace smt

#endif  // SMT_DECODER_H_
