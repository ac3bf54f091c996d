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

#ifndef SMT_TUNER_H_
#define SMT_TUNER_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "smt/bleu.h"
#include "smt/decoder.h"

namespace smt {

struct TuningCandidate {
  std::vector<std::string> target;
  FeatureVector features;
  BleuStats stats;
};

// Accumulated n-best candidates per dev sentence, unique by target string.
class TuningPool {
 public:
  explicit TuningPool(std::vector<std::vector<std::vector<std::string>>> refs);

  // Returns true when the candidate was not in the pool yet.
  bool add(size_t sentence, const std::vector<std::string> &target,
           const FeatureVector &features);

  size_t num_sentences() const { return candidates_.size(); }
  size_t size() const;
  const std::vector<TuningCandidate> &candidates(size_t sentence) const {
    return candidates_[sentence];
  }

  // Index of the highest-scoring candidate; ties go to the earliest.
  size_t select(size_t sentence, const std::vector<double> &weights) const;
  // Smoothed corpus BLEU of the selected candidates.
  double bleu(const std::vector<double> &weights) const;

 private:
  std::vector<std::vector<std::vector<std::string>>> references_;
  std::vector<std::vector<TuningCandidate>> candidates_;
  std::vector<std::vector<std::string>> keys_;
};

struct LineSearchResult {
  double gamma = 0.0;  // step added to the coordinate
  double bleu = 0.0;   // pool BLEU at that step
};

// Exact search along coordinate `k` through the per-sentence upper envelopes.
LineSearchResult line_search(const TuningPool &pool,
                             const std::vector<double> &weights, size_t k);

struct OptimizeResult {
  FeatureWeights weights;
  double bleu = 0.0;
  // Pool BLEU after each accepted step, per run (start point first).
  std::vector<std::vector<double>> step_history;
};

OptimizeResult optimize_over_pool(const TuningPool &pool,
                                  const FeatureWeights &start,
                                  size_t num_restarts, std::mt19937_64 &rng);

struct TuneOptions {
  size_t max_iterations = 10;
  size_t nbest_size = 100;
  size_t num_restarts = 8;
  std::uint64_t seed = 42;
  DecoderConfig decoder;
};

struct TuningTraceRow {
  size_t iteration = 0;
  FeatureWeights weights;  // weights used for this decode
  double dev_bleu = 0.0;   // unsmoothed BLEU of the 1-best decode
  double pool_bleu = 0.0;  // after re-optimizing; NaN when not optimized
};

struct TuneResult {
  FeatureWeights weights;
  double dev_bleu = 0.0;
  std::vector<TuningTraceRow> trace;
  std::vector<std::vector<double>> step_history;
};

TuneResult tune(const TranslationModel &model,
                const std::vector<Sentence> &dev_source,
                const std::vector<std::vector<Sentence>> &dev_references,
                const FeatureWeights &init, const TuneOptions &options);

// "iter w1 ... w14 dev_bleu" per row.
std::vector<std::string> trace_to_lines(const std::vector<TuningTraceRow> &t);

}  // namespace smt

#endif  // SMT_TUNER_H_
