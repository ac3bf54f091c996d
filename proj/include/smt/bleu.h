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

#ifndef SMT_BLEU_H_
#define SMT_BLEU_H_

#include <array>
#include <string>
#include <vector>

#include "smt/corpus.h"

namespace smt {

inline constexpr int kBleuOrder = 4;

// Per-sentence sufficient statistics; corpus BLEU is a function of their sum.
struct BleuStats {
  std::array<long long, kBleuOrder> matches{};  // clipped
  std::array<long long, kBleuOrder> counts{};   // candidate n-grams
  long long candidate_length = 0;
  long long reference_length = 0;  // closest reference, ties to shorter

  BleuStats &operator+=(const BleuStats &o);
  BleuStats &operator-=(const BleuStats &o);
  bool operator==(const BleuStats &) const = default;
};

struct BleuReport {
  std::array<long long, kBleuOrder> matches{};
  std::array<long long, kBleuOrder> counts{};
  std::array<double, kBleuOrder> precisions{};
  double brevity_penalty = 0.0;
  double score = 0.0;  // 0..100
  long long candidate_length = 0;
  long long reference_length = 0;
};

BleuStats bleu_sufficient_stats(const std::vector<std::string> &hypothesis,
                                const std::vector<std::vector<std::string>> &references);
BleuReport stats_to_bleu(const BleuStats &stats);

// Corpus BLEU with counts pooled over all sentences. `references[k]` holds
// every reference translation of hypothesis k.
BleuReport bleu(const std::vector<Sentence> &hypotheses,
                const std::vector<std::vector<Sentence>> &references);

// Tuning objective: like stats_to_bleu but precisions for n >= 2 use add-one
// counts, so the score stays informative when higher-order matches are zero.
double smoothed_bleu(const BleuStats &stats);

// "BLEU = S, p1/p2/p3/p4 = a/b/c/d (BP=x, ratio=r, hyp_len=H, ref_len=R)"
std::string format_bleu_report(const BleuReport &report);

}  // namespace smt

#endif  // SMT_BLEU_H_
