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

#ifndef SMT_LANGUAGE_MODEL_H_
#define SMT_LANGUAGE_MODEL_H_

#include <filesystem>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "smt/corpus.h"

namespace smt {

inline const std::string kStartSymbol = "<s>";
inline const std::string kStopSymbol = "</s>";
inline const std::string kUnknownSymbol = "<unk>";

// Log probability of an impossible event. Compare with is_log_zero().
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline bool is_log_zero(double logprob) { return logprob == kLogZero; }

inline constexpr int kMaxOrder = 5;

enum class Smoothing { kNone, kMle, kWittenBell };
Smoothing parse_smoothing(std::string_view name);

// N-gram model over target-language sentences. A sentence x_1..x_n is padded
// with order-1 start symbols and terminated by the stop symbol, and scored as
// the product of q(x_i | previous order-1 tokens).
//
// Probabilities are stored in backoff form: an explicit q(w|h) for observed
// (h, w), and a weight bow(h) used as q(w|h) = bow(h) q(w|h') otherwise.
// Unsmoothed models have no backoff weights and assign zero to unseen events.
class NGramLanguageModel {
 public:
  explicit NGramLanguageModel(int order);

  int order() const { return order_; }
  Smoothing smoothing() const { return smoothing_; }
  bool has_probabilities() const { return smoothing_ != Smoothing::kNone; }

  // Real words seen in training (reserved symbols excluded).
  const std::set<std::string> &vocabulary() const { return vocabulary_; }

  long long count(std::span<const std::string> ngram) const;
  // Count(h) as the total count of all continuations of h.
  long long context_count(std::span<const std::string> history) const;
  // N1+(h): number of distinct words seen after h.
  long long continuation_types(std::span<const std::string> history) const;
  // Every history with at least one counted continuation, for all orders.
  std::vector<std::vector<std::string>> observed_contexts() const;

  // Maps out-of-vocabulary words to the unknown symbol.
  const std::string &map_token(const std::string &word) const;

  // q(word | history). Only the last order-1 history tokens are used.
  double prob(const std::string &word,
              std::span<const std::string> history) const;
  // Natural log of prob(); kLogZero for zero probability.
  double logprob(const std::string &word,
                 std::span<const std::string> history) const;

  // Explicit entries, by n-gram length; keys are space-joined tokens.
  const std::unordered_map<std::string, double> &entries(int length) const {
    return probs_[length - 1];
  }
  const std::unordered_map<std::string, double> &backoffs() const {
    return backoff_;
  }

 private:
  friend NGramLanguageModel count_ngrams(const std::vector<Sentence> &,
                                         int order);
  friend NGramLanguageModel estimate_mle(const NGramLanguageModel &);
  friend NGramLanguageModel smooth(const NGramLanguageModel &,
                                   Smoothing method);
  friend NGramLanguageModel import_arpa(const std::filesystem::path &);
  friend NGramLanguageModel parse_arpa(std::string_view);

  double backoff_prob(const std::string &mapped_word,
                      std::span<const std::string> history) const;
  void index_contexts();

  int order_;
  Smoothing smoothing_ = Smoothing::kNone;
  std::set<std::string> vocabulary_;
  // counts_[k-1]: k-gram counts.
  std::vector<std::unordered_map<std::string, long long>> counts_;
  // context key -> (total continuation count, distinct continuations).
  std::unordered_map<std::string, std::pair<long long, long long>> contexts_;
  std::vector<std::unordered_map<std::string, double>> probs_;
  std::unordered_map<std::string, double> backoff_;
};

// Counts every k-gram, k = 1..order, over padded sentences. N-grams ending in
// the start symbol are not counted.
NGramLanguageModel count_ngrams(const std::vector<Sentence> &corpus,
                                int order);

// q(w|h) = Count(h, w) / Count(h).
NGramLanguageModel estimate_mle(const NGramLanguageModel &counted);

// Interpolated Witten-Bell estimate down to a unigram base that reserves
// 1/(|V|+2) for the unknown symbol.
NGramLanguageModel smooth(const NGramLanguageModel &counted, Smoothing method);

NGramLanguageModel train_language_model(const std::vector<Sentence> &corpus,
                                        int order, Smoothing method);

// Natural-log probability of the sentence including the final stop factor.
double sentence_logprob(const NGramLanguageModel &model, const Sentence &s);

std::string to_arpa(const NGramLanguageModel &model);
void export_arpa(const NGramLanguageModel &model,
                 const std::filesystem::path &destination);
NGramLanguageModel parse_arpa(std::string_view text);
NGramLanguageModel import_arpa(const std::filesystem::path &source);

}  // namespace smt

#endif  // SMT_LANGUAGE_MODEL_H_
