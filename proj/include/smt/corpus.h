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

#ifndef SMT_CORPUS_H_
#define SMT_CORPUS_H_

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace smt {

enum class Language { kSource, kTarget };

struct Sentence {
  std::vector<std::string> tokens;
  Language language = Language::kSource;

  size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  bool operator==(const Sentence &) const = default;
};

struct SentencePair {
  Sentence source;
  Sentence target;
  bool operator==(const SentencePair &) const = default;
};

using ParallelCorpus = std::vector<SentencePair>;

enum class CasePolicy { kLowercase, kUppercase, kNone };

CasePolicy parse_case_policy(std::string_view name);

// Splits punctuation (.,!?;:"'()[] and the Arabic comma and question mark)
// into standalone tokens and collapses whitespace.
Sentence tokenize(std::string_view raw_line, Language language);

// ASCII case folding; bytes of multi-byte UTF-8 sequences pass through.
std::string fold_case(std::string_view token, CasePolicy policy);
std::string normalize_text(std::string_view text, CasePolicy policy);
Sentence normalize(const Sentence &s, CasePolicy policy);

// Most frequent surface form per lowercased key. The first token of every
// sentence is counted under its lowercased form.
class TruecaseModel {
 public:
  void add_count(const std::string &surface, long long count);
  // Recomputes best forms from counts.
  void finalize();

  // Returns nullptr when the folded key is unknown.
  const std::string *best_form(std::string_view token) const;

  const std::map<std::string, std::string> &best_forms() const {
    return best_;
  }
  const std::map<std::string, long long> &counts() const { return counts_; }

  // Text lines "surface_form count" sorted by folded key, then surface form.
  std::vector<std::string> to_lines() const;
  static TruecaseModel from_lines(const std::vector<std::string> &lines);

 private:
  std::map<std::string, long long> counts_;
  std::map<std::string, std::string> best_;
};

TruecaseModel train_truecaser(const std::vector<Sentence> &corpus);
Sentence apply_truecase(const TruecaseModel &m, const Sentence &s);

struct CleanOptions {
  size_t max_len = 80;
  double max_ratio = 9.0;
};

bool keep_pair(const SentencePair &pair, const CleanOptions &options);
ParallelCorpus clean_corpus(const ParallelCorpus &c,
                            const CleanOptions &options);

// Joins tokens, attaching closing punctuation to the preceding word and
// opening brackets to the following one.
std::string detokenize(const std::vector<std::string> &tokens);

struct PrepareOptions {
  CasePolicy case_policy = CasePolicy::kLowercase;
  CleanOptions clean;
};

struct PreparedCorpus {
  ParallelCorpus corpus;
  TruecaseModel source_truecaser;
  TruecaseModel target_truecaser;
};

// Runs normalize -> tokenize -> truecase -> clean over raw parallel lines.
// Truecase models are trained on the original casing. When the policy is
// kNone the emitted stream is truecased, otherwise it is case-normalized.
// `trace`, when set, receives each stage name as it starts.
PreparedCorpus prepare_corpus(
    const std::vector<std::string> &source_lines,
    const std::vector<std::string> &target_lines,
    const PrepareOptions &options,
    const std::function<void(std::string_view)> &trace = {});

// Preprocessing applied to a single input line at translation time.
Sentence prepare_input(std::string_view raw_line, CasePolicy policy,
                       const TruecaseModel *source_truecaser);

std::vector<std::string> sentences_to_lines(const std::vector<Sentence> &v);
std::vector<Sentence> lines_to_sentences(const std::vector<std::string> &lines,
                                         Language language);

}  // namespace smt

#endif  // SMT_CORPUS_H_
