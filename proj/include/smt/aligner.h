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

#ifndef SMT_ALIGNER_H_
#define SMT_ALIGNER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "smt/corpus.h"

namespace smt {

inline const std::string kNullWord = "NULL";

// Bidirectional string <-> dense id map.
class Vocabulary {
 public:
  int intern(const std::string &word);
  std::optional<int> find(const std::string &word) const;
  const std::string &word(int id) const { return words_[id]; }
  size_t size() const { return words_.size(); }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> words_;
};

// t(generated | conditioning). The conditioning side always knows NULL.
class LexicalTable {
 public:
  LexicalTable();

  double prob(const std::string &generated,
              const std::string &conditioning) const;
  void set(const std::string &generated, const std::string &conditioning,
           double p);

  // Conditioning word -> (generated word -> probability), sorted.
  std::map<std::string, std::map<std::string, double>> rows() const;

  // Lines "source_word target_word probability". `conditioning_is_source`
  // selects which column the conditioning word is printed in.
  std::vector<std::string> to_lines(bool conditioning_is_source,
                                    int digits = 7) const;
  static LexicalTable from_lines(const std::vector<std::string> &lines,
                                 bool conditioning_is_source);

  // Id-level access used by the EM trainers.
  Vocabulary &conditioning_vocab() { return cond_vocab_; }
  Vocabulary &generated_vocab() { return gen_vocab_; }
  const Vocabulary &conditioning_vocab() const { return cond_vocab_; }
  const Vocabulary &generated_vocab() const { return gen_vocab_; }
  std::vector<std::unordered_map<int, double>> &id_rows() { return rows_; }
  const std::vector<std::unordered_map<int, double>> &id_rows() const {
    return rows_;
  }

 private:
  Vocabulary cond_vocab_;
  Vocabulary gen_vocab_;
  std::vector<std::unordered_map<int, double>> rows_;
};

// a(i | j, src_len, tgt_len) with i = -1 standing for NULL.
class DistortionTable {
 public:
  double prob(int i, int j, int src_len, int tgt_len) const;
  void set(int i, int j, int src_len, int tgt_len, double p);
  bool has_row(int j, int src_len, int tgt_len) const;
  const std::unordered_map<std::uint64_t, double> &entries() const {
    return entries_;
  }
  static std::uint64_t pack(int i, int j, int src_len, int tgt_len);

 private:
  std::unordered_map<std::uint64_t, double> entries_;
  std::set<std::uint64_t> rows_;
};

// Links (i, j): source position i, target position j.
class AlignmentMatrix {
 public:
  AlignmentMatrix() = default;
  AlignmentMatrix(size_t src_len, size_t tgt_len)
      : src_len_(src_len), tgt_len_(tgt_len) {}

  size_t src_len() const { return src_len_; }
  size_t tgt_len() const { return tgt_len_; }
  const std::set<std::pair<int, int>> &links() const { return links_; }

  void add(int i, int j);
  bool contains(int i, int j) const { return links_.count({i, j}) > 0; }
  AlignmentMatrix transposed() const;

  // "i-j i-j ..." in sorted order.
  std::string to_string() const;
  static AlignmentMatrix parse(std::string_view line, size_t src_len,
                               size_t tgt_len);

  bool operator==(const AlignmentMatrix &) const = default;

 private:
  size_t src_len_ = 0;
  size_t tgt_len_ = 0;
  std::set<std::pair<int, int>> links_;
};

// Model 1 EM. Conditioning side is pair.source (plus NULL), generated side
// is pair.target. `log_likelihood`, when given, receives the corpus
// log-likelihood before the first and after every iteration.
LexicalTable train_ibm1(const ParallelCorpus &corpus, int iterations,
                        std::vector<double> *log_likelihood = nullptr);

struct Ibm2Model {
  LexicalTable translation;
  DistortionTable distortion;
};

Ibm2Model train_ibm2(const ParallelCorpus &corpus, int iterations,
                     const LexicalTable &init,
                     std::vector<double> *log_likelihood = nullptr);

// Corpus log-likelihood (up to the constant alignment prior) under Model 1.
double ibm1_log_likelihood(const LexicalTable &t, const ParallelCorpus &corpus);

// Expected link counts c(generated, conditioning) contributed by one pair in
// the Model 1 E-step.
std::map<std::pair<std::string, std::string>, double> ibm1_expected_counts(
    const LexicalTable &t, const SentencePair &pair);

// Best source position per target word; NULL wins ties and yields no link.
AlignmentMatrix viterbi_align(const LexicalTable &t,
                              const DistortionTable *distortion,
                              const SentencePair &pair);

enum class Symmetrization { kIntersection, kUnion, kGrowDiagFinalAnd };
Symmetrization parse_symmetrization(std::string_view name);

// `rev` must already be transposed into (source, target) orientation.
AlignmentMatrix symmetrize(const AlignmentMatrix &fwd,
                           const AlignmentMatrix &rev,
                           Symmetrization heuristic);

struct AlignerOptions {
  int ibm1_iterations = 5;
  int ibm2_iterations = 5;
  Symmetrization heuristic = Symmetrization::kGrowDiagFinalAnd;
};

struct CorpusAlignment {
  Ibm2Model forward;   // t(target | source)
  Ibm2Model backward;  // t(source | target)
  std::vector<AlignmentMatrix> forward_links;
  std::vector<AlignmentMatrix> backward_links;  // already transposed
  std::vector<AlignmentMatrix> symmetrized;
};

ParallelCorpus swap_sides(const ParallelCorpus &corpus);

CorpusAlignment align_corpus(const ParallelCorpus &corpus,
                             const AlignerOptions &options);

}  // namespace smt

#endif  // SMT_ALIGNER_H_
