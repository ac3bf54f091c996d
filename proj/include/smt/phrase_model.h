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

#ifndef SMT_PHRASE_MODEL_H_
#define SMT_PHRASE_MODEL_H_

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "smt/aligner.h"
#include "smt/binary_table.h"
#include "smt/corpus.h"

namespace smt {

// Inclusive [start, end] token range.
struct Span {
  int start = 0;
  int end = 0;
  int length() const { return end - start + 1; }
  auto operator<=>(const Span &) const = default;
};

struct PhrasePair {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  Span src_span;
  Span tgt_span;
  // Links relative to the span starts, sorted.
  std::vector<std::pair<int, int>> alignment;

  auto operator<=>(const PhrasePair &) const = default;
};

// All phrase pairs extracted from one sentence pair.
struct SentenceExtraction {
  size_t src_len = 0;
  size_t tgt_len = 0;
  std::vector<PhrasePair> phrases;
};

// Every span pair (both sides <= max_phrase_len) that contains at least one
// link and has no link leaving it, ordered by (src_span, tgt_span).
std::vector<PhrasePair> extract_phrases(const SentencePair &pair,
                                        const AlignmentMatrix &a,
                                        int max_phrase_len);

std::vector<SentenceExtraction> extract_corpus(
    const ParallelCorpus &corpus, const std::vector<AlignmentMatrix> &aligned,
    int max_phrase_len);

// Score layout of a phrase table entry.
enum PhraseScore : int {
  kPhiSrcGivenTgt = 0,
  kLexSrcGivenTgt = 1,
  kPhiTgtGivenSrc = 2,
  kLexTgtGivenSrc = 3,
};

struct PhraseTableEntry {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  std::array<double, 4> scores{};

  bool operator==(const PhraseTableEntry &) const = default;
};

// Lexical weight of `tgt` given `src` under a phrase-internal alignment of
// (src index, tgt index) links: product over target words of the mean
// t(tgt_j | src_i) over its links, or t(tgt_j | NULL) when unaligned.
double lexical_weight(const std::vector<std::string> &src,
                      const std::vector<std::string> &tgt,
                      const std::vector<std::pair<int, int>> &alignment,
                      const LexicalTable &tgt_given_src);

// Relative frequencies in both directions plus lexical weights, sorted by
// source phrase then target phrase. `tgt_given_src` is the lex.f2e table and
// `src_given_tgt` the lex.e2f table.
std::vector<PhraseTableEntry> score_phrases(
    const std::vector<SentenceExtraction> &extracted,
    const LexicalTable &tgt_given_src, const LexicalTable &src_given_tgt);

// "src ||| tgt ||| s0 s1 s2 s3" with 7 significant digits.
std::vector<std::string> phrase_table_to_lines(
    const std::vector<PhraseTableEntry> &entries);
std::vector<PhraseTableEntry> parse_phrase_table(
    const std::vector<std::string> &lines);

void binarise_phrase_table(const std::vector<PhraseTableEntry> &entries,
                           const std::filesystem::path &destination);

struct PhraseTableMatches {
  std::vector<PhraseTableEntry> entries;
  size_t spans_consulted = 0;
};
// Entries whose source phrase occurs somewhere in `sentence`.
PhraseTableMatches load_phrase_table(const std::filesystem::path &source,
                                     const Sentence &sentence);
PhraseTableMatches load_phrase_table(const BinaryTable &table,
                                     const Sentence &sentence);
std::vector<PhraseTableEntry> load_phrase_table(const BinaryTable &table);

// Alignment exchange: line k holds the links of sentence pair k.
std::vector<std::string> alignments_to_lines(
    const std::vector<AlignmentMatrix> &aligned);
std::vector<AlignmentMatrix> parse_alignments(
    const std::vector<std::string> &lines, const ParallelCorpus &corpus);

}  // namespace smt

#endif  // SMT_PHRASE_MODEL_H_
