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

#include "smt/phrase_model.h"

#include <algorithm>
#include <map>

#include "smt/common.h"

namespace smt {

namespace {

constexpr double kLexFloor = 1e-12;

std::vector<std::string> slice(const std::vector<std::string> &tokens,
                               Span span) {
  return {tokens.begin() + span.start, tokens.begin() + span.end + 1};
}

std::string alignment_key(const std::vector<std::pair<int, int>> &alignment) {
  std::string out;
  for (const auto &[i, j] : alignment) {
    if (!out.empty()) out += ' ';
    out += std::to_string(i) + "-" + std::to_string(j);
  }
  return out;
}

std::vector<std::pair<int, int>> parse_alignment_key(const std::string &key) {
  std::vector<std::pair<int, int>> out;
  for (const auto &link : split_whitespace(key)) {
    auto dash = link.find('-');
    out.emplace_back(std::stoi(link.substr(0, dash)),
                     std::stoi(link.substr(dash + 1)));
  }
  return out;
}

std::vector<std::pair<int, int>> invert(
    const std::vector<std::pair<int, int>> &alignment) {
  std::vector<std::pair<int, int>> out;
  out.reserve(alignment.size());
  for (const auto &[i, j] : alignment) out.emplace_back(j, i);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<PhrasePair> extract_phrases(const SentencePair &pair,
                                        const AlignmentMatrix &a,
                                        int max_phrase_len) {
  const int src_len = static_cast<int>(pair.source.size());
  const int tgt_len = static_cast<int>(pair.target.size());
  if (a.src_len() != pair.source.size() || a.tgt_len() != pair.target.size()) {
    throw DataError("alignment dimensions do not match the sentence pair");
  }
  if (max_phrase_len < 1) throw UsageError("max_phrase_len must be >= 1");

  std::vector<std::vector<int>> src_links(src_len), tgt_links(tgt_len);
  for (const auto &[i, j] : a.links()) {
    src_links[i].push_back(j);
    tgt_links[j].push_back(i);
  }

  std::vector<PhrasePair> out;
  for (int s1 = 0; s1 < src_len; ++s1) {
    for (int s2 = s1; s2 < src_len && s2 - s1 < max_phrase_len; ++s2) {
      int tmin = tgt_len, tmax = -1;
      for (int i = s1; i <= s2; ++i) {
        for (int j : src_links[i]) {
          tmin = std::min(tmin, j);
          tmax = std::max(tmax, j);
        }
      }
      if (tmax < 0 || tmax - tmin >= max_phrase_len) continue;
      bool consistent = true;
      for (int j = tmin; j <= tmax && consistent; ++j) {
        for (int i : tgt_links[j]) {
          if (i < s1 || i > s2) {
            consistent = false;
            break;
          }
        }
      }
      if (!consistent) continue;
      // Grow over unaligned target words on both edges.
      for (int t1 = tmin; t1 >= 0 && (t1 == tmin || tgt_links[t1].empty());
           --t1) {
        for (int t2 = tmax; t2 < tgt_len && t2 - t1 < max_phrase_len &&
                            (t2 == tmax || tgt_links[t2].empty());
             ++t2) {
          PhrasePair p;
          p.src_span = {s1, s2};
          p.tgt_span = {t1, t2};
          p.src = slice(pair.source.tokens, p.src_span);
          p.tgt = slice(pair.target.tokens, p.tgt_span);
          for (const auto &[i, j] : a.links()) {
            if (i >= s1 && i <= s2 && j >= t1 && j <= t2) {
              p.alignment.emplace_back(i - s1, j - t1);
            }
          }
          out.push_back(std::move(p));
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const PhrasePair &x, const PhrasePair &y) {
    return std::tie(x.src_span, x.tgt_span) < std::tie(y.src_span, y.tgt_span);
  });
  return out;
}

std::vector<SentenceExtraction> extract_corpus(
    const ParallelCorpus &corpus, const std::vector<AlignmentMatrix> &aligned,
    int max_phrase_len) {
  if (corpus.size() != aligned.size()) {
    throw DataError("corpus has " + std::to_string(corpus.size()) +
                    " pairs but " + std::to_string(aligned.size()) +
                    " alignments");
  }
  std::vector<SentenceExtraction> out;
  out.reserve(corpus.size());
  for (size_t k = 0; k < corpus.size(); ++k) {
    out.push_back({corpus[k].source.size(), corpus[k].target.size(),
                   extract_phrases(corpus[k], aligned[k], max_phrase_len)});
  }
  return out;
}

double lexical_weight(const std::vector<std::string> &src,
                      const std::vector<std::string> &tgt,
                      const std::vector<std::pair<int, int>> &alignment,
                      const LexicalTable &tgt_given_src) {
  double weight = 1.0;
  for (int j = 0; j < static_cast<int>(tgt.size()); ++j) {
    double sum = 0.0;
    int links = 0;
    for (const auto &[i, jj] : alignment) {
      if (jj != j) continue;
      sum += tgt_given_src.prob(tgt[j], src[i]);
      ++links;
    }
    double factor = links > 0 ? sum / links : tgt_given_src.prob(tgt[j], kNullWord);
    weight *= std::max(factor, kLexFloor);
  }
  return weight;
}

std::vector<PhraseTableEntry> score_phrases(
    const std::vector<SentenceExtraction> &extracted,
    const LexicalTable &tgt_given_src, const LexicalTable &src_given_tgt) {
  struct PairStats {
    long long count = 0;
    std::map<std::string, long long> alignments;
  };
  std::map<std::pair<std::string, std::string>, PairStats> pairs;
  std::map<std::string, long long> src_totals, tgt_totals;
  for (const auto &sentence : extracted) {
    for (const auto &p : sentence.phrases) {
      std::string s = join(p.src), t = join(p.tgt);
      auto &stats = pairs[{s, t}];
      stats.count += 1;
      stats.alignments[alignment_key(p.alignment)] += 1;
      src_totals[s] += 1;
      tgt_totals[t] += 1;
    }
  }
  std::vector<PhraseTableEntry> out;
  out.reserve(pairs.size());
  for (const auto &[key, stats] : pairs) {
    // Most frequent internal alignment; map order breaks ties.
    const std::string *best = nullptr;
    long long best_count = -1;
    for (const auto &[a, c] : stats.alignments) {
      if (c > best_count) {
        best = &a;
        best_count = c;
      }
    }
    auto alignment = parse_alignment_key(*best);
    PhraseTableEntry e;
    e.src = split_whitespace(key.first);
    e.tgt = split_whitespace(key.second);
    const double c = static_cast<double>(stats.count);
    e.scores[kPhiSrcGivenTgt] = c / static_cast<double>(tgt_totals[key.second]);
    e.scores[kPhiTgtGivenSrc] = c / static_cast<double>(src_totals[key.first]);
    e.scores[kLexTgtGivenSrc] =
        lexical_weight(e.src, e.tgt, alignment, tgt_given_src);
    e.scores[kLexSrcGivenTgt] =
        lexical_weight(e.tgt, e.src, invert(alignment), src_given_tgt);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::string> phrase_table_to_lines(
    const std::vector<PhraseTableEntry> &entries) {
  std::vector<std::string> lines;
  lines.reserve(entries.size());
  for (const auto &e : entries) {
    std::string line = join(e.src) + " ||| " + join(e.tgt) + " |||";
    for (double s : e.scores) line += " " + format_sig(s, 7);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<PhraseTableEntry> parse_phrase_table(
    const std::vector<std::string> &lines) {
  std::vector<PhraseTableEntry> out;
  for (size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    std::string where = "phrase table line " + std::to_string(n + 1);
    auto fields = split_exact(lines[n], " ||| ");
    if (fields.size() < 3) throw DataError(where + ": expected 3 fields");
    PhraseTableEntry e;
    e.src = split_whitespace(fields[0]);
    e.tgt = split_whitespace(fields[1]);
    auto scores = split_whitespace(fields[2]);
    if (e.src.empty() || e.tgt.empty() || scores.size() != 4) {
      throw DataError(where + ": expected two phrases and 4 scores");
    }
    for (size_t k = 0; k < 4; ++k) {
      e.scores[k] = parse_double(scores[k], where);
      if (!(e.scores[k] > 0.0)) throw DataError(where + ": scores must be > 0");
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

TableRecord to_record(const PhraseTableEntry &e) {
  return {join(e.src), join(e.tgt), {e.scores.begin(), e.scores.end()}};
}

PhraseTableEntry from_record(const TableRecord &r) {
  PhraseTableEntry e;
  e.src = split_whitespace(r.source);
  e.tgt = split_whitespace(r.target);
  std::copy(r.scores.begin(), r.scores.end(), e.scores.begin());
  return e;
}

void check_phrase_kind(const BinaryTable &table) {
  if (table.kind() != TableKind::kPhrase || table.num_scores() != 4) {
    throw DataError("binary table is not a phrase table");
  }
}

}  // namespace

void binarise_phrase_table(const std::vector<PhraseTableEntry> &entries,
                           const std::filesystem::path &destination) {
  std::vector<TableRecord> records;
  records.reserve(entries.size());
  for (const auto &e : entries) records.push_back(to_record(e));
  write_binary_table(destination, TableKind::kPhrase, 4, std::move(records));
}

PhraseTableMatches load_phrase_table(const BinaryTable &table,
                                     const Sentence &sentence) {
  check_phrase_kind(table);
  auto matches = table.lookup_sentence(sentence);
  PhraseTableMatches out;
  out.spans_consulted = matches.spans_consulted;
  out.entries.reserve(matches.records.size());
  for (const auto &r : matches.records) out.entries.push_back(from_record(r));
  return out;
}

PhraseTableMatches load_phrase_table(const std::filesystem::path &source,
                                     const Sentence &sentence) {
  return load_phrase_table(BinaryTable::open(source), sentence);
}

std::vector<PhraseTableEntry> load_phrase_table(const BinaryTable &table) {
  check_phrase_kind(table);
  std::vector<PhraseTableEntry> out;
  for (const auto &r : table.all_records()) out.push_back(from_record(r));
  return out;
}

std::vector<std::string> alignments_to_lines(
    const std::vector<AlignmentMatrix> &aligned) {
  std::vector<std::string> lines;
  lines.reserve(aligned.size());
  for (const auto &a : aligned) lines.push_back(a.to_string());
  return lines;
}

std::vector<AlignmentMatrix> parse_alignments(
    const std::vector<std::string> &lines, const ParallelCorpus &corpus) {
  if (lines.size() != corpus.size()) {
    throw DataError("alignment file has " + std::to_string(lines.size()) +
                    " lines, corpus has " + std::to_string(corpus.size()));
  }
  std::vector<AlignmentMatrix> out;
  out.reserve(lines.size());
  for (size_t k = 0; k < lines.size(); ++k) {
    try {
      out.push_back(AlignmentMatrix::parse(lines[k], corpus[k].source.size(),
                                           corpus[k].target.size()));
    } catch (const DataError &e) {
      throw DataError("alignment line " + std::to_string(k + 1) + ": " +
                      e.what());
    }
  }
  return out;
}

}  // namespace smt
