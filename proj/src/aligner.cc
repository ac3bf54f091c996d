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

#include "smt/aligner.h"

#include <algorithm>
#include <cmath>

#include "smt/common.h"

namespace smt {

namespace {

constexpr double kProbabilityFloor = 1e-12;

struct IdPair {
  std::vector<int> cond;  // index 0 is NULL
  std::vector<int> gen;
};

std::vector<IdPair> index_corpus(const ParallelCorpus &corpus,
                                 LexicalTable &t) {
  std::vector<IdPair> out;
  out.reserve(corpus.size());
  for (const auto &pair : corpus) {
    IdPair ids;
    ids.cond.push_back(0);
    for (const auto &w : pair.source.tokens) {
      ids.cond.push_back(t.conditioning_vocab().intern(w));
    }
    for (const auto &w : pair.target.tokens) {
      ids.gen.push_back(t.generated_vocab().intern(w));
    }
    out.push_back(std::move(ids));
  }
  t.id_rows().resize(t.conditioning_vocab().size());
  return out;
}

void normalize_rows(std::vector<std::unordered_map<int, double>> &counts,
                    std::vector<std::unordered_map<int, double>> &rows) {
  for (size_t f = 0; f < counts.size(); ++f) {
    auto &row = rows[f];
    auto &c = counts[f];
    double total = 0.0;
    for (const auto &[e, v] : c) total += v;
    if (total <= 0.0) continue;
    double floored_total = 0.0;
    for (auto &[e, p] : row) {
      auto it = c.find(e);
      double v = it == c.end() ? 0.0 : it->second / total;
      p = std::max(v, kProbabilityFloor);
      floored_total += p;
    }
    for (auto &[e, p] : row) p /= floored_total;
  }
}

void check_training_input(const ParallelCorpus &corpus, int iterations) {
  if (corpus.empty()) throw DataError("cannot train alignment on empty corpus");
  if (iterations < 1) throw UsageError("iterations must be >= 1");
}

}  // namespace

int Vocabulary::intern(const std::string &word) {
  auto [it, inserted] = ids_.emplace(word, static_cast<int>(words_.size()));
  if (inserted) words_.push_back(word);
  return it->second;
}

std::optional<int> Vocabulary::find(const std::string &word) const {
  auto it = ids_.find(word);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

LexicalTable::LexicalTable() {
  cond_vocab_.intern(kNullWord);
  rows_.resize(1);
}

double LexicalTable::prob(const std::string &generated,
                          const std::string &conditioning) const {
  auto f = cond_vocab_.find(conditioning);
  auto e = gen_vocab_.find(generated);
  if (!f || !e || static_cast<size_t>(*f) >= rows_.size()) return 0.0;
  const auto &row = rows_[*f];
  auto it = row.find(*e);
  return it == row.end() ? 0.0 : it->second;
}

void LexicalTable::set(const std::string &generated,
                       const std::string &conditioning, double p) {
  int f = cond_vocab_.intern(conditioning);
  int e = gen_vocab_.intern(generated);
  if (rows_.size() <= static_cast<size_t>(f)) rows_.resize(f + 1);
  rows_[f][e] = p;
}

std::map<std::string, std::map<std::string, double>> LexicalTable::rows()
    const {
  std::map<std::string, std::map<std::string, double>> out;
  for (size_t f = 0; f < rows_.size(); ++f) {
    if (rows_[f].empty()) continue;
    auto &row = out[cond_vocab_.word(static_cast<int>(f))];
    for (const auto &[e, p] : rows_[f]) row[gen_vocab_.word(e)] = p;
  }
  return out;
}

std::vector<std::string> LexicalTable::to_lines(bool conditioning_is_source,
                                                int digits) const {
  std::vector<std::pair<std::pair<std::string, std::string>, double>> items;
  for (const auto &[cond, row] : rows()) {
    for (const auto &[gen, p] : row) {
      if (conditioning_is_source) {
        items.push_back({{cond, gen}, p});
      } else {
        items.push_back({{gen, cond}, p});
      }
    }
  }
  std::sort(items.begin(), items.end());
  std::vector<std::string> lines;
  lines.reserve(items.size());
  for (const auto &[words, p] : items) {
    lines.push_back(words.first + " " + words.second + " " +
                    format_sig(p, digits));
  }
  return lines;
}

LexicalTable LexicalTable::from_lines(const std::vector<std::string> &lines,
                                      bool conditioning_is_source) {
  LexicalTable t;
  for (size_t i = 0; i < lines.size(); ++i) {
    auto fields = split_whitespace(lines[i]);
    if (fields.empty()) continue;
    std::string where = "lexical table line " + std::to_string(i + 1);
    if (fields.size() != 3) throw DataError(where + ": expected 3 fields");
    double p = parse_double(fields[2], where);
    if (conditioning_is_source) {
      t.set(fields[1], fields[0], p);
    } else {
      t.set(fields[0], fields[1], p);
    }
  }
  return t;
}

std::uint64_t DistortionTable::pack(int i, int j, int src_len, int tgt_len) {
  auto field = [](int v) {
    if (v < 0 || v > 0xFFFF) throw DataError("sentence too long for Model 2");
    return static_cast<std::uint64_t>(v);
  };
  return field(i + 1) << 48 | field(j) << 32 | field(src_len) << 16 |
         field(tgt_len);
}

double DistortionTable::prob(int i, int j, int src_len, int tgt_len) const {
  auto it = entries_.find(pack(i, j, src_len, tgt_len));
  if (it != entries_.end()) return it->second;
  if (!has_row(j, src_len, tgt_len)) return 1.0 / (src_len + 1);
  return 0.0;
}

void DistortionTable::set(int i, int j, int src_len, int tgt_len, double p) {
  entries_[pack(i, j, src_len, tgt_len)] = p;
  rows_.insert(pack(-1, j, src_len, tgt_len));
}

bool DistortionTable::has_row(int j, int src_len, int tgt_len) const {
  return rows_.count(pack(-1, j, src_len, tgt_len)) > 0;
}

void AlignmentMatrix::add(int i, int j) {
  if (i < 0 || j < 0 || static_cast<size_t>(i) >= src_len_ ||
      static_cast<size_t>(j) >= tgt_len_) {
    throw DataError("alignment link " + std::to_string(i) + "-" +
                    std::to_string(j) + " out of bounds");
  }
  links_.insert({i, j});
}

AlignmentMatrix AlignmentMatrix::transposed() const {
  AlignmentMatrix out(tgt_len_, src_len_);
  for (const auto &[i, j] : links_) out.add(j, i);
  return out;
}

std::string AlignmentMatrix::to_string() const {
  std::string out;
  for (const auto &[i, j] : links_) {
    if (!out.empty()) out += ' ';
    out += std::to_string(i) + "-" + std::to_string(j);
  }
  return out;
}

AlignmentMatrix AlignmentMatrix::parse(std::string_view line, size_t src_len,
                                       size_t tgt_len) {
  AlignmentMatrix m(src_len, tgt_len);
  for (const auto &link : split_whitespace(line)) {
    auto dash = link.find('-');
    if (dash == std::string::npos) {
      throw DataError("malformed alignment link '" + link + "'");
    }
    m.add(static_cast<int>(parse_int(link.substr(0, dash), "alignment link")),
          static_cast<int>(parse_int(link.substr(dash + 1), "alignment link")));
  }
  return m;
}

double ibm1_log_likelihood(const LexicalTable &t,
                           const ParallelCorpus &corpus) {
  double ll = 0.0;
  for (const auto &pair : corpus) {
    const double prior = 1.0 / (pair.source.size() + 1);
    for (const auto &e : pair.target.tokens) {
      double sum = t.prob(e, kNullWord);
      for (const auto &f : pair.source.tokens) sum += t.prob(e, f);
      ll += std::log(sum * prior);
    }
  }
  return ll;
}

LexicalTable train_ibm1(const ParallelCorpus &corpus, int iterations,
                        std::vector<double> *log_likelihood) {
  check_training_input(corpus, iterations);
  LexicalTable t;
  std::vector<IdPair> ids = index_corpus(corpus, t);
  auto &rows = t.id_rows();
  for (const auto &p : ids) {
    for (int f : p.cond) {
      for (int e : p.gen) rows[f][e] = 1.0;
    }
  }
  for (auto &row : rows) {
    for (auto &[e, p] : row) p = 1.0 / static_cast<double>(row.size());
  }
  if (log_likelihood) log_likelihood->clear();

  for (int it = 0; it < iterations; ++it) {
    std::vector<std::unordered_map<int, double>> counts(rows.size());
    double ll = 0.0;
    for (const auto &p : ids) {
      const double prior = 1.0 / static_cast<double>(p.cond.size());
      for (int e : p.gen) {
        double denom = 0.0;
        for (int f : p.cond) denom += rows[f].at(e);
        ll += std::log(denom * prior);
        for (int f : p.cond) counts[f][e] += rows[f].at(e) / denom;
      }
    }
    if (log_likelihood) log_likelihood->push_back(ll);
    normalize_rows(counts, rows);
  }
  if (log_likelihood) {
    log_likelihood->push_back(ibm1_log_likelihood(t, corpus));
  }
  return t;
}

Ibm2Model train_ibm2(const ParallelCorpus &corpus, int iterations,
                     const LexicalTable &init,
                     std::vector<double> *log_likelihood) {
  check_training_input(corpus, iterations);
  Ibm2Model model;
  model.translation = init;
  LexicalTable &t = model.translation;
  std::vector<IdPair> ids = index_corpus(corpus, t);
  auto &rows = t.id_rows();
  auto tprob = [&](int f, int e) {
    auto it = rows[f].find(e);
    return it == rows[f].end() ? 0.0 : it->second;
  };

  // Alignment rows keyed by (j, src_len, tgt_len); values indexed by i + 1.
  std::map<std::uint64_t, std::vector<double>> align;
  for (const auto &p : ids) {
    int l = static_cast<int>(p.cond.size()) - 1;
    int m = static_cast<int>(p.gen.size());
    for (int j = 0; j < m; ++j) {
      align.emplace(DistortionTable::pack(-1, j, l, m),
                    std::vector<double>(l + 1, 1.0 / (l + 1)));
    }
  }
  if (log_likelihood) log_likelihood->clear();

  auto run_estep = [&](std::vector<std::unordered_map<int, double>> *counts,
                       std::map<std::uint64_t, std::vector<double>> *acounts) {
    double ll = 0.0;
    std::vector<double> post;
    for (const auto &p : ids) {
      int l = static_cast<int>(p.cond.size()) - 1;
      int m = static_cast<int>(p.gen.size());
      for (int j = 0; j < m; ++j) {
        const int e = p.gen[j];
        const auto &arow = align.at(DistortionTable::pack(-1, j, l, m));
        post.assign(l + 1, 0.0);
        double denom = 0.0;
        for (int i = 0; i <= l; ++i) {
          post[i] = tprob(p.cond[i], e) * arow[i];
          denom += post[i];
        }
        if (denom <= 0.0) continue;
        ll += std::log(denom);
        if (!counts) continue;
        auto &acount = (*acounts)[DistortionTable::pack(-1, j, l, m)];
        acount.resize(l + 1, 0.0);
        for (int i = 0; i <= l; ++i) {
          double v = post[i] / denom;
          (*counts)[p.cond[i]][e] += v;
          acount[i] += v;
        }
      }
    }
    return ll;
  };

  for (int it = 0; it < iterations; ++it) {
    std::vector<std::unordered_map<int, double>> counts(rows.size());
    std::map<std::uint64_t, std::vector<double>> acounts;
    double ll = run_estep(&counts, &acounts);
    if (log_likelihood) log_likelihood->push_back(ll);
    normalize_rows(counts, rows);
    for (auto &[key, row] : align) {
      auto cit = acounts.find(key);
      const std::vector<double> c = cit == acounts.end()
                                        ? std::vector<double>(row.size(), 0.0)
                                        : cit->second;
      double total = 0.0;
      for (double v : c) total += v;
      double floored = 0.0;
      for (size_t i = 0; i < row.size(); ++i) {
        row[i] = std::max(total > 0.0 ? c[i] / total : 0.0, kProbabilityFloor);
        floored += row[i];
      }
      for (double &v : row) v /= floored;
    }
  }
  if (log_likelihood) log_likelihood->push_back(run_estep(nullptr, nullptr));

  for (const auto &[key, row] : align) {
    int j = static_cast<int>((key >> 32) & 0xFFFF);
    int l = static_cast<int>((key >> 16) & 0xFFFF);
    int m = static_cast<int>(key & 0xFFFF);
    for (int i = 0; i < static_cast<int>(row.size()); ++i) {
      model.distortion.set(i - 1, j, l, m, row[i]);
    }
  }
  return model;
}

std::map<std::pair<std::string, std::string>, double> ibm1_expected_counts(
    const LexicalTable &t, const SentencePair &pair) {
  std::map<std::pair<std::string, std::string>, double> out;
  std::vector<std::string> cond = {kNullWord};
  cond.insert(cond.end(), pair.source.tokens.begin(), pair.source.tokens.end());
  for (const auto &e : pair.target.tokens) {
    double denom = 0.0;
    for (const auto &f : cond) denom += t.prob(e, f);
    if (denom <= 0.0) continue;
    for (const auto &f : cond) out[{e, f}] += t.prob(e, f) / denom;
  }
  return out;
}

AlignmentMatrix viterbi_align(const LexicalTable &t,
                              const DistortionTable *distortion,
                              const SentencePair &pair) {
  const int l = static_cast<int>(pair.source.size());
  const int m = static_cast<int>(pair.target.size());
  AlignmentMatrix out(static_cast<size_t>(l), static_cast<size_t>(m));
  auto score = [&](int i, int j) {
    const std::string &f = i < 0 ? kNullWord : pair.source.tokens[i];
    double p = t.prob(pair.target.tokens[j], f);
    if (distortion) p *= distortion->prob(i, j, l, m);
    return p;
  };
  for (int j = 0; j < m; ++j) {
    int best_i = -1;
    double best = score(-1, j);
    for (int i = 0; i < l; ++i) {
      double s = score(i, j);
      if (s > best) {
        best = s;
        best_i = i;
      }
    }
    if (best_i >= 0) out.add(best_i, j);
  }
  return out;
}

Symmetrization parse_symmetrization(std::string_view name) {
  if (name == "intersection") return Symmetrization::kIntersection;
  if (name == "union") return Symmetrization::kUnion;
  if (name == "gdfa" || name == "grow-diag-final-and") {
    return Symmetrization::kGrowDiagFinalAnd;
  }
  throw UsageError("unknown symmetrization heuristic '" + std::string(name) +
                   "'");
}

AlignmentMatrix symmetrize(const AlignmentMatrix &fwd,
                           const AlignmentMatrix &rev,
                           Symmetrization heuristic) {
  if (fwd.src_len() != rev.src_len() || fwd.tgt_len() != rev.tgt_len()) {
    throw DataError("cannot symmetrize alignments of different dimensions");
  }
  const int rows = static_cast<int>(fwd.src_len());
  const int cols = static_cast<int>(fwd.tgt_len());
  AlignmentMatrix inter(fwd.src_len(), fwd.tgt_len());
  AlignmentMatrix uni(fwd.src_len(), fwd.tgt_len());
  for (const auto &[i, j] : fwd.links()) {
    uni.add(i, j);
    if (rev.contains(i, j)) inter.add(i, j);
  }
  for (const auto &[i, j] : rev.links()) uni.add(i, j);
  if (heuristic == Symmetrization::kIntersection) return inter;
  if (heuristic == Symmetrization::kUnion) return uni;

  AlignmentMatrix out = inter;
  std::vector<bool> src_covered(rows, false), tgt_covered(cols, false);
  for (const auto &[i, j] : out.links()) {
    src_covered[i] = true;
    tgt_covered[j] = true;
  }
  auto add = [&](int i, int j) {
    out.add(i, j);
    src_covered[i] = true;
    tgt_covered[j] = true;
  };
  static constexpr int kNeighbors[8][2] = {{-1, 0}, {0, -1}, {1, 0}, {0, 1},
                                           {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  bool grew = true;
  while (grew) {
    grew = false;
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        if (!out.contains(i, j)) continue;
        for (const auto &d : kNeighbors) {
          int ni = i + d[0], nj = j + d[1];
          if (ni < 0 || nj < 0 || ni >= rows || nj >= cols) continue;
          if (out.contains(ni, nj) || !uni.contains(ni, nj)) continue;
          if (!src_covered[ni] || !tgt_covered[nj]) {
            add(ni, nj);
            grew = true;
          }
        }
      }
    }
  }
  // final-and
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (uni.contains(i, j) && !src_covered[i] && !tgt_covered[j]) add(i, j);
    }
  }
  return out;
}

ParallelCorpus swap_sides(const ParallelCorpus &corpus) {
  ParallelCorpus out;
  out.reserve(corpus.size());
  for (const auto &p : corpus) out.push_back({p.target, p.source});
  return out;
}

CorpusAlignment align_corpus(const ParallelCorpus &corpus,
                             const AlignerOptions &options) {
  CorpusAlignment out;
  auto train = [&](const ParallelCorpus &c) {
    LexicalTable m1 = train_ibm1(c, options.ibm1_iterations);
    if (options.ibm2_iterations <= 0) return Ibm2Model{m1, DistortionTable{}};
    return train_ibm2(c, options.ibm2_iterations, m1);
  };
  ParallelCorpus swapped = swap_sides(corpus);
  out.forward = train(corpus);
  out.backward = train(swapped);
  for (size_t k = 0; k < corpus.size(); ++k) {
    out.forward_links.push_back(viterbi_align(
        out.forward.translation, &out.forward.distortion, corpus[k]));
    out.backward_links.push_back(
        viterbi_align(out.backward.translation, &out.backward.distortion,
                      swapped[k])
            .transposed());
    out.symmetrized.push_back(symmetrize(
        out.forward_links.back(), out.backward_links.back(), options.heuristic));
  }
  return out;
}

}  // namespace smt
