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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace smt::oracle {
namespace {

using Words = std::vector<std::string>;

}  // namespace

WittenBellOracle::WittenBellOracle(const std::vector<Words> &corpus, int order)
    : order_(order) {
  for (const auto &s : corpus) {
    Words padded(order - 1, "<s>");
    padded.insert(padded.end(), s.begin(), s.end());
    padded.push_back("</s>");
    for (const auto &w : s) vocab_.insert(w);
    for (size_t i = order - 1; i < padded.size(); ++i) {
      ++tokens_;
      for (int n = 1; n <= order; ++n) {
        Words gram(padded.begin() + (i + 1 - n), padded.begin() + i + 1);
        if (ngram_[gram]++ == 0) {
          ++context_types_[Words(gram.begin(), gram.end() - 1)];
        }
        ++context_total_[Words(gram.begin(), gram.end() - 1)];
      }
    }
  }
}

double WittenBellOracle::prob(const std::string &word,
                              const Words &history) const {
  const double v = static_cast<double>(vocab_.size());
  bool known = vocab_.count(word) > 0 || word == "</s>";
  double p = known ? (v + 1) / (v + 2) *
                         static_cast<double>(ngram_.at({word})) /
                         static_cast<double>(tokens_)
                   : 1.0 / (v + 2);
  size_t max_h = std::min<size_t>(history.size(), order_ - 1);
  for (size_t len = 1; len <= max_h; ++len) {
    Words h(history.end() - len, history.end());
    auto total = context_total_.find(h);
    if (total == context_total_.end()) continue;
    double c = 0;
    Words g = h;
    g.push_back(word);
    if (auto it = ngram_.find(g); it != ngram_.end()) c = it->second;
    double types = static_cast<double>(context_types_.at(h));
    p = (c + types * p) / (static_cast<double>(total->second) + types);
  }
  return p;
}

double WittenBellOracle::sentence_logprob(const Words &sentence) const {
  Words history(order_ - 1, "<s>");
  double total = 0;
  Words seq = sentence;
  seq.push_back("</s>");
  for (const auto &w : seq) {
    total += std::log(prob(w, history));
    history.push_back(w);
  }
  return total;
}

std::map<std::pair<std::string, std::string>, double> enumerate_expected_counts(
    const Words &src, const Words &tgt,
    const std::map<std::pair<std::string, std::string>, double> &t) {
  Words cond = {"NULL"};
  cond.insert(cond.end(), src.begin(), src.end());
  const size_t l1 = cond.size(), m = tgt.size();
  auto lookup = [&](const std::string &e, const std::string &f) {
    auto it = t.find({e, f});
    return it == t.end() ? 0.0 : it->second;
  };
  std::map<std::pair<std::string, std::string>, double> counts;
  std::vector<size_t> a(m, 0);
  double z = 0;
  std::vector<std::pair<std::vector<size_t>, double>> all;
  while (true) {
    double p = 1;
    for (size_t j = 0; j < m; ++j) p *= lookup(tgt[j], cond[a[j]]);
    all.emplace_back(a, p);
    z += p;
    size_t j = 0;
    while (j < m && ++a[j] == l1) a[j++] = 0;
    if (j == m) break;
  }
  for (const auto &[align, p] : all) {
    for (size_t j = 0; j < m; ++j) counts[{tgt[j], cond[align[j]]}] += p / z;
  }
  return counts;
}

std::map<std::pair<std::string, std::string>, double> brute_force_ibm1(
    const std::vector<std::pair<Words, Words>> &corpus, int iterations) {
  std::map<std::string, std::set<std::string>> cooc;
  for (const auto &[src, tgt] : corpus) {
    for (const auto &e : tgt) {
      cooc["NULL"].insert(e);
      for (const auto &f : src) cooc[f].insert(e);
    }
  }
  std::map<std::pair<std::string, std::string>, double> t;
  for (const auto &[f, es] : cooc) {
    for (const auto &e : es) t[{e, f}] = 1.0 / static_cast<double>(es.size());
  }
  for (int it = 0; it < iterations; ++it) {
    std::map<std::pair<std::string, std::string>, double> counts;
    std::map<std::string, double> totals;
    for (const auto &[src, tgt] : corpus) {
      for (const auto &[key, c] : enumerate_expected_counts(src, tgt, t)) {
        counts[key] += c;
        totals[key.second] += c;
      }
    }
    for (auto &[key, value] : t) {
      auto c = counts.find(key);
      value = c == counts.end() ? 0.0 : c->second / totals[key.second];
    }
  }
  return t;
}

std::set<std::tuple<int, int, int, int>> consistent_rectangles(
    int src_len, int tgt_len, const std::set<std::pair<int, int>> &links,
    int max_len) {
  std::set<std::tuple<int, int, int, int>> out;
  for (int s1 = 0; s1 < src_len; ++s1) {
    for (int s2 = s1; s2 < src_len && s2 - s1 < max_len; ++s2) {
      for (int t1 = 0; t1 < tgt_len; ++t1) {
        for (int t2 = t1; t2 < tgt_len && t2 - t1 < max_len; ++t2) {
          bool inside = false, ok = true;
          for (const auto &[i, j] : links) {
            bool in_s = i >= s1 && i <= s2;
            bool in_t = j >= t1 && j <= t2;
            if (in_s && in_t) inside = true;
            if (in_s != in_t) ok = false;
          }
          if (ok && inside) out.insert({s1, s2, t1, t2});
        }
      }
    }
  }
  return out;
}

DecodeOracleResult brute_force_decode(
    const std::vector<PhraseTableEntry> &phrases,
    const std::vector<ReorderingEntry> &reordering,
    const NGramLanguageModel &lm, const std::vector<double> &weights,
    const Words &src, double oov_score) {
  struct Option {
    int start, end;
    Words tgt;
    std::array<double, 4> logs;
    std::array<double, 3> fwd, bwd;
  };
  const int n = static_cast<int>(src.size());
  std::vector<Option> options;
  for (int s = 0; s < n; ++s) {
    bool single = false;
    for (int e = s; e < n; ++e) {
      Words span(src.begin() + s, src.begin() + e + 1);
      for (const auto &p : phrases) {
        if (p.src != span) continue;
        Option o{s, e, p.tgt, {}, {1.0 / 3, 1.0 / 3, 1.0 / 3},
                 {1.0 / 3, 1.0 / 3, 1.0 / 3}};
        for (int k = 0; k < 4; ++k) o.logs[k] = std::log(p.scores[k]);
        for (const auto &r : reordering) {
          if (r.src == p.src && r.tgt == p.tgt) {
            o.fwd = r.forward;
            o.bwd = r.backward;
          }
        }
        options.push_back(o);
        if (e == s) single = true;
      }
    }
    if (!single) {
      options.push_back({s, s, {src[s]}, {oov_score, oov_score, oov_score,
                                          oov_score},
                         {1.0 / 3, 1.0 / 3, 1.0 / 3},
                         {1.0 / 3, 1.0 / 3, 1.0 / 3}});
    }
  }

  auto orientation = [](const Option &prev, const Option &cur) {
    if (cur.start == prev.end + 1) return 0;
    if (cur.end == prev.start - 1) return 1;
    return 2;
  };
  auto evaluate = [&](const std::vector<const Option *> &seq) {
    std::vector<double> f(weights.size(), 0.0);
    Words history(lm.order() - 1, "<s>");
    Words target;
    for (size_t i = 0; i < seq.size(); ++i) {
      const Option &o = *seq[i];
      for (int k = 0; k < 4; ++k) f[1 + k] += o.logs[k];
      f[5] += 1;
      f[6] -= static_cast<double>(o.tgt.size());
      int prev_end = i == 0 ? -1 : seq[i - 1]->end;
      f[7] -= std::abs(o.start - (prev_end + 1));
      if (i == 0) {
        f[11] += std::log(o.bwd[0]);
      } else {
        int orient = orientation(*seq[i - 1], o);
        f[8 + orient] += std::log(seq[i - 1]->fwd[orient]);
        f[11 + orient] += std::log(o.bwd[orient]);
      }
      target.insert(target.end(), o.tgt.begin(), o.tgt.end());
    }
    if (!seq.empty()) f[8] += std::log(seq.back()->fwd[0]);
    Words seq_words = target;
    seq_words.push_back("</s>");
    for (const auto &w : seq_words) {
      f[0] += lm.logprob(w, history);
      history.push_back(w);
    }
    double score = 0;
    for (size_t k = 0; k < f.size(); ++k) score += f[k] * weights[k];
    return std::make_pair(score, target);
  };

  DecodeOracleResult best{-std::numeric_limits<double>::infinity(), {}, 0};
  std::vector<bool> covered(n, false);
  std::vector<const Option *> seq;
  std::function<void(int)> search = [&](int remaining) {
    if (remaining == 0) {
      auto [score, target] = evaluate(seq);
      ++best.derivations;
      if (best.derivations == 1) {
        best.score = score;
        best.target = target;
        return;
      }
      double tol = 1e-9 * std::max(1.0, std::fabs(best.score));
      if (score > best.score + tol) {
        best.score = score;
        best.target = target;
      } else if (score >= best.score - tol) {
        if (target < best.target) best.target = target;
        best.score = std::max(best.score, score);
      }
      return;
    }
    for (const auto &o : options) {
      bool free = true;
      for (int i = o.start; i <= o.end; ++i) free = free && !covered[i];
      if (!free) continue;
      for (int i = o.start; i <= o.end; ++i) covered[i] = true;
      seq.push_back(&o);
      search(remaining - (o.end - o.start + 1));
      seq.pop_back();
      for (int i = o.start; i <= o.end; ++i) covered[i] = false;
    }
  };
  search(n);
  return best;
}

BleuOracleResult count_bleu(const std::vector<Words> &hyps,
                            const std::vector<std::vector<Words>> &refs) {
  std::vector<double> match(4, 0), total(4, 0);
  double c = 0, r = 0;
  for (size_t s = 0; s < hyps.size(); ++s) {
    const Words &h = hyps[s];
    c += static_cast<double>(h.size());
    double best_len = -1;
    for (const auto &ref : refs[s]) {
      double len = static_cast<double>(ref.size());
      double d = std::fabs(len - static_cast<double>(h.size()));
      double bd = std::fabs(best_len - static_cast<double>(h.size()));
      if (best_len < 0 || d < bd || (d == bd && len < best_len)) {
        best_len = len;
      }
    }
    r += best_len;
    for (size_t n = 1; n <= 4; ++n) {
      std::map<Words, double> hc;
      for (size_t i = 0; i + n <= h.size(); ++i) {
        hc[Words(h.begin() + i, h.begin() + i + n)] += 1;
      }
      std::map<Words, double> max_ref;
      for (const auto &ref : refs[s]) {
        std::map<Words, double> rc;
        for (size_t i = 0; i + n <= ref.size(); ++i) {
          rc[Words(ref.begin() + i, ref.begin() + i + n)] += 1;
        }
        for (const auto &[g, k] : rc) max_ref[g] = std::max(max_ref[g], k);
      }
      for (const auto &[g, k] : hc) {
        total[n - 1] += k;
        match[n - 1] += std::min(k, max_ref[g]);
      }
    }
  }
  BleuOracleResult out;
  double log_sum = 0;
  bool zero = false;
  for (int n = 0; n < 4; ++n) {
    double p = total[n] > 0 ? match[n] / total[n] : 0.0;
    out.precisions.push_back(p);
    if (p == 0) zero = true; else log_sum += std::log(p) / 4;
  }
  out.brevity_penalty = c > r ? 1.0 : (c == 0 ? 0.0 : std::exp(1 - r / c));
  out.score = zero ? 0.0 : 100 * out.brevity_penalty * std::exp(log_sum);
  return out;
}

}  // namespace smt::oracle
