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

#include "smt/bleu.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "smt/common.h"

namespace smt {

namespace {

using NGramCounts = std::map<std::vector<std::string>, long long>;

NGramCounts ngrams(const std::vector<std::string> &tokens, int n) {
  NGramCounts out;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    out[{tokens.begin() + i, tokens.begin() + i + n}] += 1;
  }
  return out;
}

long long closest_length(long long candidate,
                         const std::vector<std::vector<std::string>> &refs) {
  long long best = -1;
  for (const auto &r : refs) {
    long long len = static_cast<long long>(r.size());
    if (best < 0) {
      best = len;
      continue;
    }
    long long d = std::llabs(len - candidate), bd = std::llabs(best - candidate);
    if (d < bd || (d == bd && len < best)) best = len;
  }
  return best;
}

double brevity_penalty(long long c, long long r) {
  if (c > r) return 1.0;
  if (c == 0) return 0.0;
  return std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
}

}  // namespace

BleuStats &BleuStats::operator+=(const BleuStats &o) {
  for (int n = 0; n < kBleuOrder; ++n) {
    matches[n] += o.matches[n];
    counts[n] += o.counts[n];
  }
  candidate_length += o.candidate_length;
  reference_length += o.reference_length;
  return *this;
}

BleuStats &BleuStats::operator-=(const BleuStats &o) {
  for (int n = 0; n < kBleuOrder; ++n) {
    matches[n] -= o.matches[n];
    counts[n] -= o.counts[n];
  }
  candidate_length -= o.candidate_length;
  reference_length -= o.reference_length;
  return *this;
}

BleuStats bleu_sufficient_stats(
    const std::vector<std::string> &hypothesis,
    const std::vector<std::vector<std::string>> &references) {
  if (references.empty()) {
    throw DataError("every hypothesis needs at least one reference");
  }
  BleuStats s;
  for (int n = 1; n <= kBleuOrder; ++n) {
    NGramCounts max_ref;
    for (const auto &r : references) {
      for (const auto &[g, c] : ngrams(r, n)) {
        max_ref[g] = std::max(max_ref[g], c);
      }
    }
    for (const auto &[g, c] : ngrams(hypothesis, n)) {
      s.counts[n - 1] += c;
      auto it = max_ref.find(g);
      if (it != max_ref.end()) s.matches[n - 1] += std::min(c, it->second);
    }
  }
  s.candidate_length = static_cast<long long>(hypothesis.size());
  s.reference_length = closest_length(s.candidate_length, references);
  return s;
}

BleuReport stats_to_bleu(const BleuStats &stats) {
  BleuReport r;
  r.matches = stats.matches;
  r.counts = stats.counts;
  r.candidate_length = stats.candidate_length;
  r.reference_length = stats.reference_length;
  bool zero = false;
  double log_sum = 0.0;
  for (int n = 0; n < kBleuOrder; ++n) {
    r.precisions[n] = stats.counts[n] > 0 ? static_cast<double>(stats.matches[n]) /
                                                static_cast<double>(stats.counts[n])
                                          : 0.0;
    if (r.precisions[n] <= 0.0) {
      zero = true;
    } else {
      log_sum += std::log(r.precisions[n]) / kBleuOrder;
    }
  }
  r.brevity_penalty = brevity_penalty(stats.candidate_length, stats.reference_length);
  r.score = zero ? 0.0 : 100.0 * r.brevity_penalty * std::exp(log_sum);
  return r;
}

BleuReport bleu(const std::vector<Sentence> &hypotheses,
                const std::vector<std::vector<Sentence>> &references) {
  if (hypotheses.empty()) throw DataError("BLEU needs at least one hypothesis");
  if (hypotheses.size() != references.size()) {
    throw DataError("BLEU: " + std::to_string(hypotheses.size()) +
                    " hypotheses but " + std::to_string(references.size()) +
                    " reference sets");
  }
  BleuStats total;
  for (size_t k = 0; k < hypotheses.size(); ++k) {
    std::vector<std::vector<std::string>> refs;
    for (const auto &r : references[k]) refs.push_back(r.tokens);
    if (refs.empty()) {
      throw DataError("BLEU: sentence " + std::to_string(k + 1) +
                      " has no reference");
    }
    const auto &hyp = hypotheses[k].tokens;
    for (int n = 1; n <= kBleuOrder; ++n) {
      NGramCounts clip;
      for (const auto &r : refs) {
        for (const auto &[g, c] : ngrams(r, n)) clip[g] = std::max(clip[g], c);
      }
      for (const auto &[g, c] : ngrams(hyp, n)) {
        total.counts[n - 1] += c;
        total.matches[n - 1] += std::min(c, clip.count(g) ? clip[g] : 0LL);
      }
    }
    total.candidate_length += static_cast<long long>(hyp.size());
    total.reference_length += closest_length(static_cast<long long>(hyp.size()), refs);
  }
  return stats_to_bleu(total);
}

double smoothed_bleu(const BleuStats &stats) {
  double log_sum = 0.0;
  for (int n = 0; n < kBleuOrder; ++n) {
    double m = static_cast<double>(stats.matches[n]);
    double c = static_cast<double>(stats.counts[n]);
    if (n > 0) {
      m += 1.0;
      c += 1.0;
    }
    if (m <= 0.0 || c <= 0.0) return 0.0;
    log_sum += std::log(m / c) / kBleuOrder;
  }
  return 100.0 * brevity_penalty(stats.candidate_length, stats.reference_length) *
         std::exp(log_sum);
}

std::string format_bleu_report(const BleuReport &r) {
  char buf[256];
  double ratio = r.reference_length > 0
                     ? static_cast<double>(r.candidate_length) /
                           static_cast<double>(r.reference_length)
                     : 0.0;
  std::snprintf(buf, sizeof(buf),
                "BLEU = %.2f, p1/p2/p3/p4 = %.1f/%.1f/%.1f/%.1f (BP=%.3f, "
                "ratio=%.3f, hyp_len=%lld, ref_len=%lld)",
                r.score, 100.0 * r.precisions[0], 100.0 * r.precisions[1],
                100.0 * r.precisions[2], 100.0 * r.precisions[3],
                r.brevity_penalty, ratio, r.candidate_length,
                r.reference_length);
  return buf;
}

}  // namespace smt
