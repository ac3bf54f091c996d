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

#include "smt/tuner.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smt/common.h"

namespace smt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinGain = 1e-12;

struct Segment {
  double start;  // envelope segment begins here
  size_t candidate;
};

// Upper envelope of score(γ) = b + γ·m over one sentence's candidates.
std::vector<Segment> upper_envelope(const std::vector<double> &slope,
                                    const std::vector<double> &intercept) {
  std::vector<size_t> order(slope.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (slope[a] != slope[b]) return slope[a] < slope[b];
    if (intercept[a] != intercept[b]) return intercept[a] > intercept[b];
    return a < b;
  });
  std::vector<Segment> hull;
  for (size_t pos = 0; pos < order.size(); ++pos) {
    size_t l = order[pos];
    if (pos > 0 && slope[order[pos - 1]] == slope[l]) continue;
    double x = -kInf;
    while (!hull.empty()) {
      size_t top = hull.back().candidate;
      x = (intercept[top] - intercept[l]) / (slope[l] - slope[top]);
      if (x <= hull.back().start) {
        hull.pop_back();
        x = -kInf;
      } else {
        break;
      }
    }
    hull.push_back({hull.empty() ? -kInf : x, l});
  }
  return hull;
}

}  // namespace

TuningPool::TuningPool(std::vector<std::vector<std::vector<std::string>>> refs)
    : references_(std::move(refs)),
      candidates_(references_.size()),
      keys_(references_.size()) {}

bool TuningPool::add(size_t sentence, const std::vector<std::string> &target,
                     const FeatureVector &features) {
  if (features.size() != kNumFeatures) {
    throw InvariantError("tuning candidate has the wrong feature dimension");
  }
  std::string key = join(target);
  auto &keys = keys_.at(sentence);
  if (std::find(keys.begin(), keys.end(), key) != keys.end()) return false;
  keys.push_back(key);
  candidates_[sentence].push_back(
      {target, features,
       bleu_sufficient_stats(target, references_[sentence])});
  return true;
}

size_t TuningPool::size() const {
  size_t n = 0;
  for (const auto &c : candidates_) n += c.size();
  return n;
}

size_t TuningPool::select(size_t sentence,
                          const std::vector<double> &weights) const {
  const auto &cands = candidates_[sentence];
  size_t best = 0;
  double best_score = -kInf;
  for (size_t i = 0; i < cands.size(); ++i) {
    double s = score_features(cands[i].features, weights);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

double TuningPool::bleu(const std::vector<double> &weights) const {
  BleuStats total;
  for (size_t s = 0; s < candidates_.size(); ++s) {
    if (candidates_[s].empty()) continue;
    total += candidates_[s][select(s, weights)].stats;
  }
  return smoothed_bleu(total);
}

LineSearchResult line_search(const TuningPool &pool,
                             const std::vector<double> &weights, size_t k) {
  struct Event {
    double x;
    size_t sentence;
    size_t from, to;
  };
  std::vector<Event> events;
  BleuStats stats;
  for (size_t s = 0; s < pool.num_sentences(); ++s) {
    const auto &cands = pool.candidates(s);
    if (cands.empty()) continue;
    std::vector<double> slope, intercept;
    for (const auto &c : cands) {
      slope.push_back(c.features[k]);
      intercept.push_back(score_features(c.features, weights));
    }
    auto hull = upper_envelope(slope, intercept);
    stats += cands[hull.front().candidate].stats;
    for (size_t i = 1; i < hull.size(); ++i) {
      events.push_back({hull[i].start, s, hull[i - 1].candidate,
                        hull[i].candidate});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event &a, const Event &b) {
    if (a.x != b.x) return a.x < b.x;
    return a.sentence < b.sentence;
  });

  LineSearchResult best{0.0, -kInf};
  auto consider = [&best](double gamma, double bleu) {
    if (bleu > best.bleu ||
        (bleu == best.bleu && std::fabs(gamma) < std::fabs(best.gamma))) {
      best = {gamma, bleu};
    }
  };
  if (events.empty()) {
    consider(0.0, smoothed_bleu(stats));
    return best;
  }
  // Interval left of the first breakpoint.
  consider(events.front().x - 1.0, smoothed_bleu(stats));
  size_t i = 0;
  while (i < events.size()) {
    double x = events[i].x;
    for (; i < events.size() && events[i].x == x; ++i) {
      const auto &cands = pool.candidates(events[i].sentence);
      stats -= cands[events[i].from].stats;
      stats += cands[events[i].to].stats;
    }
    double gamma = i < events.size() ? 0.5 * (x + events[i].x) : x + 1.0;
    consider(gamma, smoothed_bleu(stats));
  }
  return best;
}

OptimizeResult optimize_over_pool(const TuningPool &pool,
                                  const FeatureWeights &start,
                                  size_t num_restarts, std::mt19937_64 &rng) {
  std::vector<std::vector<double>> starts = {start.values()};
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (size_t r = 0; r < num_restarts; ++r) {
    std::vector<double> w(kNumFeatures);
    for (double &x : w) x = uniform(rng);
    w[kFeatLm] = std::fabs(w[kFeatLm]);
    starts.push_back(std::move(w));
  }

  OptimizeResult result{start, -kInf, {}};
  for (auto &w : starts) {
    double current = pool.bleu(w);
    std::vector<double> history;
    for (size_t pass = 0; pass < 100 * kNumFeatures; ++pass) {
      size_t best_k = 0;
      LineSearchResult best{0.0, -kInf};
      for (size_t k = 0; k < kNumFeatures; ++k) {
        LineSearchResult r = line_search(pool, w, k);
        if (r.bleu > best.bleu) {
          best = r;
          best_k = k;
        }
      }
      if (!(best.bleu > current + kMinGain)) break;
      std::vector<double> next = w;
      next[best_k] += best.gamma;
      double realized = pool.bleu(next);
      if (!(realized > current + kMinGain)) break;
      w = std::move(next);
      current = realized;
      history.push_back(current);
    }
    result.step_history.push_back(std::move(history));
    if (current > result.bleu) {
      result.bleu = current;
      result.weights = FeatureWeights(w);
    }
  }
  return result;
}

TuneResult tune(const TranslationModel &model,
                const std::vector<Sentence> &dev_source,
                const std::vector<std::vector<Sentence>> &dev_references,
                const FeatureWeights &init, const TuneOptions &options) {
  if (dev_source.empty()) throw UsageError("tuning needs a non-empty dev set");
  if (dev_source.size() != dev_references.size()) {
    throw DataError("dev source and reference counts differ");
  }
  std::vector<std::vector<std::vector<std::string>>> refs;
  for (const auto &rs : dev_references) {
    auto &out = refs.emplace_back();
    for (const auto &r : rs) out.push_back(r.tokens);
  }
  TuningPool pool(std::move(refs));
  std::mt19937_64 rng(options.seed);
  DecoderConfig params = options.decoder;
  params.nbest_size = std::max<size_t>(options.nbest_size, 1);

  TuneResult result{init, -kInf, {}, {}};
  FeatureWeights weights = init;
  for (size_t iter = 0;; ++iter) {
    std::vector<Sentence> hyps;
    size_t added = 0;
    for (size_t s = 0; s < dev_source.size(); ++s) {
      TranslationResult r = translate(model, dev_source[s], weights, params);
      hyps.push_back(Sentence{r.best, Language::kTarget});
      for (const auto &e : r.nbest) added += pool.add(s, e.target, e.features);
    }
    TuningTraceRow row{iter, weights, bleu(hyps, dev_references).score,
                       std::numeric_limits<double>::quiet_NaN()};
    if (row.dev_bleu > result.dev_bleu) {
      result.dev_bleu = row.dev_bleu;
      result.weights = weights;
    }
    bool stop = added == 0 || iter >= options.max_iterations;
    if (!stop) {
      OptimizeResult opt =
          optimize_over_pool(pool, weights, options.num_restarts, rng);
      row.pool_bleu = opt.bleu;
      for (auto &h : opt.step_history) {
        result.step_history.push_back(std::move(h));
      }
      weights = opt.weights;
    }
    result.trace.push_back(std::move(row));
    if (stop) break;
  }
  return result;
}

std::vector<std::string> trace_to_lines(const std::vector<TuningTraceRow> &t) {
  std::vector<std::string> lines;
  for (const auto &row : t) {
    std::string line = std::to_string(row.iteration);
    for (double w : row.weights.values()) line += " " + format_sig(w, 10);
    line += " " + format_sig(row.dev_bleu, 10);
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace smt
