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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "smt/common.h"
#include "smt/decoder.h"
#include "smt/tuner.h"

using namespace smt;
using Words = std::vector<std::string>;
using Refs = std::vector<std::vector<Words>>;

namespace {

FeatureVector features(std::initializer_list<std::pair<int, double>> values) {
  FeatureVector f(kNumFeatures, 0.0);
  for (auto [k, v] : values) f[k] = v;
  return f;
}

std::vector<double> with_step(std::vector<double> w, size_t k, double gamma) {
  w[k] += gamma;
  return w;
}

TranslationModel ambiguous_model() {
  // "das" prefers "that" by table score; the LM prefers "the".
  std::vector<PhraseTableEntry> phrases = {
      {{"das"}, {"the"}, {0.2, 0.2, 0.2, 0.2}},
      {{"das"}, {"that"}, {0.8, 0.8, 0.8, 0.8}},
      {{"haus"}, {"house"}, {0.9, 0.9, 0.9, 0.9}},
      {{"buch"}, {"book"}, {0.9, 0.9, 0.9, 0.9}},
      {{"ist"}, {"is"}, {0.9, 0.9, 0.9, 0.9}},
      {{"alt"}, {"old"}, {0.9, 0.9, 0.9, 0.9}},
  };
  std::vector<ReorderingEntry> reordering;
  for (const auto &p : phrases) {
    reordering.push_back({p.src, p.tgt, {0.6, 0.2, 0.2}, {0.6, 0.2, 0.2}});
  }
  std::vector<Sentence> lm_corpus;
  for (int k = 0; k < 5; ++k) {
    lm_corpus.push_back({{"the", "house", "is", "old"}, Language::kTarget});
    lm_corpus.push_back({{"the", "book", "is", "old"}, Language::kTarget});
  }
  return make_translation_model(
      train_language_model(lm_corpus, 3, Smoothing::kWittenBell), phrases,
      reordering, FeatureWeights::defaults());
}

std::vector<Sentence> sentences(std::vector<std::string> lines, Language l) {
  std::vector<Sentence> out;
  for (const auto &s : lines) out.push_back({split_whitespace(s), l});
  return out;
}

}  // namespace

TEST_CASE("pool deduplicates and selects the best candidate") {
  TuningPool pool(Refs{{{"a", "b"}}});
  CHECK(pool.add(0, {"a", "b"}, features({{0, 1.0}})));
  CHECK_FALSE(pool.add(0, {"a", "b"}, features({{0, 5.0}})));
  CHECK(pool.add(0, {"a", "c"}, features({{0, 1.0}})));
  CHECK(pool.size() == 2);
  std::vector<double> w(kNumFeatures, 1.0);
  CHECK(pool.select(0, w) == 0);  // tie goes to the earliest
  CHECK(pool.bleu(w) == doctest::Approx(100.0));
  CHECK_THROWS_AS(pool.add(0, {"x"}, FeatureVector(3, 0.0)), InvariantError);
}

TEST_CASE("line search picks the half-line of the better candidate") {
  TuningPool pool(Refs{{{"good"}}});
  pool.add(0, {"bad"}, features({{kFeatLm, 1.0}}));
  pool.add(0, {"good"}, features({{kFeatLm, -1.0}}));
  std::vector<double> w(kNumFeatures, 0.0);
  w[kFeatLm] = 1.0;
  CHECK(pool.bleu(w) < 100.0);
  LineSearchResult r = line_search(pool, w, kFeatLm);
  CHECK(r.gamma < -1.0);
  CHECK(r.bleu == doctest::Approx(100.0));
  CHECK(pool.bleu(with_step(w, kFeatLm, r.gamma)) == doctest::Approx(100.0));
  // Along a direction where both candidates agree nothing changes.
  CHECK(line_search(pool, w, kFeatDistortion).gamma == 0.0);
}

TEST_CASE("line search matches a dense grid scan") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0, 1);
  const Words vocab = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<Words>> refs(5);
    for (auto &r : refs) {
      r.push_back({vocab[rng() % 4], vocab[rng() % 4], vocab[rng() % 4]});
    }
    TuningPool pool(refs);
    for (size_t s = 0; s < 5; ++s) {
      for (int c = 0; c < 6; ++c) {
        FeatureVector f(kNumFeatures);
        for (auto &v : f) v = g(rng);
        pool.add(s, {vocab[rng() % 4], vocab[rng() % 4], vocab[rng() % 4]}, f);
      }
    }
    std::vector<double> w(kNumFeatures);
    for (auto &v : w) v = g(rng);
    size_t k = rng() % kNumFeatures;
    LineSearchResult r = line_search(pool, w, k);
    CHECK(pool.bleu(with_step(w, k, r.gamma)) ==
          doctest::Approx(r.bleu).epsilon(1e-12));
    CHECK(r.bleu >= pool.bleu(w) - 1e-12);
    for (double gamma = -30; gamma <= 30; gamma += 0.01) {
      CHECK(pool.bleu(with_step(w, k, gamma)) <= r.bleu + 1e-12);
    }
  }
}

TEST_CASE("optimize_over_pool never lowers pool BLEU") {
  std::mt19937_64 data_rng(10);
  std::normal_distribution<double> g(0, 1);
  const Words vocab = {"a", "b", "c"};
  std::vector<std::vector<Words>> refs(8);
  for (auto &r : refs) r.push_back({vocab[data_rng() % 3], vocab[data_rng() % 3]});
  TuningPool pool(refs);
  for (size_t s = 0; s < refs.size(); ++s) {
    for (int c = 0; c < 5; ++c) {
      FeatureVector f(kNumFeatures);
      for (auto &v : f) v = g(data_rng);
      pool.add(s, {vocab[data_rng() % 3], vocab[data_rng() % 3]}, f);
    }
  }
  FeatureWeights start = FeatureWeights::defaults();
  std::mt19937_64 rng(1);
  OptimizeResult r = optimize_over_pool(pool, start, 3, rng);
  CHECK(r.bleu >= pool.bleu(start.values()));
  CHECK(pool.bleu(r.weights.values()) == doctest::Approx(r.bleu));
  CHECK(r.step_history.size() == 4);
  for (const auto &run : r.step_history) {
    for (size_t i = 1; i < run.size(); ++i) CHECK(run[i] > run[i - 1]);
  }
  std::mt19937_64 again(1);
  CHECK(optimize_over_pool(pool, start, 3, again).weights == r.weights);
}

TEST_CASE("dominant candidates leave the objective unchanged") {
  TuningPool pool(Refs{{{"x"}}, {{"y"}}});
  pool.add(0, {"x"}, features({{kFeatLm, 1.0}, {kFeatWordPenalty, 1.0}}));
  pool.add(0, {"z"}, features({{kFeatLm, 1.0}, {kFeatWordPenalty, 1.0}}));
  pool.add(1, {"y"}, features({}));
  std::mt19937_64 rng(2);
  FeatureWeights start = FeatureWeights::defaults();
  OptimizeResult r = optimize_over_pool(pool, start, 0, rng);
  CHECK(r.bleu == doctest::Approx(pool.bleu(start.values())));
}

TEST_CASE("two-candidate pools reach the pool optimum") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 1);
  std::vector<std::vector<Words>> refs;
  for (int s = 0; s < 4; ++s) refs.push_back({{"r" + std::to_string(s), "x"}});
  TuningPool pool(refs);
  // The matching candidate always has the larger distortion feature.
  for (size_t s = 0; s < refs.size(); ++s) {
    FeatureVector good(kNumFeatures), bad(kNumFeatures);
    for (int k = 0; k < kNumFeatures; ++k) good[k] = bad[k] = g(rng);
    good[kFeatDistortion] = bad[kFeatDistortion] + 1.0;
    pool.add(s, {"wrong", "y"}, bad);
    pool.add(s, refs[s][0], good);
  }
  std::vector<double> start(kNumFeatures, 0.0);
  start[kFeatDistortion] = -1.0;
  std::mt19937_64 opt_rng(4);
  OptimizeResult r = optimize_over_pool(pool, FeatureWeights(start), 2, opt_rng);
  CHECK(r.bleu == doctest::Approx(100.0));
  for (size_t s = 0; s < refs.size(); ++s) {
    CHECK(pool.select(s, r.weights.values()) == 1);
  }
}

TEST_CASE("tune keeps optimal weights and stops on an unchanged pool") {
  TranslationModel m = ambiguous_model();
  auto src = sentences({"das haus ist alt", "das buch ist alt"}, Language::kSource);
  std::vector<std::vector<Sentence>> refs;
  for (auto &r : sentences({"the house is old", "the book is old"},
                           Language::kTarget)) {
    refs.push_back({r});
  }
  TuneOptions options;
  options.max_iterations = 5;
  options.nbest_size = 20;
  options.num_restarts = 2;

  std::vector<double> lm_heavy(kNumFeatures, 0.1);
  lm_heavy[kFeatLm] = 3.0;
  TuneResult perfect = tune(m, src, refs, FeatureWeights(lm_heavy), options);
  CHECK(perfect.trace.front().dev_bleu == doctest::Approx(100.0));
  CHECK(perfect.dev_bleu == doctest::Approx(100.0));

  std::vector<double> tm_heavy(kNumFeatures, 0.0);
  tm_heavy[kFeatLm] = 0.01;
  tm_heavy[kFeatDistortion] = 1.0;
  for (int k = kFeatPhiSrcGivenTgt; k <= kFeatLexTgtGivenSrc; ++k) tm_heavy[k] = 2.0;
  TuneResult tuned = tune(m, src, refs, FeatureWeights(tm_heavy), options);
  CHECK(tuned.trace.front().dev_bleu < 100.0);
  CHECK(tuned.dev_bleu == doctest::Approx(100.0));
  CHECK(tuned.trace.size() <= options.max_iterations + 1);
  CHECK(std::isnan(tuned.trace.back().pool_bleu));
  for (const auto &run : tuned.step_history) {
    for (size_t i = 1; i < run.size(); ++i) CHECK(run[i] >= run[i - 1]);
  }
  auto lines = trace_to_lines(tuned.trace);
  REQUIRE(lines.size() == tuned.trace.size());
  CHECK(split_whitespace(lines[0]).size() == kNumFeatures + 2);

  CHECK_THROWS_AS(tune(m, {}, {}, FeatureWeights::defaults(), options),
                  UsageError);
  CHECK_THROWS_AS(tune(m, src, {}, FeatureWeights::defaults(), options),
                  DataError);
}
