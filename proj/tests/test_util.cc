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

#include "test_util.h"

#include <set>
#include <unistd.h>

#include "smt/common.h"

namespace smt::testing {

namespace fs = std::filesystem;

fs::path source_dir() { return SMT_SOURCE_DIR; }

fs::path toy_data(const std::string &file) {
  return source_dir() / "data" / "toy" / file;
}

TempDir::TempDir(const std::string &tag) {
  static int counter = 0;
  path_ = fs::temp_directory_path() /
          ("smt_" + tag + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<Sentence> toy_sentences(const std::string &file, size_t limit,
                                    Language language) {
  std::vector<Sentence> out;
  for (const auto &line : read_lines(toy_data(file))) {
    if (out.size() >= limit) break;
    Sentence s = prepare_input(line, CasePolicy::kLowercase, nullptr);
    s.language = language;
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::vector<std::string> words(const std::string &prefix, size_t n) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

size_t pick_length(std::mt19937_64 &rng) {
  double u = std::uniform_real_distribution<double>(0, 1)(rng);
  return u < 0.5 ? 1 : (u < 0.8 ? 2 : 3);
}

}  // namespace

ToyDecodingFixture make_decoding_fixture(std::mt19937_64 &rng,
                                         size_t num_entries) {
  ToyDecodingFixture f;
  f.source_vocab = words("s", 8);
  const auto target_vocab = words("t", 10);
  std::uniform_int_distribution<size_t> src_word(0, f.source_vocab.size() - 1);
  std::uniform_int_distribution<size_t> tgt_word(0, target_vocab.size() - 1);
  std::uniform_real_distribution<double> prob(0.05, 1.0);

  std::set<std::pair<std::vector<std::string>, std::vector<std::string>>> seen;
  while (f.phrases.size() < num_entries) {
    PhraseTableEntry e;
    for (size_t i = pick_length(rng); i > 0; --i) {
      e.src.push_back(f.source_vocab[src_word(rng)]);
    }
    for (size_t i = pick_length(rng); i > 0; --i) {
      e.tgt.push_back(target_vocab[tgt_word(rng)]);
    }
    if (!seen.insert({e.src, e.tgt}).second) continue;
    for (double &s : e.scores) s = prob(rng);
    ReorderingEntry r{e.src, e.tgt, {}, {}};
    for (auto *probs : {&r.forward, &r.backward}) {
      double total = 0;
      for (double &p : *probs) total += (p = prob(rng));
      for (double &p : *probs) p /= total;
    }
    f.phrases.push_back(std::move(e));
    f.reordering.push_back(std::move(r));
  }
  std::vector<Sentence> lm_corpus;
  for (int i = 0; i < 30; ++i) {
    Sentence s{{}, Language::kTarget};
    size_t len = 2 + tgt_word(rng) % 5;
    for (size_t k = 0; k < len; ++k) s.tokens.push_back(target_vocab[tgt_word(rng)]);
    lm_corpus.push_back(std::move(s));
  }
  f.lm = train_language_model(lm_corpus, 3, Smoothing::kWittenBell);
  return f;
}

std::vector<std::string> random_sentence(std::mt19937_64 &rng,
                                         const std::vector<std::string> &vocab,
                                         size_t max_len, double oov_rate) {
  std::uniform_int_distribution<size_t> len(1, max_len);
  std::uniform_int_distribution<size_t> word(0, vocab.size() - 1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::string> out;
  for (size_t i = len(rng); i > 0; --i) {
    out.push_back(u(rng) < oov_rate ? "oov" : vocab[word(rng)]);
  }
  return out;
}

std::vector<double> random_weights(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w(kNumFeatures);
  for (double &x : w) x = u(rng);
  w[kFeatLm] = std::abs(w[kFeatLm]);
  return w;
}

DecoderConfig exhaustive_config() {
  DecoderConfig c;
  c.stack_size = 1000000;
  c.distortion_limit = -1;
  c.max_options_per_span = 0;
  c.nbest_size = 1;
  return c;
}

}  // namespace smt::testing
