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

#ifndef SMT_TESTS_TEST_UTIL_H_
#define SMT_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "smt/corpus.h"
#include "smt/decoder.h"
#include "smt/language_model.h"
#include "smt/phrase_model.h"
#include "smt/reordering.h"

namespace smt::testing {

std::filesystem::path source_dir();
std::filesystem::path toy_data(const std::string &file);

// A fresh directory removed again on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag);
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Tokenized, lowercased lines of a bundled toy file.
std::vector<Sentence> toy_sentences(const std::string &file, size_t limit,
                                    Language language);

// Random phrase table, reordering table and trigram LM over small synthetic
// vocabularies, for exhaustive decoder comparisons.
struct ToyDecodingFixture {
  std::vector<PhraseTableEntry> phrases;
  std::vector<ReorderingEntry> reordering;
  NGramLanguageModel lm{3};
  std::vector<std::string> source_vocab;
};
ToyDecodingFixture make_decoding_fixture(std::mt19937_64 &rng,
                                         size_t num_entries);

std::vector<std::string> random_sentence(std::mt19937_64 &rng,
                                         const std::vector<std::string> &vocab,
                                         size_t max_len, double oov_rate);
std::vector<double> random_weights(std::mt19937_64 &rng);

// Decoder settings that disable all pruning.
DecoderConfig exhaustive_config();

}  // namespace smt::testing

#endif  // SMT_TESTS_TEST_UTIL_H_
