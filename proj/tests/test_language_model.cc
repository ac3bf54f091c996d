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
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "smt/common.h"
#include "smt/language_model.h"
#include "test_util.h"

using namespace smt;
using Words = std::vector<std::string>;

namespace {

Sentence tgt(Words w) { return {std::move(w), Language::kTarget}; }

const std::vector<Sentence> kToy = {tgt({"the", "cat"}), tgt({"the", "dog"}),
                                    tgt({"a", "cat", "sat"})};

double context_sum(const NGramLanguageModel &m, const Words &h) {
  double sum = m.prob(kStopSymbol, h) + m.prob(kUnknownSymbol, h);
  for (const auto &w : m.vocabulary()) sum += m.prob(w, h);
  return sum;
}

}  // namespace

TEST_CASE("count_ngrams pads with start symbols") {
  auto m = count_ngrams({tgt({"a"})}, 2);
  CHECK(m.count(Words{kStartSymbol, "a"}) == 1);
  CHECK(m.count(Words{"a", kStopSymbol}) == 1);
  CHECK(m.count(Words{"a"}) == 1);
  CHECK(m.count(Words{kStopSymbol}) == 1);
  CHECK(m.count(Words{kStartSymbol}) == 0);

  auto two = count_ngrams({tgt({"the", "cat"}), tgt({"the", "dog"})}, 2);
  CHECK(two.count(Words{"the"}) == 2);
  CHECK(two.count(Words{"the", "cat"}) == 1);
  CHECK(two.count(Words{"the", "dog"}) == 1);
  CHECK(two.context_count(Words{"the"}) == 2);
  CHECK(two.continuation_types(Words{"the"}) == 2);

  CHECK_THROWS_AS(count_ngrams({}, 2), DataError);
  CHECK_THROWS_AS(count_ngrams(kToy, 0), UsageError);
  CHECK_THROWS_AS(count_ngrams(kToy, 6), UsageError);
}

TEST_CASE("maximum likelihood estimates") {
  auto m = estimate_mle(count_ngrams({tgt({"the", "cat"}), tgt({"the", "dog"})}, 2));
  CHECK(m.prob("cat", Words{"the"}) == doctest::Approx(0.5));
  CHECK(m.prob("the", Words{"cat"}) == 0.0);
  CHECK(is_log_zero(m.logprob("the", Words{"cat"})));

  auto uni = estimate_mle(count_ngrams({tgt({"a"})}, 1));
  CHECK(uni.prob("a", Words{}) == doctest::Approx(0.5));
  CHECK(uni.prob(kStopSymbol, Words{}) == doctest::Approx(0.5));
  CHECK(sentence_logprob(uni, tgt({"a"})) ==
        doctest::Approx(-1.3862944).epsilon(1e-7));
  CHECK(is_log_zero(sentence_logprob(m, tgt({"cat", "the"}))));
}

TEST_CASE("sentence_logprob has one factor per token plus stop") {
  auto m = train_language_model(kToy, 3, Smoothing::kWittenBell);
  Words s = {"the", "cat", "sat"};
  const std::string &st = kStartSymbol;
  double expected = m.logprob("the", Words{st, st}) +
                    m.logprob("cat", Words{st, "the"}) +
                    m.logprob("sat", Words{"the", "cat"}) +
                    m.logprob(kStopSymbol, Words{"cat", "sat"});
  CHECK(sentence_logprob(m, tgt(s)) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(sentence_logprob(m, tgt({})) ==
        doctest::Approx(m.logprob(kStopSymbol, Words{st, st})).epsilon(1e-14));
}

TEST_CASE("Witten-Bell interpolation") {
  auto m = train_language_model(kToy, 2, Smoothing::kWittenBell);
  // "sat" has one continuation seen once, so lambda = 1/2.
  double uni = m.prob(kStopSymbol, Words{});
  CHECK(m.prob(kStopSymbol, Words{"sat"}) ==
        doctest::Approx(0.5 * 1.0 + 0.5 * uni));
  double floor = 1.0 / (m.vocabulary().size() + 2);
  CHECK(m.prob("zebra", Words{"the"}) > 0.0);
  CHECK(m.prob("zebra", Words{}) == doctest::Approx(floor));
  for (const auto &h : m.observed_contexts()) {
    CHECK(context_sum(m, h) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(context_sum(m, Words{"never", "seen"}) ==
        doctest::Approx(1.0).epsilon(1e-9));

  std::vector<Words> raw;
  for (const auto &s : kToy) raw.push_back(s.tokens);
  oracle::WittenBellOracle oracle(raw, 2);
  for (const auto &w : {"the", "cat", "dog", "a", "sat", "</s>", "zebra"}) {
    for (const auto &h : {"the", "cat", "<s>", "zebra"}) {
      CHECK(m.prob(w, Words{h}) ==
            doctest::Approx(oracle.prob(w, Words{h})).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(parse_smoothing("kneser-ney"), UsageError);
}

TEST_CASE("ARPA export and import") {
  testing::TempDir dir("arpa");
  auto m = train_language_model(kToy, 2, Smoothing::kWittenBell);
  export_arpa(m, dir.path() / "lm.arpa");
  auto back = import_arpa(dir.path() / "lm.arpa");
  CHECK(back.order() == 2);
  CHECK(back.prob("cat", Words{"the"}) ==
        doctest::Approx(m.prob("cat", Words{"the"})).epsilon(1e-9));
  CHECK(back.prob("zebra", Words{"a"}) ==
        doctest::Approx(m.prob("zebra", Words{"a"})).epsilon(1e-9));

  auto five = train_language_model(kToy, 5, Smoothing::kWittenBell);
  std::string text = to_arpa(five);
  for (int k = 1; k <= 5; ++k) {
    CHECK(text.find("\\" + std::to_string(k) + "-grams:") != std::string::npos);
  }
  CHECK(text.find("\\6-grams:") == std::string::npos);
}

TEST_CASE("ARPA parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_arpa(""), DataError);
  try {
    parse_arpa("\\data\\\n\n\\1-grams:\n-1\ta\n\\end\\\n");
    FAIL("expected a parse error");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS_AS(
      parse_arpa("\\data\\\nngram 1=2\n\n\\1-grams:\n-1\ta\n\\end\\\n"),
      DataError);
}
