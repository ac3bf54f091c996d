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

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "smt/binary_table.h"
#include "smt/common.h"
#include "smt/reordering.h"
#include "test_util.h"

using namespace smt;
using Words = std::vector<std::string>;

namespace {

SentenceExtraction extract(Words f, Words e, std::vector<std::pair<int, int>> l) {
  AlignmentMatrix a(f.size(), e.size());
  for (auto [i, j] : l) a.add(i, j);
  SentencePair p{{f, Language::kSource}, {e, Language::kTarget}};
  return {f.size(), e.size(), extract_phrases(p, a, 7)};
}

const PhrasePair &find(const SentenceExtraction &s, Words src) {
  for (const auto &p : s.phrases) {
    if (p.src == src) return p;
  }
  throw std::runtime_error("phrase not found");
}

}  // namespace

TEST_CASE("classify_orientation") {
  CHECK(classify_orientation({0, 1}, {2, 3}) == Orientation::kMonotone);
  CHECK(classify_orientation({2, 3}, {0, 1}) == Orientation::kSwap);
  CHECK(classify_orientation({0, 0}, {3, 4}) == Orientation::kDiscontinuous);
  CHECK(classify_orientation({3, 4}, {0, 0}) == Orientation::kDiscontinuous);
  CHECK(orientation_name(Orientation::kSwap) == "swap");
}

TEST_CASE("smoothing formula") {
  auto p = smooth_orientations({1, 0, 0}, 0.5);
  CHECK(p[0] == doctest::Approx((1 + 0.5 / 3) / 1.5));
  CHECK(p[0] == doctest::Approx(0.7778).epsilon(1e-4));
  auto u = smooth_orientations({0, 0, 0}, 0.5);
  for (double v : u) CHECK(v == doctest::Approx(1.0 / 3));
  auto q = smooth_orientations({3, 5, 2}, 0.7);
  CHECK(q[0] + q[1] + q[2] == doctest::Approx(1.0));
}

TEST_CASE("orientations within a sentence") {
  // a b c -> z y x (full swap).
  auto s = extract({"a", "b", "c"}, {"x", "y", "z"}, {{0, 2}, {1, 1}, {2, 0}});
  const auto &b = find(s, {"b"});
  CHECK(backward_orientation(s, b) == Orientation::kSwap);
  CHECK(forward_orientation(s, b) == Orientation::kSwap);
  // Phrases at the sentence edges are monotone with respect to it.
  const auto &all = find(s, {"a", "b", "c"});
  CHECK(backward_orientation(s, all) == Orientation::kMonotone);
  CHECK(forward_orientation(s, all) == Orientation::kMonotone);

  auto mono = extract({"a", "b"}, {"x", "y"}, {{0, 0}, {1, 1}});
  CHECK(forward_orientation(mono, find(mono, {"a"})) == Orientation::kMonotone);
  CHECK(backward_orientation(mono, find(mono, {"b"})) == Orientation::kMonotone);
}

TEST_CASE("train_reordering counts and normalizes") {
  auto s = extract({"a", "b"}, {"x", "y"}, {{0, 0}, {1, 1}});
  auto counts = count_orientations({s});
  auto entries = train_reordering({s}, 0.5);
  CHECK(entries.size() == counts.size());
  for (const auto &e : entries) {
    CHECK(e.forward[0] + e.forward[1] + e.forward[2] == doctest::Approx(1.0));
    CHECK(e.backward[0] + e.backward[1] + e.backward[2] == doctest::Approx(1.0));
    CHECK(e.forward[0] == doctest::Approx(0.7778).epsilon(1e-4));
  }
}

TEST_CASE("reordering table round trips") {
  std::vector<ReorderingEntry> entries = {
      {{"a"}, {"x"}, {0.5, 0.25, 0.25}, {0.6, 0.2, 0.2}},
      {{"a", "b"}, {"x", "y"}, {0.1, 0.8, 0.1}, {0.3, 0.3, 0.4}}};
  auto text = parse_reordering_table(reordering_table_to_lines(entries));
  REQUIRE(text.size() == 2);
  CHECK(text[1].forward[1] == doctest::Approx(0.8));
  CHECK_THROWS_AS(parse_reordering_table({"a ||| x ||| 0.5 0.5"}), DataError);

  testing::TempDir dir("rt");
  binarise_reordering_table(entries, dir.path() / "rt.bin");
  auto bt = BinaryTable::open(dir.path() / "rt.bin");
  CHECK(bt.kind() == TableKind::kReordering);
  CHECK(load_reordering_table(bt) == entries);
  Sentence s{{"b", "a"}, Language::kSource};
  CHECK(load_reordering_table(bt, s).size() == 1);
}

TEST_CASE("reversing every sentence exchanges forward and backward counts") {
  std::mt19937_64 rng(12);
  std::vector<SentenceExtraction> fwd, rev;
  for (int trial = 0; trial < 200; ++trial) {
    int l = 1 + rng() % 5, m = 1 + rng() % 5;
    Words f, e;
    for (int i = 0; i < l; ++i) f.push_back("f" + std::to_string(rng() % 4));
    for (int j = 0; j < m; ++j) e.push_back("e" + std::to_string(rng() % 4));
    std::vector<std::pair<int, int>> links, flipped;
    for (int i = 0; i < l; ++i) {
      for (int j = 0; j < m; ++j) {
        if (rng() % 3 == 0) {
          links.emplace_back(i, j);
          flipped.emplace_back(l - 1 - i, m - 1 - j);
        }
      }
    }
    fwd.push_back(extract(f, e, links));
    std::reverse(f.begin(), f.end());
    std::reverse(e.begin(), e.end());
    rev.push_back(extract(f, e, flipped));
  }
  auto reversed_key = [](const std::string &phrase) {
    Words w = split_whitespace(phrase);
    std::reverse(w.begin(), w.end());
    return join(w);
  };
  std::map<std::pair<std::string, std::string>, OrientationCounts> mirror;
  for (const auto &[key, c] : count_orientations(rev)) {
    mirror[{reversed_key(key.first), reversed_key(key.second)}] = c;
  }
  auto original = count_orientations(fwd);
  REQUIRE(original.size() == mirror.size());
  for (const auto &[key, c] : original) {
    auto it = mirror.find(key);
    REQUIRE(it != mirror.end());
    CHECK(c.forward == it->second.backward);
    CHECK(c.backward == it->second.forward);
  }
}
