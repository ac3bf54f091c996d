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

// Generates the bundled toy parallel corpus: English-like source sentences
// paired with a romanized verb-first target language in which adjectives
// follow nouns, "the" becomes "al" and "a" is dropped.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

namespace {

using Lexicon = std::vector<std::pair<std::string, std::string>>;

const Lexicon kNouns = {
    {"boy", "walad"},      {"girl", "bint"},       {"man", "rajul"},
    {"woman", "imraa"},    {"teacher", "mudarris"}, {"student", "talib"},
    {"book", "kitab"},     {"letter", "risala"},   {"apple", "tuffaha"},
    {"house", "bayt"},     {"car", "sayyara"},     {"city", "madina"},
    {"cat", "qitta"},      {"dog", "kalb"},        {"door", "bab"},
    {"school", "madrasa"},
};
const Lexicon kAdjectives = {
    {"old", "qadim"},  {"new", "jadid"},   {"big", "kabir"},
    {"small", "saghir"}, {"red", "ahmar"}, {"beautiful", "jamil"},
};
const Lexicon kVerbs = {
    {"reads", "yaqra"},  {"writes", "yaktub"}, {"sees", "yara"},
    {"eats", "yakul"},   {"buys", "yashtari"}, {"loves", "yuhib"},
    {"opens", "yaftah"}, {"visits", "yazur"},
};
const Lexicon kPrepositions = {{"in", "fi"}, {"near", "qurb"}, {"from", "min"}};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::pair<std::string, std::string> sentence() {
    std::vector<std::string> src, tgt;
    auto [subj_src, subj_tgt] = noun_phrase();
    const auto &verb = pick(kVerbs);
    auto [obj_src, obj_tgt] = noun_phrase();
    src = subj_src;
    src.push_back(verb.first);
    src.insert(src.end(), obj_src.begin(), obj_src.end());
    tgt.push_back(verb.second);
    tgt.insert(tgt.end(), subj_tgt.begin(), subj_tgt.end());
    tgt.insert(tgt.end(), obj_tgt.begin(), obj_tgt.end());
    if (below(3) == 0) {
      const auto &prep = pick(kPrepositions);
      auto [pp_src, pp_tgt] = noun_phrase();
      src.push_back(prep.first);
      src.insert(src.end(), pp_src.begin(), pp_src.end());
      tgt.push_back(prep.second);
      tgt.insert(tgt.end(), pp_tgt.begin(), pp_tgt.end());
    }
    return {finish(src), finish(tgt)};
  }

 private:
  size_t below(size_t n) { return static_cast<size_t>(rng_() % n); }
  const std::pair<std::string, std::string> &pick(const Lexicon &l) {
    return l[below(l.size())];
  }

  std::pair<std::vector<std::string>, std::vector<std::string>> noun_phrase() {
    std::vector<std::string> src, tgt;
    bool definite = below(3) != 0;
    src.push_back(definite ? "the" : "a");
    if (definite) tgt.push_back("al");
    const auto &noun = pick(kNouns);
    if (below(2) == 0) {
      const auto &adj = pick(kAdjectives);
      src.push_back(adj.first);
      src.push_back(noun.first);
      tgt.push_back(noun.second);
      tgt.push_back(adj.second);
    } else {
      src.push_back(noun.first);
      tgt.push_back(noun.second);
    }
    return {src, tgt};
  }

  static std::string finish(const std::vector<std::string> &words) {
    std::string out;
    for (const auto &w : words) {
      if (!out.empty()) out += ' ';
      out += w;
    }
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out + ".";
  }

  std::mt19937_64 rng_;
};

void write_split(const std::filesystem::path &dir, const std::string &name,
                 Generator &gen, size_t count) {
  std::ofstream src(dir / (name + ".src")), tgt(dir / (name + ".tgt"));
  if (!src || !tgt) throw std::runtime_error("cannot write " + name);
  for (size_t i = 0; i < count; ++i) {
    auto [s, t] = gen.sentence();
    src << s << '\n';
    tgt << t << '\n';
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Toy parallel corpus generator", "make_toy_corpus"};
  std::string out_dir = "data/toy";
  std::uint64_t seed = 42;
  size_t train = 500, dev = 50, test = 50, small = 200;
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--train", train, "Training pairs");
  app.add_option("--dev", dev, "Dev pairs");
  app.add_option("--test", test, "Test pairs");
  app.add_option("--small", small, "Pairs in the small training set");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    Generator gen(seed);
    write_split(out_dir, "train", gen, train);
    write_split(out_dir, "dev", gen, dev);
    write_split(out_dir, "test", gen, test);
    write_split(out_dir, "small", gen, small);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
