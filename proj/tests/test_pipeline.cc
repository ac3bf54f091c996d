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
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "smt/common.h"
#include "smt/decoder.h"
#include "smt/pipeline.h"
#include "test_util.h"

namespace fs = std::filesystem;
using namespace smt;
using Lines = std::vector<std::string>;

namespace {

PipelineConfig small_config(const fs::path &model_dir) {
  PipelineConfig c;
  c.train_src = testing::toy_data("small.src");
  c.train_tgt = testing::toy_data("small.tgt");
  c.model_dir = model_dir;
  return c;
}

Lines tail_from(const std::string &step) {
  const auto &all = pipeline_steps();
  auto it = std::find(all.begin(), all.end(), step);
  return Lines(it, all.end());
}

}  // namespace

TEST_CASE("pipeline configuration") {
  auto c = PipelineConfig::parse(
      {"# comment", "train_src = corpus/a.src", "train_tgt = /abs/b.tgt",
       "model_dir = out", "lm_order = 4", "stack_size = 50", "seed = 7",
       "symmetrization = union", "case_policy = none"},
      "/base");
  CHECK(c.train_src == fs::path("/base/corpus/a.src"));
  CHECK(c.train_tgt == fs::path("/abs/b.tgt"));
  CHECK(c.model_dir == fs::path("/base/out"));
  CHECK(c.lm_order == 4);
  CHECK(c.decoder.stack_size == 50);
  CHECK(c.seed == 7);
  CHECK(c.aligner.heuristic == Symmetrization::kUnion);
  CHECK(c.prepare.case_policy == CasePolicy::kNone);
  auto again = PipelineConfig::parse(c.to_lines());
  CHECK(again.to_lines() == c.to_lines());
  CHECK_THROWS_AS(PipelineConfig::parse({"beam_width = 3"}), UsageError);
  CHECK_THROWS_AS(PipelineConfig::parse({"lm_order = three"}), UsageError);
}

TEST_CASE("manifest lines") {
  ModelManifest m;
  m.created = "2026-01-01T00:00:00Z";
  m.done = {{"prepare", "0123456789abcdef"}, {"train-lm", "fedcba9876543210"}};
  auto lines = m.to_lines();
  CHECK(lines[0] == "# created 2026-01-01T00:00:00Z");
  auto back = ModelManifest::from_lines(lines);
  REQUIRE(back.find("train-lm") != nullptr);
  CHECK(back.find("train-lm")->checksum == "fedcba9876543210");
  CHECK(back.find("tune") == nullptr);
  CHECK(pipeline_steps().size() == 14);
}

TEST_CASE("run_pipeline completes, short-circuits and resumes") {
  testing::TempDir dir("pipeline");
  PipelineConfig c = small_config(dir.path() / "model");
  PipelineReport first = run_pipeline(c);
  CHECK(first.executed == pipeline_steps());
  CHECK(first.manifest.done.size() == 14);
  for (const auto &f : {"lm.arpa", "phrase-table.txt", "phrase-table.bin",
                        "reordering-table.txt", "reordering-table.bin",
                        "lex.f2e", "lex.e2f", "weights.txt", "config.txt",
                        "components.txt", "manifest.txt"}) {
    CHECK(fs::exists(c.model_dir / f));
  }
  CHECK_FALSE(fs::exists(c.model_dir / ".lock"));

  CHECK(run_pipeline(c).executed.empty());

  fs::remove(c.model_dir / "phrase-table.txt");
  CHECK(run_pipeline(c).executed == tail_from("build-phrase-table"));

  write_file(c.model_dir / "lm.arpa", "tampered\n");
  CHECK(run_pipeline(c).executed == tail_from("train-lm"));

  write_file(c.model_dir / ".lock", "");
  CHECK_THROWS_AS(run_pipeline(c), UsageError);
  fs::remove(c.model_dir / ".lock");

  PipelineConfig bad = c;
  bad.train_src = dir.path() / "missing.src";
  bad.model_dir = dir.path() / "other";
  CHECK_THROWS_AS(run_pipeline(bad), UsageError);

  // A failing step names itself and leaves earlier artifacts alone.
  write_lines(dir.path() / "short.tgt", Lines{"only one line"});
  bad.train_src = c.train_src;
  bad.train_tgt = dir.path() / "short.tgt";
  try {
    run_pipeline(bad);
    FAIL("expected a data error");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("step prepare") != std::string::npos);
  }
  CHECK(fs::exists(c.model_dir / "phrase-table.bin"));
}

TEST_CASE("translation sessions") {
  testing::TempDir dir("session");
  PipelineConfig c = small_config(dir.path() / "model");
  run_pipeline(c);
  TranslationModel model = load_translation_model(c.model_dir);
  auto src = read_lines(c.model_dir / "work" / "corpus.src");
  auto tgt = read_lines(c.model_dir / "work" / "corpus.tgt");

  // A single-word input whose only table entry fixes its translation.
  std::string word, expected;
  for (const auto &line : src) {
    for (const auto &w : split_whitespace(line)) {
      auto options = model.phrases.lookup(w);
      if (options.size() == 1 && split_whitespace(options[0].target).size() == 1) {
        word = w;
        expected = options[0].target;
        break;
      }
    }
    if (!word.empty()) break;
  }
  REQUIRE_FALSE(word.empty());

  fs::path log = dir.path() / "session.log";
  TranslationSession session(model, model.config, false, log);
  std::istringstream in(word + "\n\n" + src[0] + "\n");
  std::ostringstream out, err;
  serve_interactive(session, in, out, err);
  Lines printed = split_exact(out.str(), "\n");
  REQUIRE(printed.size() >= 3);
  CHECK(printed[0] == expected);
  CHECK(printed[1].empty());
  CHECK(err.str().empty());
  CHECK(session.processed() == 3);
  CHECK(read_lines(log).size() == 3);

  TranslationSession restoring(model, model.config, true);
  std::string restored = restoring.process(src[0]);
  REQUIRE_FALSE(restored.empty());
  CHECK(std::isupper(static_cast<unsigned char>(restored[0])));
  CHECK(restore_output(model, {"hello", ",", "world", "."}) == "Hello, world.");

  // Binary and text tables give the same translations.
  fs::remove(c.model_dir / "phrase-table.bin");
  fs::remove(c.model_dir / "reordering-table.bin");
  TranslationModel text_model = load_translation_model(c.model_dir);
  CHECK_FALSE(text_model.phrases.is_binary());
  CHECK(model.phrases.is_binary());
  for (size_t k = 0; k < 5; ++k) {
    Sentence s{split_whitespace(src[k]), Language::kSource};
    CHECK(translate(model, s, model.config).best ==
          translate(text_model, s, text_model.config).best);
  }

  write_file(c.model_dir / "lm.arpa", "tampered\n");
  CHECK_THROWS_AS(load_translation_model(c.model_dir), DataError);
  CHECK_THROWS_AS(load_translation_model(dir.path() / "nowhere"), DataError);
}
