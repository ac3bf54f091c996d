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

#include "smt/pipeline.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>

#include "smt/binary_table.h"
#include "smt/common.h"
#include "smt/phrase_model.h"
#include "smt/reordering.h"

namespace smt {
namespace {

namespace fs = std::filesystem;

std::string case_policy_name(CasePolicy p) {
  switch (p) {
    case CasePolicy::kLowercase: return "lowercase";
    case CasePolicy::kUppercase: return "uppercase";
    case CasePolicy::kNone: return "none";
  }
  return "lowercase";
}

std::string symmetrization_name(Symmetrization s) {
  switch (s) {
    case Symmetrization::kIntersection: return "intersection";
    case Symmetrization::kUnion: return "union";
    case Symmetrization::kGrowDiagFinalAnd: return "gdfa";
  }
  return "gdfa";
}

ParallelCorpus read_corpus(const fs::path &src, const fs::path &tgt) {
  auto s = read_lines(src);
  auto t = read_lines(tgt);
  if (s.size() != t.size()) {
    throw DataError(src.string() + " and " + tgt.string() +
                    " differ in line count");
  }
  ParallelCorpus corpus;
  for (size_t k = 0; k < s.size(); ++k) {
    corpus.push_back({{split_whitespace(s[k]), Language::kSource},
                      {split_whitespace(t[k]), Language::kTarget}});
  }
  return corpus;
}

// work/extract.txt: "S src_len tgt_len" opens a sentence, then one
// "P ss se ts te ||| src ||| tgt ||| links" line per phrase pair.
std::vector<std::string> extraction_to_lines(
    const std::vector<SentenceExtraction> &extracted) {
  std::vector<std::string> lines;
  for (const auto &s : extracted) {
    lines.push_back("S " + std::to_string(s.src_len) + " " +
                    std::to_string(s.tgt_len));
    for (const auto &p : s.phrases) {
      std::string links;
      for (const auto &[i, j] : p.alignment) {
        if (!links.empty()) links += ' ';
        links += std::to_string(i) + "-" + std::to_string(j);
      }
      lines.push_back("P " + std::to_string(p.src_span.start) + " " +
                      std::to_string(p.src_span.end) + " " +
                      std::to_string(p.tgt_span.start) + " " +
                      std::to_string(p.tgt_span.end) + " ||| " +
                      join(p.src) + " ||| " + join(p.tgt) + " ||| " + links);
    }
  }
  return lines;
}

std::vector<SentenceExtraction> parse_extraction(
    const std::vector<std::string> &lines) {
  std::vector<SentenceExtraction> out;
  for (size_t n = 0; n < lines.size(); ++n) {
    std::string where = "extract line " + std::to_string(n + 1);
    const std::string &line = lines[n];
    if (line.rfind("S ", 0) == 0) {
      auto f = split_whitespace(line);
      if (f.size() != 3) throw DataError(where + ": bad sentence header");
      out.push_back({static_cast<size_t>(parse_int(f[1], where)),
                     static_cast<size_t>(parse_int(f[2], where)),
                     {}});
      continue;
    }
    auto parts = split_exact(line, " ||| ");
    if (parts.size() != 4 || out.empty() || line.rfind("P ", 0) != 0) {
      throw DataError(where + ": malformed phrase line");
    }
    auto spans = split_whitespace(parts[0]);
    if (spans.size() != 5) throw DataError(where + ": bad spans");
    PhrasePair p;
    p.src_span = {static_cast<int>(parse_int(spans[1], where)),
                  static_cast<int>(parse_int(spans[2], where))};
    p.tgt_span = {static_cast<int>(parse_int(spans[3], where)),
                  static_cast<int>(parse_int(spans[4], where))};
    p.src = split_whitespace(parts[1]);
    p.tgt = split_whitespace(parts[2]);
    for (const auto &link : split_whitespace(parts[3])) {
      auto ij = split_exact(link, "-");
      if (ij.size() != 2) throw DataError(where + ": bad link " + link);
      p.alignment.emplace_back(static_cast<int>(parse_int(ij[0], where)),
                               static_cast<int>(parse_int(ij[1], where)));
    }
    out.back().phrases.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> counts_to_lines(
    const std::vector<std::pair<std::pair<std::string, std::string>,
                                OrientationCounts>> &counts) {
  std::vector<std::string> lines;
  for (const auto &[key, c] : counts) {
    std::string line = key.first + " ||| " + key.second + " |||";
    for (long long v : c.forward) line += " " + std::to_string(v);
    for (long long v : c.backward) line += " " + std::to_string(v);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<ReorderingEntry> smooth_count_lines(
    const std::vector<std::string> &lines, double sigma) {
  if (!(sigma > 0.0)) throw UsageError("reordering sigma must be > 0");
  std::vector<ReorderingEntry> out;
  for (size_t n = 0; n < lines.size(); ++n) {
    std::string where = "reordering counts line " + std::to_string(n + 1);
    auto parts = split_exact(lines[n], " ||| ");
    if (parts.size() != 3) throw DataError(where + ": expected 3 fields");
    auto values = split_whitespace(parts[2]);
    if (values.size() != 6) throw DataError(where + ": expected 6 counts");
    std::array<long long, 3> fwd{}, bwd{};
    for (size_t k = 0; k < 3; ++k) {
      fwd[k] = parse_int(values[k], where);
      bwd[k] = parse_int(values[k + 3], where);
    }
    out.push_back({split_whitespace(parts[0]), split_whitespace(parts[1]),
                   smooth_orientations(fwd, sigma),
                   smooth_orientations(bwd, sigma)});
  }
  return out;
}

std::vector<PhraseTableEntry> score_extraction(
    const std::vector<SentenceExtraction> &extracted, const fs::path &lex_dir) {
  LexicalTable f2e = LexicalTable::from_lines(read_lines(lex_dir / "lex.f2e"),
                                              true);
  LexicalTable e2f = LexicalTable::from_lines(read_lines(lex_dir / "lex.e2f"),
                                              false);
  return score_phrases(extracted, f2e, e2f);
}

std::vector<SentenceExtraction> extract_from_dir(const fs::path &dir,
                                                 int max_phrase_len) {
  ParallelCorpus corpus =
      read_corpus(dir / "corpus.src", dir / "corpus.tgt");
  auto aligned = parse_alignments(read_lines(dir / "aligned.txt"), corpus);
  return extract_corpus(corpus, aligned, max_phrase_len);
}

void copy_contents(const fs::path &from, const fs::path &to) {
  write_file(to, read_file(from));
}

std::string timestamp() {
  std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

bool parse_bool_flag(std::string_view v, const std::string &where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError(where + ": expected a boolean, got '" + std::string(v) + "'");
}

// Exclusive ownership of a model directory for one run.
class DirectoryLock {
 public:
  explicit DirectoryLock(fs::path path) : path_(std::move(path)) {
    FILE *f = std::fopen(path_.c_str(), "wx");
    if (f == nullptr) {
      throw UsageError("model directory is locked by another run: " +
                       path_.string());
    }
    std::fclose(f);
  }
  ~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock &) = delete;
  DirectoryLock &operator=(const DirectoryLock &) = delete;

 private:
  fs::path path_;
};

struct StepDef {
  std::string name;
  std::vector<std::string> outputs;
  std::string paired_save;  // build steps list their save step
};

const std::vector<StepDef> &step_defs() {
  static const std::vector<StepDef> kSteps = {
      {"prepare",
       {"work/corpus.src", "work/corpus.tgt", "truecase.src", "truecase.tgt"},
       ""},
      {"train-lm", {"lm.arpa"}, ""},
      {"train-align",
       {"work/align.fwd", "work/align.rev", "work/ttable.f2e",
        "work/ttable.e2f"},
       "save-alignment"},
      {"save-alignment", {"work/aligned.txt"}, ""},
      {"build-lex-table", {"work/lex.f2e", "work/lex.e2f"}, "save-lex-table"},
      {"save-lex-table", {"lex.f2e", "lex.e2f"}, ""},
      {"build-phrase-table", {"work/extract.txt"}, "save-phrase-table"},
      {"save-phrase-table", {"phrase-table.txt"}, ""},
      {"build-reordering", {"work/reordering-counts.txt"}, "save-reordering"},
      {"save-reordering", {"reordering-table.txt"}, ""},
      {"build-model", {"weights.init.txt", "config.txt"}, "save-model"},
      {"save-model", {"components.txt"}, ""},
      {"tune", {"weights.txt", "tuning-trace.txt"}, ""},
      {"binarise", {"phrase-table.bin", "reordering-table.bin"}, ""},
  };
  return kSteps;
}

std::string outputs_checksum(const fs::path &dir, const StepDef &step) {
  std::string combined;
  for (const auto &o : step.outputs) {
    if (!fs::exists(dir / o)) return "";
    combined += o + ":" + file_checksum(dir / o) + "\n";
  }
  return hex64(fnv1a(combined));
}

bool step_valid(const fs::path &dir, const ModelManifest &manifest,
                const StepDef &step) {
  const ManifestEntry *e = manifest.find(step.name);
  if (e == nullptr) return false;
  std::string sum = outputs_checksum(dir, step);
  return !sum.empty() && sum == e->checksum;
}

void run_step(const std::string &name, const PipelineConfig &config) {
  const fs::path &dir = config.model_dir;
  const fs::path work = dir / "work";
  if (name == "prepare") {
    PreparedCorpus p = prepare_files(config.train_src, config.train_tgt,
                                     config.prepare, work);
    write_lines(dir / "truecase.src", p.source_truecaser.to_lines());
    write_lines(dir / "truecase.tgt", p.target_truecaser.to_lines());
  } else if (name == "train-lm") {
    train_lm_file(work / "corpus.tgt", config.lm_order, config.lm_smoothing,
                  dir / "lm.arpa");
  } else if (name == "train-align") {
    ParallelCorpus corpus =
        read_corpus(work / "corpus.src", work / "corpus.tgt");
    CorpusAlignment a = align_corpus(corpus, config.aligner);
    write_lines(work / "align.fwd", alignments_to_lines(a.forward_links));
    write_lines(work / "align.rev", alignments_to_lines(a.backward_links));
    write_lines(work / "ttable.f2e", a.forward.translation.to_lines(true, 17));
    write_lines(work / "ttable.e2f",
                a.backward.translation.to_lines(false, 17));
  } else if (name == "save-alignment") {
    ParallelCorpus corpus =
        read_corpus(work / "corpus.src", work / "corpus.tgt");
    auto fwd = parse_alignments(read_lines(work / "align.fwd"), corpus);
    auto rev = parse_alignments(read_lines(work / "align.rev"), corpus);
    std::vector<AlignmentMatrix> sym;
    for (size_t k = 0; k < fwd.size(); ++k) {
      sym.push_back(symmetrize(fwd[k], rev[k], config.aligner.heuristic));
    }
    write_lines(work / "aligned.txt", alignments_to_lines(sym));
  } else if (name == "build-lex-table") {
    auto f2e = LexicalTable::from_lines(read_lines(work / "ttable.f2e"), true);
    auto e2f = LexicalTable::from_lines(read_lines(work / "ttable.e2f"), false);
    write_lines(work / "lex.f2e", f2e.to_lines(true));
    write_lines(work / "lex.e2f", e2f.to_lines(false));
  } else if (name == "save-lex-table") {
    copy_contents(work / "lex.f2e", dir / "lex.f2e");
    copy_contents(work / "lex.e2f", dir / "lex.e2f");
  } else if (name == "build-phrase-table") {
    write_lines(work / "extract.txt",
                extraction_to_lines(
                    extract_from_dir(work, config.max_phrase_len)));
  } else if (name == "save-phrase-table") {
    auto extracted = parse_extraction(read_lines(work / "extract.txt"));
    write_lines(dir / "phrase-table.txt",
                phrase_table_to_lines(score_extraction(extracted, work)));
  } else if (name == "build-reordering") {
    auto extracted = parse_extraction(read_lines(work / "extract.txt"));
    write_lines(work / "reordering-counts.txt",
                counts_to_lines(count_orientations(extracted)));
  } else if (name == "save-reordering") {
    write_lines(dir / "reordering-table.txt",
                reordering_table_to_lines(smooth_count_lines(
                    read_lines(work / "reordering-counts.txt"),
                    config.reordering_sigma)));
  } else if (name == "build-model") {
    write_lines(dir / "weights.init.txt", FeatureWeights::defaults().to_lines());
    write_lines(dir / "config.txt",
                decoder_config_to_lines(config.decoder,
                                        config.prepare.case_policy));
  } else if (name == "save-model") {
    package_model(dir, config.decoder, config.prepare.case_policy);
  } else if (name == "tune") {
    if (config.dev_src.empty() || config.dev_tgt.empty()) {
      copy_contents(dir / "weights.init.txt", dir / "weights.txt");
      write_lines(dir / "tuning-trace.txt",
                  std::vector<std::string>{"# no dev set; initial weights"});
    } else {
      TuneOptions options;
      options.max_iterations = config.tune_iterations;
      options.nbest_size = config.tune_nbest;
      options.num_restarts = config.tune_restarts;
      options.seed = config.seed;
      options.decoder = config.decoder;
      tune_model(dir, config.dev_src, config.dev_tgt, options,
                 dir / "weights.txt");
    }
  } else if (name == "binarise") {
    binarise_table(dir / "phrase-table.txt", dir / "phrase-table.bin");
    binarise_table(dir / "reordering-table.txt", dir / "reordering-table.bin");
  } else {
    throw InvariantError("unknown pipeline step " + name);
  }
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
  std::string where = "config key '" + std::string(key) + "'";
  auto as_size = [&] {
    long long v = parse_int(value, where);
    if (v < 0) throw UsageError(where + " must be non-negative");
    return static_cast<size_t>(v);
  };
  try {
    if (key == "train_src") {
      train_src = std::string(value);
    } else if (key == "train_tgt") {
      train_tgt = std::string(value);
    } else if (key == "dev_src") {
      dev_src = std::string(value);
    } else if (key == "dev_tgt") {
      dev_tgt = std::string(value);
    } else if (key == "model_dir") {
      model_dir = std::string(value);
    } else if (key == "case_policy") {
      prepare.case_policy = parse_case_policy(value);
    } else if (key == "max_len") {
      prepare.clean.max_len = as_size();
    } else if (key == "max_ratio") {
      prepare.clean.max_ratio = parse_double(value, where);
    } else if (key == "lm_order") {
      lm_order = static_cast<int>(parse_int(value, where));
    } else if (key == "lm_smoothing") {
      lm_smoothing = parse_smoothing(value);
    } else if (key == "ibm1_iterations") {
      aligner.ibm1_iterations = static_cast<int>(as_size());
    } else if (key == "ibm2_iterations") {
      aligner.ibm2_iterations = static_cast<int>(as_size());
    } else if (key == "symmetrization") {
      aligner.heuristic = parse_symmetrization(value);
    } else if (key == "max_phrase_len") {
      max_phrase_len = static_cast<int>(parse_int(value, where));
    } else if (key == "reordering_sigma") {
      reordering_sigma = parse_double(value, where);
    } else if (key == "stack_size") {
      decoder.stack_size = as_size();
    } else if (key == "distortion_limit") {
      decoder.distortion_limit = static_cast<int>(parse_int(value, where));
    } else if (key == "max_options_per_span") {
      decoder.max_options_per_span = as_size();
    } else if (key == "recombine") {
      decoder.recombine = parse_bool_flag(value, where);
    } else if (key == "tune_iterations") {
      tune_iterations = as_size();
    } else if (key == "nbest_size") {
      tune_nbest = as_size();
    } else if (key == "num_restarts") {
      tune_restarts = as_size();
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(as_size());
    } else {
      throw UsageError("unknown config key '" + std::string(key) + "'");
    }
  } catch (const DataError &e) {
    throw UsageError(e.what());
  }
}

PipelineConfig PipelineConfig::parse(const std::vector<std::string> &lines,
                                     const fs::path &base_dir) {
  PipelineConfig config;
  for (size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(n + 1) +
                       ": expected 'key = value'");
    }
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (!base_dir.empty()) {
    for (fs::path *p : {&config.train_src, &config.train_tgt, &config.dev_src,
                        &config.dev_tgt, &config.model_dir}) {
      if (!p->empty() && p->is_relative()) *p = base_dir / *p;
    }
  }
  return config;
}

PipelineConfig PipelineConfig::load(const fs::path &file) {
  if (!fs::exists(file)) {
    throw UsageError("config file not found: " + file.string());
  }
  return parse(read_lines(file), file.parent_path());
}

std::vector<std::string> PipelineConfig::to_lines() const {
  return {
      "train_src = " + train_src.string(),
      "train_tgt = " + train_tgt.string(),
      "dev_src = " + dev_src.string(),
      "dev_tgt = " + dev_tgt.string(),
      "model_dir = " + model_dir.string(),
      "case_policy = " + case_policy_name(prepare.case_policy),
      "max_len = " + std::to_string(prepare.clean.max_len),
      "max_ratio = " + format_sig(prepare.clean.max_ratio, 17),
      "lm_order = " + std::to_string(lm_order),
      std::string("lm_smoothing = ") +
          (lm_smoothing == Smoothing::kMle ? "mle" : "witten-bell"),
      "ibm1_iterations = " + std::to_string(aligner.ibm1_iterations),
      "ibm2_iterations = " + std::to_string(aligner.ibm2_iterations),
      "symmetrization = " + symmetrization_name(aligner.heuristic),
      "max_phrase_len = " + std::to_string(max_phrase_len),
      "reordering_sigma = " + format_sig(reordering_sigma, 17),
      "stack_size = " + std::to_string(decoder.stack_size),
      "distortion_limit = " + std::to_string(decoder.distortion_limit),
      "max_options_per_span = " + std::to_string(decoder.max_options_per_span),
      std::string("recombine = ") + (decoder.recombine ? "true" : "false"),
      "tune_iterations = " + std::to_string(tune_iterations),
      "nbest_size = " + std::to_string(tune_nbest),
      "num_restarts = " + std::to_string(tune_restarts),
      "seed = " + std::to_string(seed),
  };
}

const std::vector<std::string> &pipeline_steps() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    for (const auto &s : step_defs()) names.push_back(s.name);
    return names;
  }();
  return kNames;
}

const ManifestEntry *ModelManifest::find(std::string_view step) const {
  for (const auto &e : done) {
    if (e.step == step) return &e;
  }
  return nullptr;
}

std::vector<std::string> ModelManifest::to_lines() const {
  std::vector<std::string> lines = {"# created " + created};
  for (const auto &e : done) lines.push_back(e.step + " DONE " + e.checksum);
  return lines;
}

ModelManifest ModelManifest::from_lines(const std::vector<std::string> &lines) {
  ModelManifest m;
  for (size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = trim(lines[n]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.rfind("# created ", 0) == 0) m.created = line.substr(10);
      continue;
    }
    auto f = split_whitespace(line);
    if (f.size() != 3 || f[1] != "DONE") {
      throw DataError("manifest line " + std::to_string(n + 1) +
                      ": expected 'step DONE checksum'");
    }
    m.done.push_back({f[0], f[2]});
  }
  return m;
}

PipelineReport run_pipeline(const PipelineConfig &config,
                            const std::function<void(std::string_view)> &log) {
  for (const fs::path *p : {&config.train_src, &config.train_tgt}) {
    if (p->empty() || !fs::exists(*p)) {
      throw UsageError("training file not found: " + p->string());
    }
  }
  if (config.dev_src.empty() != config.dev_tgt.empty()) {
    throw UsageError("dev_src and dev_tgt must be given together");
  }
  for (const fs::path *p : {&config.dev_src, &config.dev_tgt}) {
    if (!p->empty() && !fs::exists(*p)) {
      throw UsageError("dev file not found: " + p->string());
    }
  }
  if (config.model_dir.empty()) throw UsageError("model_dir is not set");
  fs::create_directories(config.model_dir / "work");
  DirectoryLock lock(config.model_dir / ".lock");

  const fs::path manifest_path = config.model_dir / "manifest.txt";
  ModelManifest previous;
  if (fs::exists(manifest_path)) {
    previous = ModelManifest::from_lines(read_lines(manifest_path));
  }
  const auto &steps = step_defs();
  std::map<std::string, bool> valid;
  for (const auto &s : steps) {
    valid[s.name] = step_valid(config.model_dir, previous, s);
  }
  size_t first_invalid = steps.size();
  for (size_t i = 0; i < steps.size(); ++i) {
    bool ok = valid[steps[i].name] &&
              (steps[i].paired_save.empty() || valid[steps[i].paired_save]);
    if (!ok) {
      first_invalid = i;
      break;
    }
  }

  PipelineReport report;
  report.manifest.created = timestamp();
  for (size_t i = 0; i < first_invalid; ++i) {
    report.manifest.done.push_back(*previous.find(steps[i].name));
  }
  for (size_t i = first_invalid; i < steps.size(); ++i) {
    const auto &step = steps[i];
    if (log) log("step " + step.name);
    try {
      run_step(step.name, config);
    } catch (const UsageError &e) {
      throw UsageError("step " + step.name + ": " + e.what());
    } catch (const DataError &e) {
      throw DataError("step " + step.name + ": " + e.what());
    }
    std::string sum = outputs_checksum(config.model_dir, step);
    if (sum.empty()) {
      throw InvariantError("step " + step.name + " left an output missing");
    }
    report.manifest.done.push_back({step.name, sum});
    report.executed.push_back(step.name);
    write_lines(manifest_path, report.manifest.to_lines());
  }
  if (report.executed.empty()) {
    report.manifest = previous;
    if (log) log("model is up to date");
  }
  return report;
}

PreparedCorpus prepare_files(const fs::path &src, const fs::path &tgt,
                             const PrepareOptions &options,
                             const fs::path &out_dir) {
  PreparedCorpus p = prepare_corpus(read_lines(src), read_lines(tgt), options);
  if (p.corpus.empty()) {
    throw DataError("no sentence pairs survived preparation of " +
                    src.string());
  }
  std::vector<std::string> s, t;
  for (const auto &pair : p.corpus) {
    s.push_back(join(pair.source.tokens));
    t.push_back(join(pair.target.tokens));
  }
  write_lines(out_dir / "corpus.src", s);
  write_lines(out_dir / "corpus.tgt", t);
  write_lines(out_dir / "truecase.src", p.source_truecaser.to_lines());
  write_lines(out_dir / "truecase.tgt", p.target_truecaser.to_lines());
  return p;
}

void train_lm_file(const fs::path &corpus, int order, Smoothing smoothing,
                   const fs::path &out) {
  auto sentences = lines_to_sentences(read_lines(corpus), Language::kTarget);
  export_arpa(train_language_model(sentences, order, smoothing), out);
}

void train_align_files(const fs::path &src, const fs::path &tgt,
                       const AlignerOptions &options, const fs::path &out_dir) {
  ParallelCorpus corpus = read_corpus(src, tgt);
  CorpusAlignment a = align_corpus(corpus, options);
  copy_contents(src, out_dir / "corpus.src");
  copy_contents(tgt, out_dir / "corpus.tgt");
  write_lines(out_dir / "align.fwd", alignments_to_lines(a.forward_links));
  write_lines(out_dir / "align.rev", alignments_to_lines(a.backward_links));
  write_lines(out_dir / "aligned.txt", alignments_to_lines(a.symmetrized));
  write_lines(out_dir / "ttable.f2e", a.forward.translation.to_lines(true, 17));
  write_lines(out_dir / "ttable.e2f",
              a.backward.translation.to_lines(false, 17));
  write_lines(out_dir / "lex.f2e", a.forward.translation.to_lines(true));
  write_lines(out_dir / "lex.e2f", a.backward.translation.to_lines(false));
}

void extract_phrase_table(const fs::path &aligned_dir, int max_phrase_len,
                          const fs::path &out) {
  auto extracted = extract_from_dir(aligned_dir, max_phrase_len);
  write_lines(out, phrase_table_to_lines(
                       score_extraction(extracted, aligned_dir)));
}

void train_reordering_table(const fs::path &aligned_dir, int max_phrase_len,
                            double sigma, const fs::path &out) {
  auto extracted = extract_from_dir(aligned_dir, max_phrase_len);
  write_lines(out, reordering_table_to_lines(train_reordering(extracted, sigma)));
}

void binarise_table(const fs::path &in, const fs::path &out) {
  auto lines = read_lines(in);
  if (lines.empty()) throw DataError(in.string() + " is empty");
  auto fields = split_exact(lines.front(), " ||| ");
  size_t scores = fields.size() == 3 ? split_whitespace(fields[2]).size() : 0;
  if (scores == 4) {
    binarise_phrase_table(parse_phrase_table(lines), out);
  } else if (scores == 6) {
    binarise_reordering_table(parse_reordering_table(lines), out);
  } else {
    throw DataError(in.string() +
                    ": not a phrase (4 scores) or reordering (6 scores) table");
  }
}

void package_model(const fs::path &model_dir, const DecoderConfig &decoder,
                   CasePolicy case_policy) {
  if (!fs::exists(model_dir / "weights.init.txt")) {
    write_lines(model_dir / "weights.init.txt",
                FeatureWeights::defaults().to_lines());
  }
  if (!fs::exists(model_dir / "config.txt")) {
    write_lines(model_dir / "config.txt",
                decoder_config_to_lines(decoder, case_policy));
  }
  static const char *kComponents[] = {
      "lm.arpa",       "phrase-table.txt", "reordering-table.txt",
      "lex.f2e",       "lex.e2f",          "truecase.src",
      "truecase.tgt",  "config.txt",       "weights.init.txt"};
  std::vector<std::string> lines;
  for (const char *name : kComponents) {
    if (!fs::exists(model_dir / name)) {
      throw DataError("model component missing: " +
                      (model_dir / name).string());
    }
    lines.push_back(std::string(name) + " " +
                    file_checksum(model_dir / name));
  }
  write_lines(model_dir / "components.txt", lines);
}

TuneResult tune_model(const fs::path &model_dir, const fs::path &dev_src,
                      const fs::path &dev_ref, const TuneOptions &options,
                      const fs::path &weights_out) {
  TranslationModel model = load_translation_model(model_dir);
  auto src_lines = read_lines(dev_src);
  auto ref_lines = read_lines(dev_ref);
  if (src_lines.size() != ref_lines.size()) {
    throw DataError("dev source and reference differ in line count");
  }
  std::vector<Sentence> src;
  std::vector<std::vector<Sentence>> refs;
  for (size_t k = 0; k < src_lines.size(); ++k) {
    src.push_back(prepare_input(src_lines[k], model.case_policy,
                                &model.source_truecaser));
    Sentence r = prepare_input(ref_lines[k], model.case_policy,
                               &model.target_truecaser);
    r.language = Language::kTarget;
    refs.push_back({r});
  }
  TuneResult result = tune(model, src, refs, model.weights, options);
  write_lines(weights_out, result.weights.to_lines());
  write_lines(weights_out.parent_path() / "tuning-trace.txt",
              trace_to_lines(result.trace));
  return result;
}

std::string restore_output(const TranslationModel &model,
                           const std::vector<std::string> &tokens) {
  Sentence s = apply_truecase(model.target_truecaser,
                              Sentence{tokens, Language::kTarget});
  if (!s.tokens.empty() && !s.tokens.front().empty()) {
    char &c = s.tokens.front().front();
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return detokenize(s.tokens);
}

TranslationSession::TranslationSession(const TranslationModel &model,
                                       DecoderConfig params, bool restore,
                                       std::optional<fs::path> log)
    : model_(model), params_(params), restore_(restore), log_(std::move(log)) {}

std::string TranslationSession::process(std::string_view raw_line) {
  Sentence src = prepare_input(raw_line, model_.case_policy,
                               &model_.source_truecaser);
  std::string out;
  last_ = TranslationResult{};
  if (!src.tokens.empty()) {
    last_ = translate(model_, src, params_);
    out = restore_ ? restore_output(model_, last_.best) : join(last_.best);
  }
  ++processed_;
  if (log_) {
    std::ofstream f(*log_, std::ios::app);
    if (!f) throw DataError("cannot append to session log " + log_->string());
    f << raw_line << '\t' << out << '\n';
  }
  return out;
}

void serve_interactive(TranslationSession &session, std::istream &in,
                       std::ostream &out, std::ostream &err) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      out << session.process(line) << '\n';
    } catch (const std::exception &e) {
      err << "error: " << e.what() << '\n';
      out << '\n';
    }
    out.flush();
  }
}

}  // namespace smt
