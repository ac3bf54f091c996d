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

#include "smt/decoder.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <queue>
#include <unordered_map>
#include <utility>

#include "smt/common.h"

namespace smt {
namespace {

namespace fs = std::filesystem;

// Per-word log probability used when the LM assigns zero mass, so that
// feature vectors stay finite for the tuner.
constexpr double kLmZeroFloor = -100.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double floored_logprob(const NGramLanguageModel &lm, const std::string &w,
                       std::span<const std::string> history) {
  double lp = lm.logprob(w, history);
  return is_log_zero(lp) ? kLmZeroFloor : lp;
}

double lm_estimate(const TranslationModel &model,
                   const std::vector<std::string> &tgt) {
  if (!model.lm) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i < tgt.size(); ++i) {
    total += floored_logprob(*model.lm, tgt[i],
                             std::span<const std::string>(tgt.data(), i));
  }
  return total;
}

double dot(const FeatureVector &f, const FeatureWeights &w) {
  return score_features(f, w.values());
}

bool ties(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(a));
}

struct Hypothesis {
  const Hypothesis *prev = nullptr;
  const TranslationOption *option = nullptr;  // null for initial and final
  std::vector<std::uint64_t> coverage;
  std::vector<std::string> lm_context;
  Span last_src{-1, -1};
  size_t covered = 0;
  FeatureVector features;
  double score = 0.0;
  double future = 0.0;
  size_t id = 0;
  std::vector<const Hypothesis *> losers;

  bool covers(int i) const { return (coverage[i / 64] >> (i % 64)) & 1U; }
};

std::string recombination_key(const Hypothesis &h) {
  std::string key;
  auto put = [&key](const void *p, size_t n) {
    key.append(static_cast<const char *>(p), n);
  };
  for (auto w : h.coverage) put(&w, sizeof w);
  put(&h.last_src.start, sizeof h.last_src.start);
  put(&h.last_src.end, sizeof h.last_src.end);
  if (h.option != nullptr) put(h.option->forward.data(), sizeof(double) * 3);
  for (const auto &t : h.lm_context) {
    key.push_back('\x1f');
    key += t;
  }
  return key;
}

std::vector<std::string> target_of(const Hypothesis *h) {
  std::vector<const TranslationOption *> chain;
  for (; h != nullptr; h = h->prev) {
    if (h->option != nullptr) chain.push_back(h->option);
  }
  std::vector<std::string> out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    out.insert(out.end(), (*it)->tgt.begin(), (*it)->tgt.end());
  }
  return out;
}

// Histogram-pruned stack with recombination.
class Stack {
 public:
  Stack(size_t capacity, bool recombine)
      : capacity_(capacity), recombine_(recombine) {}

  void add(Hypothesis *h) {
    if (recombine_) {
      std::string key = recombination_key(*h);
      auto [it, inserted] = index_.emplace(std::move(key), items_.size());
      if (!inserted) {
        Hypothesis *old = items_[it->second];
        if (better(*h, *old)) {
          h->losers = std::move(old->losers);
          old->losers.clear();
          h->losers.push_back(old);
          items_[it->second] = h;
        } else {
          old->losers.push_back(h);
        }
        return;
      }
    }
    items_.push_back(h);
    if (capacity_ > 0 && items_.size() > 2 * capacity_) prune();
  }

  void prune() {
    if (capacity_ == 0 || items_.size() <= capacity_) return;
    std::sort(items_.begin(), items_.end(),
              [](const Hypothesis *a, const Hypothesis *b) {
                double ka = a->score + a->future, kb = b->score + b->future;
                if (ka != kb) return ka > kb;
                return a->id < b->id;
              });
    items_.resize(capacity_);
    index_.clear();
    if (recombine_) {
      for (size_t i = 0; i < items_.size(); ++i) {
        index_.emplace(recombination_key(*items_[i]), i);
      }
    }
  }

  const std::vector<Hypothesis *> &items() const { return items_; }

 private:
  static bool better(const Hypothesis &a, const Hypothesis &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  }

  size_t capacity_;
  bool recombine_;
  std::vector<Hypothesis *> items_;
  std::unordered_map<std::string, size_t> index_;
};

void add_orientation(FeatureVector &delta, int base, Orientation o,
                     const OrientationProbs &probs) {
  int k = static_cast<int>(o);
  delta[base + k] += std::log(std::max(probs[k], 1e-12));
}

// Deviation-based enumeration of complete derivations in score order.
struct Path {
  std::vector<const Hypothesis *> nodes;  // final node first
  size_t deviation_from = 0;
  double score = 0.0;
  FeatureVector features;
  size_t seq = 0;
};

struct PathOrder {
  bool operator()(const Path &a, const Path &b) const {
    if (a.score != b.score) return a.score < b.score;
    return a.seq > b.seq;
  }
};

std::vector<const Hypothesis *> chain_from(const Hypothesis *h) {
  std::vector<const Hypothesis *> out;
  for (; h != nullptr; h = h->prev) out.push_back(h);
  return out;
}

}  // namespace

const std::array<std::string_view, kNumFeatures> &feature_names() {
  static const std::array<std::string_view, kNumFeatures> kNames = {
      "lm",           "phi_src_given_tgt", "lex_src_given_tgt",
      "phi_tgt_given_src", "lex_tgt_given_src", "phrase_penalty",
      "word_penalty", "distortion",        "fwd_mono",
      "fwd_swap",     "fwd_disc",          "bwd_mono",
      "bwd_swap",     "bwd_disc"};
  return kNames;
}

FeatureWeights::FeatureWeights(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.size() != kNumFeatures) {
    throw DataError("expected " + std::to_string(kNumFeatures) +
                    " feature weights, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DataError("feature weights must be finite");
  }
}

FeatureWeights FeatureWeights::uniform() {
  return FeatureWeights(std::vector<double>(kNumFeatures, 1.0));
}

FeatureWeights FeatureWeights::defaults() {
  return FeatureWeights({0.5, 0.2, 0.2, 0.2, 0.2, 0.2, -0.5, 0.3, 0.3, 0.3,
                         0.3, 0.3, 0.3, 0.3});
}

FeatureWeights FeatureWeights::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double &x : v) x *= factor;
  return FeatureWeights(std::move(v));
}

std::vector<std::string> FeatureWeights::to_lines() const {
  std::vector<std::string> lines;
  lines.push_back("# dimension " + std::to_string(kNumFeatures));
  for (size_t k = 0; k < kNumFeatures; ++k) {
    lines.push_back(std::string(feature_names()[k]) + " " +
                    format_sig(values_[k], 17));
  }
  return lines;
}

FeatureWeights FeatureWeights::from_lines(
    const std::vector<std::string> &lines) {
  std::vector<double> values(kNumFeatures, 0.0);
  std::vector<bool> seen(kNumFeatures, false);
  for (size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_whitespace(line);
    std::string where = "weights line " + std::to_string(n + 1);
    if (fields.size() != 2) throw DataError(where + ": expected 'name value'");
    const auto &names = feature_names();
    auto it = std::find(names.begin(), names.end(), fields[0]);
    if (it == names.end()) {
      throw DataError(where + ": unknown feature '" + fields[0] + "'");
    }
    size_t k = static_cast<size_t>(it - names.begin());
    if (seen[k]) throw DataError(where + ": duplicate feature " + fields[0]);
    seen[k] = true;
    values[k] = parse_double(fields[1], where);
  }
  for (size_t k = 0; k < kNumFeatures; ++k) {
    if (!seen[k]) {
      throw DataError("weights file lacks feature " +
                      std::string(feature_names()[k]));
    }
  }
  return FeatureWeights(std::move(values));
}

double score_features(std::span<const double> features,
                      std::span<const double> weights) {
  if (features.size() != weights.size()) {
    throw InvariantError("feature/weight dimension mismatch: " +
                         std::to_string(features.size()) + " vs " +
                         std::to_string(weights.size()));
  }
  double total = 0.0;
  for (size_t k = 0; k < features.size(); ++k) {
    total += features[k] * weights[k];
  }
  return total;
}

TranslationModel make_translation_model(
    NGramLanguageModel lm, const std::vector<PhraseTableEntry> &phrases,
    const std::vector<ReorderingEntry> &reordering,
    const FeatureWeights &weights) {
  TranslationModel model;
  model.lm = std::move(lm);
  std::vector<TableRecord> records;
  for (const auto &e : phrases) {
    records.push_back(TableRecord{join(e.src), join(e.tgt),
                                  {e.scores.begin(), e.scores.end()}});
  }
  model.phrases = TableStore::in_memory(std::move(records));
  records.clear();
  for (const auto &e : reordering) {
    TableRecord r{join(e.src), join(e.tgt), {}};
    r.scores.insert(r.scores.end(), e.forward.begin(), e.forward.end());
    r.scores.insert(r.scores.end(), e.backward.begin(), e.backward.end());
    records.push_back(std::move(r));
  }
  model.reordering = TableStore::in_memory(std::move(records));
  model.weights = weights;
  return model;
}

DecoderConfig parse_decoder_config(const std::vector<std::string> &lines,
                                   CasePolicy *case_policy) {
  DecoderConfig config;
  for (size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    std::string where = "config line " + std::to_string(n + 1);
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw DataError(where + ": missing '='");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key == "stack_size") {
      config.stack_size = static_cast<size_t>(parse_int(value, where));
    } else if (key == "distortion_limit") {
      config.distortion_limit = static_cast<int>(parse_int(value, where));
    } else if (key == "nbest_size") {
      config.nbest_size = static_cast<size_t>(parse_int(value, where));
    } else if (key == "max_options_per_span") {
      config.max_options_per_span = static_cast<size_t>(parse_int(value, where));
    } else if (key == "oov_penalty") {
      config.oov_penalty = parse_double(value, where);
    } else if (key == "case_policy") {
      if (case_policy != nullptr) *case_policy = parse_case_policy(value);
    } else {
      throw DataError(where + ": unknown key '" + key + "'");
    }
  }
  return config;
}

std::vector<std::string> decoder_config_to_lines(const DecoderConfig &config,
                                                 CasePolicy case_policy) {
  std::string policy = case_policy == CasePolicy::kLowercase   ? "lowercase"
                       : case_policy == CasePolicy::kUppercase ? "uppercase"
                                                               : "none";
  return {"stack_size = " + std::to_string(config.stack_size),
          "distortion_limit = " + std::to_string(config.distortion_limit),
          "nbest_size = " + std::to_string(config.nbest_size),
          "max_options_per_span = " +
              std::to_string(config.max_options_per_span),
          "oov_penalty = " + format_sig(config.oov_penalty, 17),
          "case_policy = " + policy};
}

TranslationModel load_translation_model(const fs::path &dir) {
  if (!fs::is_directory(dir)) {
    throw DataError("model directory not found: " + dir.string());
  }
  if (fs::exists(dir / "components.txt")) {
    for (const auto &line : read_lines(dir / "components.txt")) {
      auto fields = split_whitespace(line);
      if (fields.size() != 2 || fields[0].front() == '#') continue;
      fs::path file = dir / fields[0];
      if (!fs::exists(file)) continue;  // binaries are optional
      if (file_checksum(file) != fields[1]) {
        throw DataError("checksum mismatch for model component " + fields[0]);
      }
    }
  }
  TranslationModel model;
  if (fs::exists(dir / "lm.arpa")) model.lm = import_arpa(dir / "lm.arpa");

  auto load_store = [&](const std::string &stem, TableKind kind) {
    fs::path bin = dir / (stem + ".bin");
    if (fs::exists(bin)) {
      BinaryTable table = BinaryTable::open(bin);
      if (table.kind() != kind) throw DataError(bin.string() + ": wrong kind");
      return TableStore::binary(std::move(table));
    }
    fs::path txt = dir / (stem + ".txt");
    if (!fs::exists(txt)) return TableStore();
    std::vector<TableRecord> records;
    if (kind == TableKind::kPhrase) {
      for (const auto &e : parse_phrase_table(read_lines(txt))) {
        records.push_back(TableRecord{join(e.src), join(e.tgt),
                                      {e.scores.begin(), e.scores.end()}});
      }
    } else {
      for (const auto &e : parse_reordering_table(read_lines(txt))) {
        TableRecord r{join(e.src), join(e.tgt), {}};
        r.scores.insert(r.scores.end(), e.forward.begin(), e.forward.end());
        r.scores.insert(r.scores.end(), e.backward.begin(), e.backward.end());
        records.push_back(std::move(r));
      }
    }
    return TableStore::in_memory(std::move(records));
  };
  model.phrases = load_store("phrase-table", TableKind::kPhrase);
  model.reordering = load_store("reordering-table", TableKind::kReordering);
  if (model.phrases.size() == 0) {
    throw DataError("model in " + dir.string() + " has an empty phrase table");
  }
  if (fs::exists(dir / "lex.f2e")) {
    model.lex_f2e = LexicalTable::from_lines(read_lines(dir / "lex.f2e"), true);
  }
  if (fs::exists(dir / "lex.e2f")) {
    model.lex_e2f =
        LexicalTable::from_lines(read_lines(dir / "lex.e2f"), false);
  }
  if (fs::exists(dir / "weights.txt")) {
    model.weights = FeatureWeights::from_lines(read_lines(dir / "weights.txt"));
  } else if (fs::exists(dir / "weights.init.txt")) {
    model.weights =
        FeatureWeights::from_lines(read_lines(dir / "weights.init.txt"));
  }
  if (fs::exists(dir / "config.txt")) {
    model.config =
        parse_decoder_config(read_lines(dir / "config.txt"), &model.case_policy);
  }
  if (fs::exists(dir / "truecase.src")) {
    model.source_truecaser =
        TruecaseModel::from_lines(read_lines(dir / "truecase.src"));
  }
  if (fs::exists(dir / "truecase.tgt")) {
    model.target_truecaser =
        TruecaseModel::from_lines(read_lines(dir / "truecase.tgt"));
  }
  return model;
}

OptionTable collect_options(const TranslationModel &model, const Sentence &src,
                            const FeatureWeights &weights,
                            size_t max_options_per_span, double oov_penalty) {
  const auto &words = src.tokens;
  const size_t n = words.size();
  OptionTable table(n);
  for (size_t start = 0; start < n; ++start) {
    size_t max_len = std::min(model.phrases.max_source_len(), n - start);
    table[start].resize(std::max<size_t>(max_len, 1));
    for (size_t len = 1; len <= max_len; ++len) {
      std::span<const std::string> phrase(&words[start], len);
      std::string key = join(phrase);
      std::vector<TableRecord> reo = model.reordering.lookup(key);
      auto &slot = table[start][len - 1];
      for (const auto &rec : model.phrases.lookup(key)) {
        TranslationOption opt;
        opt.src_span = {static_cast<int>(start),
                        static_cast<int>(start + len - 1)};
        opt.tgt = split_whitespace(rec.target);
        opt.local.assign(kNumFeatures, 0.0);
        for (int k = 0; k < 4; ++k) {
          opt.local[kFeatPhiSrcGivenTgt + k] = std::log(rec.scores[k]);
        }
        opt.local[kFeatPhrasePenalty] = 1.0;
        opt.local[kFeatWordPenalty] = -static_cast<double>(opt.tgt.size());
        for (const auto &r : reo) {
          if (r.target != rec.target) continue;
          for (int k = 0; k < 3; ++k) {
            opt.forward[k] = r.scores[k];
            opt.backward[k] = r.scores[k + 3];
          }
          break;
        }
        opt.lm_estimate = lm_estimate(model, opt.tgt);
        opt.future_score =
            dot(opt.local, weights) + weights[kFeatLm] * opt.lm_estimate;
        slot.push_back(std::move(opt));
      }
      std::sort(slot.begin(), slot.end(),
                [](const TranslationOption &a, const TranslationOption &b) {
                  if (a.future_score != b.future_score) {
                    return a.future_score > b.future_score;
                  }
                  return a.tgt < b.tgt;
                });
      if (max_options_per_span > 0 && slot.size() > max_options_per_span) {
        slot.resize(max_options_per_span);
      }
    }
    if (table[start][0].empty()) {
      TranslationOption opt;
      opt.src_span = {static_cast<int>(start), static_cast<int>(start)};
      opt.tgt = {words[start]};
      opt.local.assign(kNumFeatures, 0.0);
      for (int k = 0; k < 4; ++k) opt.local[kFeatPhiSrcGivenTgt + k] = oov_penalty;
      opt.local[kFeatPhrasePenalty] = 1.0;
      opt.local[kFeatWordPenalty] = -1.0;
      opt.lm_estimate = lm_estimate(model, opt.tgt);
      opt.future_score =
          dot(opt.local, weights) + weights[kFeatLm] * opt.lm_estimate;
      opt.oov = true;
      table[start][0].push_back(std::move(opt));
    }
  }
  return table;
}

FutureCostTable compute_future_cost(const OptionTable &options,
                                    size_t sentence_length) {
  const size_t n = sentence_length;
  FutureCostTable cost(n, std::vector<double>(n, kNegInf));
  for (size_t len = 1; len <= n; ++len) {
    for (size_t s = 0; s + len <= n; ++s) {
      size_t e = s + len - 1;
      double best = kNegInf;
      if (len <= options[s].size()) {
        for (const auto &o : options[s][len - 1]) {
          best = std::max(best, o.future_score);
        }
      }
      for (size_t k = s; k < e; ++k) {
        best = std::max(best, cost[s][k] + cost[k + 1][e]);
      }
      cost[s][e] = best;
    }
  }
  return cost;
}

FutureCostTable compute_future_cost(const TranslationModel &model,
                                    const Sentence &src,
                                    const FeatureWeights &weights) {
  return compute_future_cost(
      collect_options(model, src, weights, model.config.max_options_per_span,
                      model.config.oov_penalty),
      src.tokens.size());
}

TranslationResult translate(const TranslationModel &model, const Sentence &src,
                            const DecoderConfig &params) {
  return translate(model, src, model.weights, params);
}

TranslationResult translate(const TranslationModel &model, const Sentence &src,
                            const FeatureWeights &weights,
                            const DecoderConfig &params) {
  if (model.phrases.size() == 0) {
    throw DataError("cannot translate with an empty model");
  }
  const int n = static_cast<int>(src.tokens.size());
  const int limit = params.distortion_limit;
  OptionTable options =
      collect_options(model, src, weights, params.max_options_per_span,
                      params.oov_penalty);
  FutureCostTable future = compute_future_cost(options, n);
  const int lm_history = model.lm ? model.lm->order() - 1 : 0;

  std::deque<Hypothesis> arena;
  auto future_of = [&](const std::vector<std::uint64_t> &cov) {
    double total = 0.0;
    int i = 0;
    while (i < n) {
      if ((cov[i / 64] >> (i % 64)) & 1U) {
        ++i;
        continue;
      }
      int j = i;
      while (j + 1 < n && !((cov[(j + 1) / 64] >> ((j + 1) % 64)) & 1U)) ++j;
      total += future[i][j];
      i = j + 1;
    }
    return total;
  };

  Hypothesis &initial = arena.emplace_back();
  initial.coverage.assign(static_cast<size_t>((n + 63) / 64), 0);
  initial.lm_context.assign(static_cast<size_t>(lm_history), kStartSymbol);
  initial.features.assign(kNumFeatures, 0.0);
  initial.future = future_of(initial.coverage);
  initial.id = 0;

  std::vector<Stack> stacks(static_cast<size_t>(n) + 1,
                            Stack(params.stack_size, params.recombine));
  stacks[0].add(&initial);
  Stack finals(0, params.recombine);
  FeatureVector delta(kNumFeatures);

  auto complete = [&](Hypothesis *h) {
    Hypothesis &f = arena.emplace_back();
    f.prev = h;
    f.coverage = h->coverage;
    f.covered = h->covered;
    f.features = h->features;
    std::fill(delta.begin(), delta.end(), 0.0);
    if (model.lm) {
      delta[kFeatLm] = floored_logprob(*model.lm, kStopSymbol, h->lm_context);
    }
    if (h->option != nullptr) {
      add_orientation(delta, kFeatFwdMono, Orientation::kMonotone,
                      h->option->forward);
    }
    for (int k = 0; k < kNumFeatures; ++k) f.features[k] += delta[k];
    f.score = h->score + dot(delta, weights);
    f.id = arena.size() - 1;
    // Every final node shares one recombination group.
    f.coverage.clear();
    finals.add(&f);
  };

  for (int c = 0; c <= n; ++c) {
    stacks[c].prune();
    for (Hypothesis *h : stacks[c].items()) {
      if (c == n) {
        complete(h);
        continue;
      }
      int first_gap = 0;
      while (first_gap < n && h->covers(first_gap)) ++first_gap;
      for (int s = 0; s < n; ++s) {
        if (h->covers(s)) continue;
        int expected = h->last_src.end + 1;
        if (limit >= 0 && std::abs(s - expected) > limit) continue;
        for (size_t len = 1; len <= options[s].size(); ++len) {
          int e = s + static_cast<int>(len) - 1;
          if (e >= n || h->covers(e)) break;
          if (options[s][len - 1].empty()) continue;
          if (limit >= 0) {
            // The first uncovered position must stay reachable.
            int gap = first_gap == s ? e + 1 : first_gap;
            while (gap < n && (h->covers(gap) || (gap >= s && gap <= e))) {
              ++gap;
            }
            if (gap < n && gap < s && std::abs(gap - (e + 1)) > limit) {
              continue;
            }
          }
          for (const auto &opt : options[s][len - 1]) {
            Hypothesis &x = arena.emplace_back();
            x.prev = h;
            x.option = &opt;
            x.coverage = h->coverage;
            for (int i = s; i <= e; ++i) x.coverage[i / 64] |= 1ULL << (i % 64);
            x.covered = h->covered + len;
            x.last_src = opt.src_span;
            std::copy(opt.local.begin(), opt.local.end(), delta.begin());
            double lm = 0.0;
            x.lm_context = h->lm_context;
            if (model.lm) {
              for (const auto &w : opt.tgt) {
                lm += floored_logprob(*model.lm, w, x.lm_context);
                if (lm_history > 0) {
                  x.lm_context.erase(x.lm_context.begin());
                  x.lm_context.push_back(w);
                }
              }
            }
            delta[kFeatLm] = lm;
            delta[kFeatDistortion] = -std::abs(s - expected);
            if (h->option == nullptr) {
              add_orientation(delta, kFeatBwdMono, Orientation::kMonotone,
                              opt.backward);
            } else {
              Orientation o = classify_orientation(h->last_src, opt.src_span);
              add_orientation(delta, kFeatBwdMono, o, opt.backward);
              add_orientation(delta, kFeatFwdMono, o, h->option->forward);
            }
            x.features = h->features;
            for (int k = 0; k < kNumFeatures; ++k) x.features[k] += delta[k];
            x.score = h->score + dot(delta, weights);
            x.future = future_of(x.coverage);
            x.id = arena.size() - 1;
            stacks[x.covered].add(&x);
          }
        }
      }
    }
  }

  TranslationResult result;
  result.hypotheses_created = arena.size();
  if (finals.items().empty()) return result;  // unreachable coverage

  // Enumerate derivations best-first, merging duplicate strings.
  const size_t want = std::max<size_t>(params.nbest_size, 1);
  const size_t max_pops = 5000 + 50 * want;
  std::priority_queue<Path, std::vector<Path>, PathOrder> queue;
  size_t seq = 0;
  for (const Hypothesis *f : finals.items()) {
    Path p;
    p.nodes = chain_from(f);
    p.score = f->score;
    p.features = f->features;
    p.seq = seq++;
    queue.push(std::move(p));
  }
  struct Found {
    std::vector<std::string> target;
    double score;
    FeatureVector features;
    std::vector<const Hypothesis *> nodes;
  };
  std::vector<Found> found;
  std::unordered_map<std::string, size_t> seen;
  double top = kNegInf;
  size_t pops = 0;
  while (!queue.empty() && pops < max_pops) {
    Path p = queue.top();
    queue.pop();
    ++pops;
    if (found.empty()) top = p.score;
    bool in_tie_range = ties(p.score, top) || p.score > top;
    if (found.size() >= want && !in_tie_range) break;
    std::vector<std::string> target = target_of(p.nodes.front());
    std::string key = join(target);
    if (seen.emplace(key, found.size()).second) {
      found.push_back({std::move(target), p.score, p.features, p.nodes});
    }
    for (size_t i = p.deviation_from; i < p.nodes.size(); ++i) {
      const Hypothesis *node = p.nodes[i];
      for (const Hypothesis *loser : node->losers) {
        Path q;
        q.nodes.assign(p.nodes.begin(),
                       p.nodes.begin() + static_cast<long>(i));
        auto tail = chain_from(loser);
        q.nodes.insert(q.nodes.end(), tail.begin(), tail.end());
        q.deviation_from = i + 1;
        q.score = p.score - node->score + loser->score;
        q.features = p.features;
        for (int k = 0; k < kNumFeatures; ++k) {
          q.features[k] += loser->features[k] - node->features[k];
        }
        q.seq = seq++;
        queue.push(std::move(q));
      }
    }
  }

  // Exactly tied best scores resolve to the smallest target string.
  size_t best = 0;
  for (size_t i = 1; i < found.size(); ++i) {
    if (ties(found[i].score, found[0].score) &&
        found[i].target < found[best].target) {
      best = i;
    }
  }
  if (best != 0) std::rotate(found.begin(), found.begin() + best,
                             found.begin() + best + 1);
  std::stable_sort(found.begin() + 1, found.end(),
                   [](const Found &a, const Found &b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.target < b.target;
                   });
  if (found.size() > want) found.resize(want);

  result.best = found.front().target;
  result.best_score = found.front().score;
  int tgt_pos = 0;
  for (auto it = found.front().nodes.rbegin(); it != found.front().nodes.rend();
       ++it) {
    const TranslationOption *o = (*it)->option;
    if (o == nullptr) continue;
    int len = static_cast<int>(o->tgt.size());
    result.segmentation.emplace_back(o->src_span,
                                     Span{tgt_pos, tgt_pos + len - 1});
    tgt_pos += len;
  }
  for (auto &f : found) {
    NBestEntry entry;
    entry.target = std::move(f.target);
    entry.features = std::move(f.features);
    entry.total = score_features(entry.features, weights.values());
    result.nbest.push_back(std::move(entry));
  }
  return result;
}

std::string format_nbest_line(size_t sentence_id, const NBestEntry &entry) {
  std::string line = std::to_string(sentence_id) + " ||| " +
                     join(entry.target) + " |||";
  for (double f : entry.features) line += " " + format_sig(f, 10);
  line += " ||| " + format_sig(entry.total, 10);
  return line;
}

NBestLine parse_nbest_line(std::string_view line) {
  auto fields = split_exact(line, " ||| ");
  if (fields.size() != 4) {
    throw DataError("n-best line needs 4 fields: " + std::string(line));
  }
  NBestLine out;
  out.sentence_id = static_cast<size_t>(parse_int(trim(fields[0]), "n-best id"));
  out.entry.target = split_whitespace(fields[1]);
  for (const auto &f : split_whitespace(fields[2])) {
    out.entry.features.push_back(parse_double(f, "n-best feature"));
  }
  if (out.entry.features.size() != kNumFeatures) {
    throw DataError("n-best line has " +
                    std::to_string(out.entry.features.size()) + " features");
  }
  out.entry.total = parse_double(trim(fields[3]), "n-best total");
  return out;
}

void translate_file(const TranslationModel &model, const fs::path &input,
                    const fs::path &output, const DecoderConfig &params,
                    const std::optional<fs::path> &nbest_output) {
  std::vector<std::string> lines;
  try {
    lines = read_lines(input);
  } catch (const std::exception &e) {
    throw DataError(std::string("reading input: ") + e.what());
  }
  std::vector<std::string> out, nbest;
  for (size_t i = 0; i < lines.size(); ++i) {
    Sentence s{split_whitespace(lines[i]), Language::kSource};
    TranslationResult r;
    try {
      r = translate(model, s, params);
    } catch (const DataError &e) {
      throw DataError(input.string() + " line " + std::to_string(i + 1) +
                      ": " + e.what());
    }
    out.push_back(join(r.best));
    for (const auto &entry : r.nbest) {
      nbest.push_back(format_nbest_line(i, entry));
    }
  }
  write_lines(output, out);
  if (nbest_output) write_lines(*nbest_output, nbest);
}

}  // namespace smt
