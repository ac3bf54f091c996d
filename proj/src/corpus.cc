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

#include "smt/corpus.h"

#include <algorithm>
#include <cctype>

#include "smt/common.h"

namespace smt {

namespace {

constexpr std::string_view kAsciiPunct = ".,!?;:\"'()[]";
// UTF-8 encodings of U+060C ARABIC COMMA and U+061F ARABIC QUESTION MARK.
constexpr std::string_view kArabicComma = "\xD8\x8C";
constexpr std::string_view kArabicQuestion = "\xD8\x9F";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

// Length of the punctuation mark starting at `pos`, or 0.
size_t punct_length(std::string_view s, size_t pos) {
  if (kAsciiPunct.find(s[pos]) != std::string_view::npos) return 1;
  std::string_view rest = s.substr(pos);
  if (rest.starts_with(kArabicComma) || rest.starts_with(kArabicQuestion)) {
    return 2;
  }
  return 0;
}

std::string fold_lower(std::string_view token) {
  return fold_case(token, CasePolicy::kLowercase);
}

}  // namespace

CasePolicy parse_case_policy(std::string_view name) {
  if (name == "lowercase") return CasePolicy::kLowercase;
  if (name == "uppercase") return CasePolicy::kUppercase;
  if (name == "none") return CasePolicy::kNone;
  throw UsageError("unknown case policy '" + std::string(name) + "'");
}

Sentence tokenize(std::string_view raw_line, Language language) {
  Sentence out;
  out.language = language;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.tokens.push_back(std::move(current));
    current.clear();
  };
  size_t i = 0;
  while (i < raw_line.size()) {
    char c = raw_line[i];
    if (is_space(c)) {
      flush();
      ++i;
      continue;
    }
    if (size_t n = punct_length(raw_line, i); n > 0) {
      flush();
      out.tokens.emplace_back(raw_line.substr(i, n));
      i += n;
      continue;
    }
    current.push_back(c);
    ++i;
  }
  flush();
  return out;
}

std::string fold_case(std::string_view token, CasePolicy policy) {
  std::string out(token);
  switch (policy) {
    case CasePolicy::kLowercase:
      for (char &c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      break;
    case CasePolicy::kUppercase:
      for (char &c : out) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      }
      break;
    case CasePolicy::kNone:
      break;
  }
  return out;
}

std::string normalize_text(std::string_view text, CasePolicy policy) {
  return fold_case(text, policy);
}

Sentence normalize(const Sentence &s, CasePolicy policy) {
  Sentence out;
  out.language = s.language;
  out.tokens.reserve(s.tokens.size());
  for (const auto &t : s.tokens) out.tokens.push_back(fold_case(t, policy));
  return out;
}

void TruecaseModel::add_count(const std::string &surface, long long count) {
  counts_[surface] += count;
}

void TruecaseModel::finalize() {
  best_.clear();
  std::map<std::string, long long> best_count;
  // counts_ iterates in lexicographic order, so the first maximum wins ties.
  for (const auto &[surface, count] : counts_) {
    std::string key = fold_lower(surface);
    auto it = best_count.find(key);
    if (it == best_count.end() || count > it->second) {
      best_count[key] = count;
      best_[key] = surface;
    }
  }
}

const std::string *TruecaseModel::best_form(std::string_view token) const {
  auto it = best_.find(fold_lower(token));
  return it == best_.end() ? nullptr : &it->second;
}

std::vector<std::string> TruecaseModel::to_lines() const {
  std::vector<std::pair<std::string, std::string>> keyed;
  keyed.reserve(counts_.size());
  for (const auto &[surface, count] : counts_) {
    keyed.emplace_back(fold_lower(surface), surface);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> lines;
  lines.reserve(keyed.size());
  for (const auto &[key, surface] : keyed) {
    lines.push_back(surface + " " + std::to_string(counts_.at(surface)));
  }
  return lines;
}

TruecaseModel TruecaseModel::from_lines(const std::vector<std::string> &lines) {
  TruecaseModel m;
  for (size_t i = 0; i < lines.size(); ++i) {
    auto fields = split_whitespace(lines[i]);
    if (fields.empty()) continue;
    if (fields.size() != 2) {
      throw DataError("truecase model line " + std::to_string(i + 1) +
                      ": expected 'surface count'");
    }
    m.add_count(fields[0], parse_int(fields[1], "truecase model line " +
                                                    std::to_string(i + 1)));
  }
  m.finalize();
  return m;
}

TruecaseModel train_truecaser(const std::vector<Sentence> &corpus) {
  TruecaseModel m;
  for (const auto &s : corpus) {
    for (size_t i = 0; i < s.tokens.size(); ++i) {
      m.add_count(i == 0 ? fold_lower(s.tokens[i]) : s.tokens[i], 1);
    }
  }
  m.finalize();
  return m;
}

Sentence apply_truecase(const TruecaseModel &m, const Sentence &s) {
  Sentence out = s;
  for (auto &t : out.tokens) {
    if (const std::string *best = m.best_form(t)) t = *best;
  }
  return out;
}

bool keep_pair(const SentencePair &pair, const CleanOptions &options) {
  size_t a = pair.source.size();
  size_t b = pair.target.size();
  if (a == 0 || b == 0) return false;
  if (a > options.max_len || b > options.max_len) return false;
  double ratio = static_cast<double>(std::max(a, b)) / std::min(a, b);
  return ratio <= options.max_ratio;
}

ParallelCorpus clean_corpus(const ParallelCorpus &c,
                            const CleanOptions &options) {
  if (options.max_len < 1 || options.max_ratio < 1.0) {
    throw UsageError("clean_corpus: max_len must be >= 1 and max_ratio >= 1");
  }
  ParallelCorpus out;
  for (const auto &pair : c) {
    if (keep_pair(pair, options)) out.push_back(pair);
  }
  return out;
}

std::string detokenize(const std::vector<std::string> &tokens) {
  static const std::vector<std::string> kAttachLeft = {
      ".", ",", "!", "?", ";", ":", ")", "]", "\xD8\x8C", "\xD8\x9F"};
  static const std::vector<std::string> kAttachRight = {"(", "["};
  auto contains = [](const std::vector<std::string> &set,
                     const std::string &t) {
    return std::find(set.begin(), set.end(), t) != set.end();
  };
  std::string out;
  bool glue_next = false;
  for (const auto &t : tokens) {
    if (!out.empty() && !glue_next && !contains(kAttachLeft, t)) out += ' ';
    out += t;
    glue_next = contains(kAttachRight, t);
  }
  return out;
}

PreparedCorpus prepare_corpus(
    const std::vector<std::string> &source_lines,
    const std::vector<std::string> &target_lines,
    const PrepareOptions &options,
    const std::function<void(std::string_view)> &trace) {
  if (source_lines.size() != target_lines.size()) {
    throw DataError("parallel corpus line counts differ: " +
                    std::to_string(source_lines.size()) + " vs " +
                    std::to_string(target_lines.size()));
  }
  auto stage = [&](std::string_view name) {
    if (trace) trace(name);
  };
  const size_t n = source_lines.size();

  stage("normalize");
  std::vector<std::string> norm_src(n), norm_tgt(n);
  for (size_t i = 0; i < n; ++i) {
    norm_src[i] = normalize_text(source_lines[i], options.case_policy);
    norm_tgt[i] = normalize_text(target_lines[i], options.case_policy);
  }

  stage("tokenize");
  std::vector<Sentence> tok_src(n), tok_tgt(n), orig_src(n), orig_tgt(n);
  for (size_t i = 0; i < n; ++i) {
    tok_src[i] = tokenize(norm_src[i], Language::kSource);
    tok_tgt[i] = tokenize(norm_tgt[i], Language::kTarget);
    orig_src[i] = tokenize(source_lines[i], Language::kSource);
    orig_tgt[i] = tokenize(target_lines[i], Language::kTarget);
  }

  stage("truecase");
  PreparedCorpus out;
  out.source_truecaser = train_truecaser(orig_src);
  out.target_truecaser = train_truecaser(orig_tgt);
  ParallelCorpus corpus(n);
  for (size_t i = 0; i < n; ++i) {
    if (options.case_policy == CasePolicy::kNone) {
      corpus[i].source = apply_truecase(out.source_truecaser, orig_src[i]);
      corpus[i].target = apply_truecase(out.target_truecaser, orig_tgt[i]);
    } else {
      corpus[i].source = std::move(tok_src[i]);
      corpus[i].target = std::move(tok_tgt[i]);
    }
  }

  stage("clean");
  out.corpus = clean_corpus(corpus, options.clean);
  return out;
}

Sentence prepare_input(std::string_view raw_line, CasePolicy policy,
                       const TruecaseModel *source_truecaser) {
  Sentence s = tokenize(normalize_text(raw_line, policy), Language::kSource);
  if (policy == CasePolicy::kNone && source_truecaser != nullptr) {
    s = apply_truecase(*source_truecaser, s);
  }
  return s;
}

std::vector<std::string> sentences_to_lines(const std::vector<Sentence> &v) {
  std::vector<std::string> lines;
  lines.reserve(v.size());
  for (const auto &s : v) lines.push_back(join(s.tokens));
  return lines;
}

std::vector<Sentence> lines_to_sentences(const std::vector<std::string> &lines,
                                         Language language) {
  std::vector<Sentence> out;
  out.reserve(lines.size());
  for (const auto &l : lines) out.push_back({split_whitespace(l), language});
  return out;
}

}  // namespace smt
