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

#include "smt/language_model.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "smt/common.h"

namespace smt {

namespace {

std::string key_of(std::span<const std::string> tokens) { return join(tokens); }

std::string key_with(std::span<const std::string> history,
                     const std::string &word) {
  std::string key = join(history);
  if (!key.empty()) key += ' ';
  key += word;
  return key;
}

std::span<const std::string> last_n(std::span<const std::string> tokens,
                                    size_t n) {
  if (tokens.size() <= n) return tokens;
  return tokens.subspan(tokens.size() - n);
}

void check_order(int order) {
  if (order < 1 || order > kMaxOrder) {
    throw UsageError("n-gram order must be in [1, " +
                     std::to_string(kMaxOrder) + "], got " +
                     std::to_string(order));
  }
}

}  // namespace

Smoothing parse_smoothing(std::string_view name) {
  if (name == "mle") return Smoothing::kMle;
  if (name == "witten-bell") return Smoothing::kWittenBell;
  throw UsageError("unknown smoothing method '" + std::string(name) + "'");
}

NGramLanguageModel::NGramLanguageModel(int order)
    : order_(order), counts_(order), probs_(order) {
  check_order(order);
}

long long NGramLanguageModel::count(std::span<const std::string> ngram) const {
  if (ngram.empty() || ngram.size() > static_cast<size_t>(order_)) return 0;
  const auto &table = counts_[ngram.size() - 1];
  auto it = table.find(key_of(ngram));
  return it == table.end() ? 0 : it->second;
}

long long NGramLanguageModel::context_count(
    std::span<const std::string> history) const {
  auto it = contexts_.find(key_of(history));
  return it == contexts_.end() ? 0 : it->second.first;
}

long long NGramLanguageModel::continuation_types(
    std::span<const std::string> history) const {
  auto it = contexts_.find(key_of(history));
  return it == contexts_.end() ? 0 : it->second.second;
}

std::vector<std::vector<std::string>> NGramLanguageModel::observed_contexts()
    const {
  std::set<std::string> keys;
  if (!contexts_.empty()) {
    for (const auto &[key, stats] : contexts_) keys.insert(key);
  } else {
    for (int k = 1; k <= order_; ++k) {
      for (const auto &[key, p] : probs_[k - 1]) {
        auto tokens = split_whitespace(key);
        tokens.pop_back();
        keys.insert(join(tokens));
      }
    }
  }
  std::vector<std::vector<std::string>> out;
  for (const auto &k : keys) out.push_back(split_whitespace(k));
  return out;
}

void NGramLanguageModel::index_contexts() {
  contexts_.clear();
  for (int k = 1; k <= order_; ++k) {
    for (const auto &[key, c] : counts_[k - 1]) {
      auto tokens = split_whitespace(key);
      tokens.pop_back();
      auto &stats = contexts_[join(tokens)];
      stats.first += c;
      stats.second += 1;
    }
  }
}

const std::string &NGramLanguageModel::map_token(
    const std::string &word) const {
  if (word == kStartSymbol || word == kStopSymbol || word == kUnknownSymbol) {
    return word;
  }
  auto it = vocabulary_.find(word);
  return it == vocabulary_.end() ? kUnknownSymbol : *it;
}

double NGramLanguageModel::backoff_prob(
    const std::string &mapped_word,
    std::span<const std::string> history) const {
  double acc = 1.0;
  for (size_t len = history.size();; --len) {
    auto suffix = last_n(history, len);
    const auto &table = probs_[len];
    auto it = table.find(key_with(suffix, mapped_word));
    if (it != table.end()) return acc * it->second;
    if (len == 0 || smoothing_ != Smoothing::kWittenBell) return 0.0;
    auto b = backoff_.find(key_of(suffix));
    if (b != backoff_.end()) acc *= b->second;
  }
}

double NGramLanguageModel::prob(const std::string &word,
                                std::span<const std::string> history) const {
  if (!has_probabilities()) {
    throw InvariantError("language model has counts but no probabilities");
  }
  auto h = last_n(history, static_cast<size_t>(order_ - 1));
  std::vector<std::string> mapped;
  mapped.reserve(h.size());
  for (const auto &t : h) mapped.push_back(map_token(t));
  return backoff_prob(map_token(word), mapped);
}

double NGramLanguageModel::logprob(const std::string &word,
                                   std::span<const std::string> history) const {
  double p = prob(word, history);
  return p > 0.0 ? std::log(p) : kLogZero;
}

NGramLanguageModel count_ngrams(const std::vector<Sentence> &corpus,
                                int order) {
  check_order(order);
  if (corpus.empty()) throw DataError("cannot count n-grams of an empty corpus");
  NGramLanguageModel m(order);
  std::vector<std::string> padded;
  for (const auto &s : corpus) {
    padded.assign(static_cast<size_t>(order - 1), kStartSymbol);
    padded.insert(padded.end(), s.tokens.begin(), s.tokens.end());
    padded.push_back(kStopSymbol);
    for (const auto &t : s.tokens) m.vocabulary_.insert(t);
    for (size_t end = 0; end < padded.size(); ++end) {
      if (padded[end] == kStartSymbol) continue;
      for (int k = 1; k <= order && static_cast<size_t>(k) <= end + 1; ++k) {
        std::span<const std::string> gram(&padded[end + 1 - k],
                                          static_cast<size_t>(k));
        m.counts_[k - 1][key_of(gram)] += 1;
      }
    }
  }
  m.index_contexts();
  return m;
}

NGramLanguageModel estimate_mle(const NGramLanguageModel &counted) {
  NGramLanguageModel m = counted;
  m.smoothing_ = Smoothing::kMle;
  m.backoff_.clear();
  for (int k = 1; k <= m.order_; ++k) {
    auto &probs = m.probs_[k - 1];
    probs.clear();
    for (const auto &[key, c] : m.counts_[k - 1]) {
      auto tokens = split_whitespace(key);
      tokens.pop_back();
      double total = static_cast<double>(m.contexts_.at(join(tokens)).first);
      probs[key] = static_cast<double>(c) / total;
    }
  }
  return m;
}

NGramLanguageModel smooth(const NGramLanguageModel &counted,
                          Smoothing method) {
  if (method == Smoothing::kMle) return estimate_mle(counted);
  if (method != Smoothing::kWittenBell) {
    throw UsageError("unsupported smoothing method");
  }
  NGramLanguageModel m = counted;
  m.smoothing_ = Smoothing::kWittenBell;
  m.backoff_.clear();
  for (auto &p : m.probs_) p.clear();

  const double vocab = static_cast<double>(m.vocabulary_.size());
  const double unigram_total = static_cast<double>(m.contexts_.at("").first);
  const double scale = (vocab + 1.0) / (vocab + 2.0);
  for (const auto &[key, c] : m.counts_[0]) {
    m.probs_[0][key] = scale * static_cast<double>(c) / unigram_total;
  }
  m.probs_[0][kUnknownSymbol] = 1.0 / (vocab + 2.0);

  for (int k = 2; k <= m.order_; ++k) {
    // Higher-order estimates are computed into a scratch table so that the
    // recursive lookup below only sees finished lower orders.
    std::unordered_map<std::string, double> next;
    for (const auto &[key, c] : m.counts_[k - 1]) {
      auto tokens = split_whitespace(key);
      std::string word = tokens.back();
      tokens.pop_back();
      const auto &[total, types] = m.contexts_.at(join(tokens));
      double lambda = static_cast<double>(total) /
                      static_cast<double>(total + types);
      std::span<const std::string> lower(tokens);
      double lower_prob = m.backoff_prob(word, lower.subspan(1));
      next[key] = lambda * static_cast<double>(c) / static_cast<double>(total) +
                  (1.0 - lambda) * lower_prob;
    }
    for (const auto &[key, stats] : m.contexts_) {
      if (split_whitespace(key).size() == static_cast<size_t>(k - 1)) {
        double lambda = static_cast<double>(stats.first) /
                        static_cast<double>(stats.first + stats.second);
        m.backoff_[key] = 1.0 - lambda;
      }
    }
    m.probs_[k - 1] = std::move(next);
  }
  return m;
}

NGramLanguageModel train_language_model(const std::vector<Sentence> &corpus,
                                        int order, Smoothing method) {
  return smooth(count_ngrams(corpus, order), method);
}

double sentence_logprob(const NGramLanguageModel &model, const Sentence &s) {
  std::vector<std::string> history(static_cast<size_t>(model.order() - 1),
                                   kStartSymbol);
  double total = 0.0;
  auto add = [&](const std::string &word) {
    double lp = model.logprob(word, history);
    if (is_log_zero(lp)) {
      total = kLogZero;
    } else if (!is_log_zero(total)) {
      total += lp;
    }
    if (!history.empty()) {
      history.erase(history.begin());
      history.push_back(word);
    }
  };
  for (const auto &t : s.tokens) add(t);
  add(kStopSymbol);
  return total;
}

std::string to_arpa(const NGramLanguageModel &model) {
  const bool with_backoff = model.smoothing() == Smoothing::kWittenBell;
  std::vector<std::map<std::string, std::string>> sections(
      static_cast<size_t>(model.order()));
  for (int k = 1; k <= model.order(); ++k) {
    auto &section = sections[k - 1];
    for (const auto &[key, p] : model.entries(k)) {
      section[key] = format_sig(std::log10(p), 10);
    }
    if (with_backoff && k < model.order()) {
      // Contexts ending in the start symbol carry only a backoff weight.
      for (const auto &[key, b] : model.backoffs()) {
        if (split_whitespace(key).size() == static_cast<size_t>(k) &&
            !section.count(key)) {
          section[key] = "-99";
        }
      }
    }
  }
  std::string out = "\\data\\\n";
  for (int k = 1; k <= model.order(); ++k) {
    out += "ngram " + std::to_string(k) + "=" +
           std::to_string(sections[k - 1].size()) + "\n";
  }
  for (int k = 1; k <= model.order(); ++k) {
    out += "\n\\" + std::to_string(k) + "-grams:\n";
    for (const auto &[key, logp] : sections[k - 1]) {
      out += logp;
      out += '\t';
      out += key;
      if (with_backoff && k < model.order()) {
        auto b = model.backoffs().find(key);
        if (b != model.backoffs().end()) {
          out += '\t';
          out += format_sig(std::log10(b->second), 10);
        }
      }
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  return out;
}

void export_arpa(const NGramLanguageModel &model,
                 const std::filesystem::path &destination) {
  write_file(destination, to_arpa(model));
}

NGramLanguageModel parse_arpa(std::string_view text) {
  std::vector<std::string> lines = split_exact(text, "\n");
  size_t i = 0;
  auto where = [&](size_t line) { return "ARPA line " + std::to_string(line + 1); };
  while (i < lines.size() && trim(lines[i]) != "\\data\\") ++i;
  if (i == lines.size()) throw DataError("ARPA line 1: missing \\data\\ header");
  ++i;
  std::vector<long long> declared;
  for (; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) {
      if (!declared.empty()) break;
      continue;
    }
    if (!line.starts_with("ngram ")) break;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DataError(where(i) + ": malformed ngram count line");
    }
    long long k = parse_int(line.substr(6, eq - 6), where(i));
    if (k != static_cast<long long>(declared.size()) + 1) {
      throw DataError(where(i) + ": n-gram counts out of order");
    }
    declared.push_back(parse_int(line.substr(eq + 1), where(i)));
  }
  if (declared.empty()) {
    throw DataError(where(i) + ": missing n-gram count header");
  }
  if (declared.size() > static_cast<size_t>(kMaxOrder)) {
    throw DataError(where(i) + ": order exceeds " + std::to_string(kMaxOrder));
  }
  const int order = static_cast<int>(declared.size());
  NGramLanguageModel m(order);
  bool saw_backoff = false;
  bool saw_unknown = false;
  for (int k = 1; k <= order; ++k) {
    std::string header = "\\" + std::to_string(k) + "-grams:";
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    if (i == lines.size() || trim(lines[i]) != header) {
      throw DataError(where(std::min(i, lines.size())) + ": expected " + header);
    }
    ++i;
    for (long long e = 0; e < declared[k - 1]; ++e, ++i) {
      if (i >= lines.size()) throw DataError(where(i) + ": truncated section");
      auto fields = split_exact(lines[i], "\t");
      if (fields.size() < 2 || fields.size() > 3) {
        throw DataError(where(i) + ": expected 2 or 3 tab-separated fields");
      }
      double logp = parse_double(fields[0], where(i));
      auto tokens = split_whitespace(fields[1]);
      if (tokens.size() != static_cast<size_t>(k)) {
        throw DataError(where(i) + ": expected " + std::to_string(k) +
                        " tokens");
      }
      std::string key = join(tokens);
      if (logp > -99.0) m.probs_[k - 1][key] = std::pow(10.0, logp);
      if (fields.size() == 3) {
        m.backoff_[key] = std::pow(10.0, parse_double(fields[2], where(i)));
        saw_backoff = true;
      }
      if (k == 1) {
        const std::string &t = tokens[0];
        if (t == kUnknownSymbol) saw_unknown = true;
        if (t != kStartSymbol && t != kStopSymbol && t != kUnknownSymbol) {
          m.vocabulary_.insert(t);
        }
      }
    }
  }
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size() || trim(lines[i]) != "\\end\\") {
    throw DataError(where(std::min(i, lines.size())) + ": expected \\end\\");
  }
  m.smoothing_ =
      (saw_backoff || saw_unknown) ? Smoothing::kWittenBell : Smoothing::kMle;
  return m;
}

NGramLanguageModel import_arpa(const std::filesystem::path &source) {
  return parse_arpa(read_file(source));
}

}  // namespace smt
