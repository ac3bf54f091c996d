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

#include "smt/reordering.h"

#include <map>

#include "smt/common.h"

namespace smt {

namespace {

// Resolves the orientation against all candidate neighbours. Mono and swap
// are only reported when unambiguous.
Orientation resolve(bool mono, bool swap) {
  if (mono && !swap) return Orientation::kMonotone;
  if (swap && !mono) return Orientation::kSwap;
  return Orientation::kDiscontinuous;
}

TableRecord to_record(const ReorderingEntry &e) {
  TableRecord r{join(e.src), join(e.tgt), {}};
  r.scores.insert(r.scores.end(), e.forward.begin(), e.forward.end());
  r.scores.insert(r.scores.end(), e.backward.begin(), e.backward.end());
  return r;
}

ReorderingEntry from_record(const TableRecord &r) {
  ReorderingEntry e;
  e.src = split_whitespace(r.source);
  e.tgt = split_whitespace(r.target);
  for (size_t k = 0; k < 3; ++k) {
    e.forward[k] = r.scores[k];
    e.backward[k] = r.scores[k + 3];
  }
  return e;
}

void check_reordering_kind(const BinaryTable &table) {
  if (table.kind() != TableKind::kReordering || table.num_scores() != 6) {
    throw DataError("binary table is not a reordering table");
  }
}

}  // namespace

std::string_view orientation_name(Orientation o) {
  switch (o) {
    case Orientation::kMonotone:
      return "monotone";
    case Orientation::kSwap:
      return "swap";
    case Orientation::kDiscontinuous:
      return "discontinuous";
  }
  return "?";
}

Orientation classify_orientation(Span prev_src, Span cur_src) {
  if (cur_src.start == prev_src.end + 1) return Orientation::kMonotone;
  if (cur_src.end == prev_src.start - 1) return Orientation::kSwap;
  return Orientation::kDiscontinuous;
}

Orientation backward_orientation(const SentenceExtraction &sentence,
                                 const PhrasePair &phrase) {
  if (phrase.tgt_span.start == 0) return Orientation::kMonotone;
  bool mono = false, swap = false;
  for (const auto &prev : sentence.phrases) {
    if (prev.tgt_span.end != phrase.tgt_span.start - 1) continue;
    Orientation o = classify_orientation(prev.src_span, phrase.src_span);
    mono |= o == Orientation::kMonotone;
    swap |= o == Orientation::kSwap;
  }
  return resolve(mono, swap);
}

Orientation forward_orientation(const SentenceExtraction &sentence,
                                const PhrasePair &phrase) {
  if (phrase.tgt_span.end == static_cast<int>(sentence.tgt_len) - 1) {
    return Orientation::kMonotone;
  }
  bool mono = false, swap = false;
  for (const auto &next : sentence.phrases) {
    if (next.tgt_span.start != phrase.tgt_span.end + 1) continue;
    Orientation o = classify_orientation(phrase.src_span, next.src_span);
    mono |= o == Orientation::kMonotone;
    swap |= o == Orientation::kSwap;
  }
  return resolve(mono, swap);
}

OrientationProbs smooth_orientations(const std::array<long long, 3> &counts,
                                     double sigma) {
  if (!(sigma > 0.0)) throw UsageError("reordering sigma must be > 0");
  double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
  OrientationProbs p;
  for (size_t k = 0; k < 3; ++k) {
    p[k] = (static_cast<double>(counts[k]) + sigma / 3.0) / (total + sigma);
  }
  return p;
}

std::vector<std::pair<std::pair<std::string, std::string>, OrientationCounts>>
count_orientations(const std::vector<SentenceExtraction> &extracted) {
  std::map<std::pair<std::string, std::string>, OrientationCounts> counts;
  for (const auto &sentence : extracted) {
    for (const auto &p : sentence.phrases) {
      auto &c = counts[{join(p.src), join(p.tgt)}];
      c.forward[static_cast<int>(forward_orientation(sentence, p))] += 1;
      c.backward[static_cast<int>(backward_orientation(sentence, p))] += 1;
    }
  }
  return {counts.begin(), counts.end()};
}

std::vector<ReorderingEntry> train_reordering(
    const std::vector<SentenceExtraction> &extracted, double sigma) {
  if (!(sigma > 0.0)) throw UsageError("reordering sigma must be > 0");
  std::vector<ReorderingEntry> out;
  for (const auto &[key, c] : count_orientations(extracted)) {
    ReorderingEntry e;
    e.src = split_whitespace(key.first);
    e.tgt = split_whitespace(key.second);
    e.forward = smooth_orientations(c.forward, sigma);
    e.backward = smooth_orientations(c.backward, sigma);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::string> reordering_table_to_lines(
    const std::vector<ReorderingEntry> &entries) {
  std::vector<std::string> lines;
  lines.reserve(entries.size());
  for (const auto &e : entries) {
    std::string line = join(e.src) + " ||| " + join(e.tgt) + " |||";
    for (double p : e.forward) line += " " + format_sig(p, 7);
    for (double p : e.backward) line += " " + format_sig(p, 7);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<ReorderingEntry> parse_reordering_table(
    const std::vector<std::string> &lines) {
  std::vector<ReorderingEntry> out;
  for (size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    std::string where = "reordering table line " + std::to_string(n + 1);
    auto fields = split_exact(lines[n], " ||| ");
    if (fields.size() != 3) throw DataError(where + ": expected 3 fields");
    auto scores = split_whitespace(fields[2]);
    if (scores.size() != 6) throw DataError(where + ": expected 6 scores");
    ReorderingEntry e;
    e.src = split_whitespace(fields[0]);
    e.tgt = split_whitespace(fields[1]);
    for (size_t k = 0; k < 3; ++k) {
      e.forward[k] = parse_double(scores[k], where);
      e.backward[k] = parse_double(scores[k + 3], where);
    }
    out.push_back(std::move(e));
  }
  return out;
}

void binarise_reordering_table(const std::vector<ReorderingEntry> &entries,
                               const std::filesystem::path &destination) {
  std::vector<TableRecord> records;
  records.reserve(entries.size());
  for (const auto &e : entries) records.push_back(to_record(e));
  write_binary_table(destination, TableKind::kReordering, 6,
                     std::move(records));
}

std::vector<ReorderingEntry> load_reordering_table(const BinaryTable &table,
                                                   const Sentence &sentence) {
  check_reordering_kind(table);
  std::vector<ReorderingEntry> out;
  for (const auto &r : table.lookup_sentence(sentence).records) {
    out.push_back(from_record(r));
  }
  return out;
}

std::vector<ReorderingEntry> load_reordering_table(const BinaryTable &table) {
  check_reordering_kind(table);
  std::vector<ReorderingEntry> out;
  for (const auto &r : table.all_records()) out.push_back(from_record(r));
  return out;
}

}  // namespace smt
