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

#ifndef SMT_REORDERING_H_
#define SMT_REORDERING_H_

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "smt/binary_table.h"
#include "smt/phrase_model.h"

namespace smt {

enum class Orientation : int { kMonotone = 0, kSwap = 1, kDiscontinuous = 2 };

std::string_view orientation_name(Orientation o);

// Orientation of `cur` relative to `prev`, where cur directly follows prev on
// the target side.
Orientation classify_orientation(Span prev_src, Span cur_src);

using OrientationProbs = std::array<double, 3>;

struct ReorderingEntry {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  OrientationProbs forward{};   // relative to the next phrase
  OrientationProbs backward{};  // relative to the previous phrase

  bool operator==(const ReorderingEntry &) const = default;
};

struct OrientationCounts {
  std::array<long long, 3> forward{};
  std::array<long long, 3> backward{};
};

// Orientation of one extracted phrase with respect to its neighbours in the
// same sentence. Phrases touching a sentence edge are monotone with respect
// to the virtual boundary phrase there.
Orientation backward_orientation(const SentenceExtraction &sentence,
                                 const PhrasePair &phrase);
Orientation forward_orientation(const SentenceExtraction &sentence,
                                const PhrasePair &phrase);

// (count(o) + sigma / 3) / (total + sigma).
OrientationProbs smooth_orientations(const std::array<long long, 3> &counts,
                                     double sigma);

// Raw counts keyed by (source phrase, target phrase).
std::vector<std::pair<std::pair<std::string, std::string>, OrientationCounts>>
count_orientations(const std::vector<SentenceExtraction> &extracted);

std::vector<ReorderingEntry> train_reordering(
    const std::vector<SentenceExtraction> &extracted, double sigma);

std::vector<std::string> reordering_table_to_lines(
    const std::vector<ReorderingEntry> &entries);
std::vector<ReorderingEntry> parse_reordering_table(
    const std::vector<std::string> &lines);

void binarise_reordering_table(const std::vector<ReorderingEntry> &entries,
                               const std::filesystem::path &destination);
std::vector<ReorderingEntry> load_reordering_table(const BinaryTable &table,
                                                   const Sentence &sentence);
std::vector<ReorderingEntry> load_reordering_table(const BinaryTable &table);

}  // namespace smt

#endif  // SMT_REORDERING_H_
