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

#ifndef SMT_BINARY_TABLE_H_
#define SMT_BINARY_TABLE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "smt/corpus.h"

namespace smt {

// Sorted, checksummed container for phrase-keyed score tables. Records with
// the same source phrase are contiguous and reachable through a key
// directory, so per-sentence lookups never touch unrelated records.
//
// Layout (little endian):
//   magic[8] "SMTKITBT", version u8, kind u8, num_scores u16,
//   max_source_len u32, num_keys u64, num_records u64,
//   keys:    { u32 len, bytes, u64 record_offset, u32 record_count }*
//   records: { u32 len, target bytes, f64 score * num_scores }*
//   checksum u64 (FNV-1a over everything before it)
enum class TableKind : std::uint8_t { kPhrase = 1, kReordering = 2 };

inline constexpr std::uint8_t kBinaryTableVersion = 1;

struct TableRecord {
  std::string source;  // space-joined tokens
  std::string target;
  std::vector<double> scores;
};

// `records` need not be sorted; they are sorted by (source, target).
void write_binary_table(const std::filesystem::path &path, TableKind kind,
                        size_t num_scores, std::vector<TableRecord> records);

class BinaryTable {
 public:
  static BinaryTable open(const std::filesystem::path &path);

  TableKind kind() const { return kind_; }
  size_t num_scores() const { return num_scores_; }
  size_t max_source_len() const { return max_source_len_; }
  size_t num_records() const { return num_records_; }
  size_t num_keys() const { return keys_.size(); }

  // Records whose source equals `source` exactly.
  std::vector<TableRecord> lookup(std::string_view source) const;

  struct SentenceMatches {
    std::vector<TableRecord> records;
    size_t spans_consulted = 0;
  };
  // Records for every contiguous span of `sentence` up to max_source_len.
  SentenceMatches lookup_sentence(const Sentence &sentence) const;

  // Every record in (source, target) order.
  std::vector<TableRecord> all_records() const;

 private:
  struct Key {
    std::string_view source;
    std::uint64_t offset;
    std::uint32_t count;
  };
  std::vector<TableRecord> read_records(const Key &key) const;

  std::string data_;
  TableKind kind_ = TableKind::kPhrase;
  size_t num_scores_ = 0;
  size_t max_source_len_ = 0;
  size_t num_records_ = 0;
  std::vector<Key> keys_;
};

// Source-keyed record store backed either by memory or by a binary table.
class TableStore {
 public:
  TableStore() = default;
  static TableStore in_memory(std::vector<TableRecord> records);
  static TableStore binary(BinaryTable table);

  std::vector<TableRecord> lookup(std::string_view source) const;
  size_t max_source_len() const { return max_source_len_; }
  size_t size() const { return size_; }
  bool is_binary() const { return binary_ != nullptr; }

 private:
  std::shared_ptr<const BinaryTable> binary_;
  std::shared_ptr<const std::map<std::string, std::vector<TableRecord>, std::less<>>> memory_;
  size_t max_source_len_ = 0;
  size_t size_ = 0;
};

}  // namespace smt

#endif  // SMT_BINARY_TABLE_H_
