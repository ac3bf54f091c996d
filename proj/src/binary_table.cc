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

#include "smt/binary_table.h"

#include <algorithm>
#include <bit>
#include <cstring>

#include "smt/common.h"

namespace smt {

namespace {

constexpr std::string_view kMagic = "SMTKITBT";

template <typename T>
void put(std::string &out, T value) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

void put_string(std::string &out, std::string_view s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  Reader(std::string_view data, size_t pos) : data_(data), pos_(pos) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view get_string() {
    auto len = get<std::uint32_t>();
    need(len);
    std::string_view s = data_.substr(pos_, len);
    pos_ += len;
    return s;
  }

  double get_double() { return std::bit_cast<double>(get<std::uint64_t>()); }
  size_t pos() const { return pos_; }

 private:
  void need(size_t n) const {
    if (pos_ + n > data_.size()) throw DataError("binary table truncated");
  }
  std::string_view data_;
  size_t pos_;
};

}  // namespace

void write_binary_table(const std::filesystem::path &path, TableKind kind,
                        size_t num_scores, std::vector<TableRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const TableRecord &a, const TableRecord &b) {
              return std::tie(a.source, a.target) < std::tie(b.source, b.target);
            });
  size_t max_source_len = 0;
  std::vector<std::pair<std::string_view, std::pair<size_t, size_t>>> keys;
  for (size_t k = 0; k < records.size(); ++k) {
    if (records[k].scores.size() != num_scores) {
      throw InvariantError("binary table record has wrong score count");
    }
    max_source_len =
        std::max(max_source_len, split_whitespace(records[k].source).size());
    if (keys.empty() || keys.back().first != records[k].source) {
      keys.push_back({records[k].source, {k, 0}});
    }
    keys.back().second.second += 1;
  }

  std::string body;
  std::vector<std::uint64_t> record_offsets(records.size());
  for (size_t k = 0; k < records.size(); ++k) {
    record_offsets[k] = body.size();
    put_string(body, records[k].target);
    for (double s : records[k].scores) {
      put<std::uint64_t>(body, std::bit_cast<std::uint64_t>(s));
    }
  }

  std::string header;
  header.append(kMagic);
  put<std::uint8_t>(header, kBinaryTableVersion);
  put<std::uint8_t>(header, static_cast<std::uint8_t>(kind));
  put<std::uint16_t>(header, static_cast<std::uint16_t>(num_scores));
  put<std::uint32_t>(header, static_cast<std::uint32_t>(max_source_len));
  put<std::uint64_t>(header, keys.size());
  put<std::uint64_t>(header, records.size());

  std::string directory;
  for (const auto &[source, range] : keys) {
    put_string(directory, source);
    put<std::uint64_t>(directory, record_offsets[range.first]);
    put<std::uint32_t>(directory, static_cast<std::uint32_t>(range.second));
  }
  // Record offsets are relative to the start of the record block.
  std::string out = header + directory + body;
  put<std::uint64_t>(out, fnv1a(out));
  write_file(path, out);
}

BinaryTable BinaryTable::open(const std::filesystem::path &path) {
  BinaryTable t;
  t.data_ = read_file(path);
  const std::string &d = t.data_;
  if (d.size() < kMagic.size() + 32 ||
      std::string_view(d).substr(0, kMagic.size()) != kMagic) {
    throw DataError(path.string() + ": not a binary table (bad magic)");
  }
  const size_t payload = d.size() - 8;
  Reader tail(d, payload);
  if (tail.get<std::uint64_t>() != fnv1a(std::string_view(d).substr(0, payload))) {
    throw DataError(path.string() + ": binary table checksum mismatch");
  }
  std::string_view view(d.data(), payload);
  Reader r(view, kMagic.size());
  auto version = r.get<std::uint8_t>();
  if (version != kBinaryTableVersion) {
    throw DataError(path.string() + ": unsupported binary table version " +
                    std::to_string(version));
  }
  t.kind_ = static_cast<TableKind>(r.get<std::uint8_t>());
  t.num_scores_ = r.get<std::uint16_t>();
  t.max_source_len_ = r.get<std::uint32_t>();
  auto num_keys = r.get<std::uint64_t>();
  t.num_records_ = r.get<std::uint64_t>();
  t.keys_.reserve(num_keys);
  for (std::uint64_t k = 0; k < num_keys; ++k) {
    Key key;
    key.source = r.get_string();
    key.offset = r.get<std::uint64_t>();
    key.count = r.get<std::uint32_t>();
    t.keys_.push_back(key);
  }
  // Rebase record offsets to absolute positions.
  for (auto &key : t.keys_) key.offset += r.pos();
  return t;
}

std::vector<TableRecord> BinaryTable::read_records(const Key &key) const {
  std::vector<TableRecord> out;
  out.reserve(key.count);
  Reader r(std::string_view(data_.data(), data_.size() - 8), key.offset);
  for (std::uint32_t n = 0; n < key.count; ++n) {
    TableRecord rec;
    rec.source = std::string(key.source);
    rec.target = std::string(r.get_string());
    rec.scores.reserve(num_scores_);
    for (size_t s = 0; s < num_scores_; ++s) rec.scores.push_back(r.get_double());
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TableRecord> BinaryTable::lookup(std::string_view source) const {
  auto it = std::lower_bound(
      keys_.begin(), keys_.end(), source,
      [](const Key &k, std::string_view s) { return k.source < s; });
  if (it == keys_.end() || it->source != source) return {};
  return read_records(*it);
}

BinaryTable::SentenceMatches BinaryTable::lookup_sentence(
    const Sentence &sentence) const {
  SentenceMatches out;
  const size_t n = sentence.size();
  for (size_t start = 0; start < n; ++start) {
    for (size_t len = 1; len <= max_source_len_ && start + len <= n; ++len) {
      ++out.spans_consulted;
      std::string key = join(std::span<const std::string>(
          sentence.tokens.data() + start, len));
      auto records = lookup(key);
      for (auto &r : records) out.records.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<TableRecord> BinaryTable::all_records() const {
  std::vector<TableRecord> out;
  out.reserve(num_records_);
  for (const auto &key : keys_) {
    for (auto &r : read_records(key)) out.push_back(std::move(r));
  }
  return out;
}

TableStore TableStore::in_memory(std::vector<TableRecord> records) {
  auto map = std::make_shared<
      std::map<std::string, std::vector<TableRecord>, std::less<>>>();
  TableStore store;
  store.size_ = records.size();
  for (auto &r : records) {
    store.max_source_len_ =
        std::max(store.max_source_len_, split_whitespace(r.source).size());
    std::string key = r.source;
    (*map)[key].push_back(std::move(r));
  }
  for (auto &[key, list] : *map) {
    std::sort(list.begin(), list.end(),
              [](const TableRecord &a, const TableRecord &b) {
                return a.target < b.target;
              });
  }
  store.memory_ = std::move(map);
  return store;
}

TableStore TableStore::binary(BinaryTable table) {
  TableStore store;
  store.max_source_len_ = table.max_source_len();
  store.size_ = table.num_records();
  store.binary_ = std::make_shared<const BinaryTable>(std::move(table));
  return store;
}

std::vector<TableRecord> TableStore::lookup(std::string_view source) const {
  if (binary_) return binary_->lookup(source);
  if (!memory_) return {};
  auto it = memory_->find(source);
  return it == memory_->end() ? std::vector<TableRecord>{} : it->second;
}

}  // namespace smt
