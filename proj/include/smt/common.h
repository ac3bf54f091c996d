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

#ifndef SMT_COMMON_H_
#define SMT_COMMON_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smt {

// Error taxonomy. The command line tool maps these to exit codes 1, 2 and 3.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Splits on runs of ASCII whitespace; never yields empty pieces.
std::vector<std::string> split_whitespace(std::string_view text);

// Splits on an exact multi-character delimiter, keeping empty pieces.
std::vector<std::string> split_exact(std::string_view text,
                                     std::string_view delimiter);

std::string join(std::span<const std::string> tokens,
                 std::string_view separator = " ");

std::string_view trim(std::string_view text);

// printf("%.*g") with the given number of significant digits.
std::string format_sig(double value, int digits);

// Parses a floating point field, throwing DataError with context on failure.
double parse_double(std::string_view text, std::string_view context);
long long parse_int(std::string_view text, std::string_view context);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

std::vector<std::string> read_lines(const std::filesystem::path &path);
void write_lines(const std::filesystem::path &path,
                 std::span<const std::string> lines);
std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, std::string_view contents);
std::string file_checksum(const std::filesystem::path &path);

}  // namespace smt

#endif  // SMT_COMMON_H_
