// Copyright 2026 The taggrowth Authors.
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

#pragma once

#include <fstream>
#include <istream>
#include <memory>
#include <streambuf>
#include <string>
#include <string_view>
#include <vector>

#include "taggrowth/io.hpp"

namespace taggrowth {

enum class InputFormat { automatic, tas, posts };

InputFormat parse_input_format(std::string_view text);
std::string_view to_string(InputFormat format);

// Guess the format from the first non-blank line: TAS rows carry the index 1
// in their first field, post lines a timestamp.
InputFormat detect_format(std::string_view first_line);

// Reads a file or standard input ("-"), checksums every byte it hands out and
// can look at the first line without consuming it.
class InputSource : private std::streambuf {
 public:
  explicit InputSource(const std::string& path);
  explicit InputSource(std::streambuf* source);

  InputSource(const InputSource&) = delete;
  InputSource& operator=(const InputSource&) = delete;

  std::istream& stream() { return stream_; }

  // First non-blank line, or empty when the input has none.
  std::string first_line();

  InputFormat resolve(InputFormat requested);

  // Checksum of the bytes read so far; call after the stream is drained.
  std::string checksum() const { return checksum_.hex(); }
  const std::string& path() const { return path_; }

 private:
  int_type underflow() override;
  bool fill_more();

  std::string path_;
  std::unique_ptr<std::ifstream> file_;
  std::streambuf* source_ = nullptr;
  std::vector<char> buffer_;
  Checksum checksum_;
  bool eof_ = false;
  std::istream stream_;
};

}  // namespace taggrowth
