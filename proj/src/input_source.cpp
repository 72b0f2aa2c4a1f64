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

#include "taggrowth/input_source.hpp"

#include <iostream>

#include "taggrowth/error.hpp"

namespace taggrowth {

namespace {
constexpr std::size_t kReadChunk = 1 << 16;
}  // namespace

InputFormat parse_input_format(std::string_view text) {
  if (text == "auto") return InputFormat::automatic;
  if (text == "tas") return InputFormat::tas;
  if (text == "posts") return InputFormat::posts;
  throw ConfigError("unknown input format '" + std::string(text) + "' (auto, tas, posts)");
}

std::string_view to_string(InputFormat format) {
  switch (format) {
    case InputFormat::automatic:
      return "auto";
    case InputFormat::tas:
      return "tas";
    case InputFormat::posts:
      return "posts";
  }
  return "?";
}

InputFormat detect_format(std::string_view first_line) {
  const auto tab = first_line.find('\t');
  return first_line.substr(0, tab) == "1" ? InputFormat::tas : InputFormat::posts;
}

InputSource::InputSource(const std::string& path) : path_(path), stream_(this) {
  if (path == "-") {
    source_ = std::cin.rdbuf();
    return;
  }
  file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file_) throw InputError("cannot open input " + path);
  source_ = file_->rdbuf();
}

InputSource::InputSource(std::streambuf* source) : path_("<stream>"), source_(source), stream_(this) {}

bool InputSource::fill_more() {
  if (eof_) return false;
  // Keep the unread part, append a fresh chunk behind it.
  const std::size_t keep = static_cast<std::size_t>(egptr() - gptr());
  std::vector<char> next(keep + kReadChunk);
  std::copy(gptr(), egptr(), next.begin());
  const auto got = source_->sgetn(next.data() + keep, static_cast<std::streamsize>(kReadChunk));
  if (got <= 0) {
    eof_ = true;
    return false;
  }
  checksum_.update(std::string_view(next.data() + keep, static_cast<std::size_t>(got)));
  next.resize(keep + static_cast<std::size_t>(got));
  buffer_ = std::move(next);
  setg(buffer_.data(), buffer_.data(), buffer_.data() + buffer_.size());
  return true;
}

InputSource::int_type InputSource::underflow() {
  if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
  if (!fill_more()) return traits_type::eof();
  return traits_type::to_int_type(*gptr());
}

std::string InputSource::first_line() {
  std::size_t start = 0;
  for (;;) {
    const std::string_view view(gptr(), static_cast<std::size_t>(egptr() - gptr()));
    for (;;) {
      const auto nl = view.find('\n', start);
      const bool complete = nl != std::string_view::npos;
      if (!complete && !eof_) break;
      std::string_view line = view.substr(start, complete ? nl - start : std::string_view::npos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) return std::string(line);
      if (!complete) return {};
      start = nl + 1;
    }
    if (!fill_more() && !eof_) return {};
  }
}

InputFormat InputSource::resolve(InputFormat requested) {
  if (requested != InputFormat::automatic) return requested;
  return detect_format(first_line());
}

}  // namespace taggrowth
