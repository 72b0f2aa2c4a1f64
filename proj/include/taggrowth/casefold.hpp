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

#include <string>
#include <string_view>

namespace taggrowth {

// Lowercases a UTF-8 string with a fixed, locale-independent mapping.
//
// Covers ASCII, Latin-1 Supplement, Latin Extended-A, Greek and Cyrillic
// capitals; everything else (including malformed UTF-8) is copied through
// byte for byte. No normalization is performed.
std::string fold_case(std::string_view text);

}  // namespace taggrowth
