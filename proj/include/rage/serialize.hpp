// Copyright 2026 The RAGE Authors
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

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "rage/state.hpp"

namespace rage {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

class UnsupportedVersionError : public std::runtime_error {
 public:
  explicit UnsupportedVersionError(const std::string& header);
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Text format:
///   RAGE1 N D boundary
///   A k s            followed by the rows of A_s^{(k)} as `re im` pairs
///   PHI              followed by rows j = 1..N-1 of the upper triangle
///   V                followed by one line of 4 `re im` pairs per site
void write_state(std::ostream& out, const RageState& state);
RageState read_state(std::istream& in);

void serialize_state(const RageState& state, const std::filesystem::path& path);
RageState deserialize_state(const std::filesystem::path& path);

}  // namespace rage
