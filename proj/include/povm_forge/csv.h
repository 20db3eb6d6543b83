// Copyright 2026 The povm-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POVM_FORGE_CSV_H
#define POVM_FORGE_CSV_H

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace povm_forge {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Splits one CSV line on commas. Fields are unquoted numbers and labels,
/// so no quoting rules apply. A trailing '\r' is dropped.
std::vector<std::string> split_csv_line(std::string_view line);

/// Full-string parse; throws IoError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

/// Reads the next non-empty line, returning false at end of input.
bool next_csv_row(std::istream &in, std::vector<std::string> &fields);

}  // namespace povm_forge

#endif  // POVM_FORGE_CSV_H
