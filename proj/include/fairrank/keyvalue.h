// Copyright 2026 The FairRank Authors.
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

// Flat `key = value` text used by schemas, configs, manifests and model
// files. Blank lines and everything after `#` are ignored.

#ifndef FAIRRANK_KEYVALUE_H_
#define FAIRRANK_KEYVALUE_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fairrank {

using KeyValueList = std::vector<std::pair<std::string, std::string>>;

std::string Trim(std::string_view s);

// Throws std::invalid_argument on a line without '=' or with an empty key.
KeyValueList ParseKeyValue(const std::string& text);

// Comma-separated list, entries trimmed, empty entries dropped.
std::vector<std::string> SplitList(std::string_view value, char sep = ',');

// Whole-string conversions; throw std::invalid_argument naming `what`.
double ParseDouble(const std::string& s, const std::string& what);
long long ParseInt(const std::string& s, const std::string& what);

// Reads a file into a string; throws std::runtime_error if it cannot.
std::string ReadFile(const std::filesystem::path& path);

}  // namespace fairrank

#endif  // FAIRRANK_KEYVALUE_H_
