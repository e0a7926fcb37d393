// Copyright 2026 The SheepDog Authors. All Rights Reserved.
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

#ifndef SHEEPDOG_UTIL_H_
#define SHEEPDOG_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sheepdog {

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partially written file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

std::string_view TrimWhitespace(std::string_view s);
std::string ToLowerAscii(std::string_view s);
std::vector<std::string> SplitString(std::string_view s, char delim);

}  // namespace sheepdog

#endif  // SHEEPDOG_UTIL_H_
