// Copyright 2026 The sumbias Authors.
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

#ifndef SUMBIAS_JSONL_H_
#define SUMBIAS_JSONL_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace sumbias {

// Reads one JSON value per non-blank line. Throws ParseError with the
// 1-based line number on malformed JSON and LoadError if the file cannot
// be opened.
std::vector<nlohmann::json> ReadJsonl(const std::string& path);

void WriteJsonl(const std::string& path, const std::vector<nlohmann::json>& rows);

nlohmann::json ReadJsonFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& contents);
std::string ReadTextFile(const std::string& path);

}  // namespace sumbias

#endif  // SUMBIAS_JSONL_H_
