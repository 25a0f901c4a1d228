// zevox/config.h


// Copyright 2026  The zevox Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#ifndef ZEVOX_CONFIG_H_
#define ZEVOX_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace zevox {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines in file order. Text after '#' is a comment,
/// blank lines are skipped, keys and values are trimmed. Throws ParseError
/// naming the line for a line without '=', an empty key or a repeated key.
KeyValues ParseKeyValues(std::string_view text);
KeyValues ReadKeyValues(const std::filesystem::path &path);

}  // namespace zevox

#endif  // ZEVOX_CONFIG_H_
