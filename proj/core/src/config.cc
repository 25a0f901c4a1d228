// src/config.cc


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


#include "zevox/config.h"

#include <set>

#include "text-util.h"
#include "zevox/errors.h"

namespace zevox {

KeyValues ParseKeyValues(std::string_view text) {
  KeyValues out;
  std::set<std::string, std::less<>> seen;
  const auto lines = internal::SplitLines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = lines[n];
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = internal::Trim(line);
    if (line.empty()) continue;
    const std::string where = "config: line " + std::to_string(n + 1);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(where + ": expected key = value");
    const std::string key(internal::Trim(line.substr(0, eq)));
    const std::string value(internal::Trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(where + ": empty key");
    if (!seen.insert(key).second)
      throw ParseError(where + ": key \"" + key + "\" repeated");
    out.emplace_back(key, value);
  }
  return out;
}

KeyValues ReadKeyValues(const std::filesystem::path &path) {
  return ParseKeyValues(internal::ReadTextFile(path, "config"));
}

}  // namespace zevox
