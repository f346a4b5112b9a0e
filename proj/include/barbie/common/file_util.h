// Copyright 2026 The BarbiE Authors
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

#ifndef BARBIE_COMMON_FILE_UTIL_H_
#define BARBIE_COMMON_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "barbie/common/status.h"

namespace barbie {

StatusOr<std::string> ReadFile(const std::filesystem::path& path);

// Writes to a sibling temp file, fsyncs, then renames over `path`. Readers
// see either the old contents or the new ones, never a mix.
Status WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

// Like WriteFileAtomic but fails with kExists if `path` is already present.
// Exclusive across threads and processes; the record appears complete.
Status WriteFileExclusive(const std::filesystem::path& path, std::string_view contents);

}  // namespace barbie

#endif  // BARBIE_COMMON_FILE_UTIL_H_
