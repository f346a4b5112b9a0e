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

#ifndef BARBIE_STORE_STORE_H_
#define BARBIE_STORE_STORE_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "barbie/common/bytes.h"
#include "barbie/common/status.h"

namespace barbie::store {

enum class Table { kProjects, kSecrets, kSessions, kMeta };

std::string_view TableName(Table table);

// Keys are 1-128 characters from [A-Za-z0-9._-] and may not begin with '.',
// so every key maps to exactly one file and never to a temp file.
bool IsValidKey(std::string_view key);

// One file per record: <root>/<table>/<key>.json. Safe to share between
// threads and between processes opened on the same root.
class Store {
 public:
  static StatusOr<Store> Open(std::filesystem::path root);

  // Durable before returning; last writer wins.
  Status Put(Table table, std::string_view key, ByteSpan value) const;
  Status Put(Table table, std::string_view key, std::string_view value) const {
    return Put(table, key, AsBytes(value));
  }
  StatusOr<Bytes> Get(Table table, std::string_view key) const;
  // kExists if the key is present, even when another process wrote it.
  Status PutIfAbsent(Table table, std::string_view key, ByteSpan value) const;
  Status Delete(Table table, std::string_view key) const;
  std::vector<std::string> List(Table table) const;

  std::filesystem::path RecordPath(Table table, std::string_view key) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  explicit Store(std::filesystem::path root) : root_(std::move(root)) {}
  std::filesystem::path root_;
};

}  // namespace barbie::store

#endif  // BARBIE_STORE_STORE_H_
