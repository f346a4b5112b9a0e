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

#include "barbie/store/store.h"

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "barbie/common/file_util.h"

namespace barbie::store {
namespace {

constexpr std::string_view kSuffix = ".json";
constexpr Table kTables[] = {Table::kProjects, Table::kSecrets, Table::kSessions, Table::kMeta};

Status CheckKey(std::string_view key) {
  if (!IsValidKey(key)) {
    return MakeError(ErrorCode::kInvalidArgument, "invalid record key '" + std::string(key) + "'");
  }
  return OkStatus();
}

}  // namespace

std::string_view TableName(Table table) {
  switch (table) {
    case Table::kProjects:
      return "projects";
    case Table::kSecrets:
      return "secrets";
    case Table::kSessions:
      return "sessions";
    case Table::kMeta:
      return "meta";
  }
  return "?";
}

bool IsValidKey(std::string_view key) {
  if (key.empty() || key.size() > 128 || key.front() == '.') return false;
  for (char c : key) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

StatusOr<Store> Store::Open(std::filesystem::path root) {
  for (Table t : kTables) {
    std::error_code ec;
    std::filesystem::create_directories(root / TableName(t), ec);
    if (ec) {
      return MakeError(ErrorCode::kIoError, "cannot create " + (root / TableName(t)).string() +
                                                ": " + ec.message());
    }
  }
  return Store(std::move(root));
}

std::filesystem::path Store::RecordPath(Table table, std::string_view key) const {
  return root_ / TableName(table) / (std::string(key) + std::string(kSuffix));
}

Status Store::Put(Table table, std::string_view key, ByteSpan value) const {
  BARBIE_RETURN_IF_ERROR(CheckKey(key));
  return WriteFileAtomic(RecordPath(table, key), ToString(value));
}

StatusOr<Bytes> Store::Get(Table table, std::string_view key) const {
  BARBIE_RETURN_IF_ERROR(CheckKey(key));
  auto data = ReadFile(RecordPath(table, key));
  if (!data.ok()) {
    if (data.status().code() == ErrorCode::kNotFound) {
      return MakeError(ErrorCode::kNotFound,
                       std::string(TableName(table)) + "/" + std::string(key));
    }
    return data.status();
  }
  return ToBytes(*data);
}

Status Store::PutIfAbsent(Table table, std::string_view key, ByteSpan value) const {
  BARBIE_RETURN_IF_ERROR(CheckKey(key));
  return WriteFileExclusive(RecordPath(table, key), ToString(value));
}

Status Store::Delete(Table table, std::string_view key) const {
  BARBIE_RETURN_IF_ERROR(CheckKey(key));
  std::error_code ec;
  if (!std::filesystem::remove(RecordPath(table, key), ec)) {
    if (ec) return MakeError(ErrorCode::kIoError, ec.message());
    return MakeError(ErrorCode::kNotFound, std::string(key));
  }
  return OkStatus();
}

std::vector<std::string> Store::List(Table table) const {
  std::vector<std::string> keys;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(root_ / TableName(table), ec)) {
    std::string name = entry.path().filename().string();
    if (name.size() <= kSuffix.size() || !name.ends_with(kSuffix)) continue;
    std::string key = name.substr(0, name.size() - kSuffix.size());
    if (IsValidKey(key)) keys.push_back(std::move(key));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace barbie::store
