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

#include "barbie/common/file_util.h"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace barbie {
namespace {

std::atomic<uint64_t> temp_counter{0};

Status Errno(const std::string& what, const std::filesystem::path& path) {
  return MakeError(ErrorCode::kIoError,
                   what + " " + path.string() + ": " + std::strerror(errno));
}

// Writes `contents` to a fresh sibling temp file and fsyncs it.
StatusOr<std::filesystem::path> WriteTemp(const std::filesystem::path& path,
                                          std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(temp_counter.fetch_add(1));
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (fd < 0) return Errno("create", tmp);
  size_t written = 0;
  while (written < contents.size()) {
    ssize_t n = ::write(fd, contents.data() + written, contents.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      Status st = Errno("write", tmp);
      ::close(fd);
      ::unlink(tmp.c_str());
      return st;
    }
    written += static_cast<size_t>(n);
  }
  if (::fsync(fd) != 0) {
    Status st = Errno("fsync", tmp);
    ::close(fd);
    ::unlink(tmp.c_str());
    return st;
  }
  ::close(fd);
  return tmp;
}

}  // namespace

StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (errno == ENOENT) {
      return MakeError(ErrorCode::kNotFound, path.string());
    }
    return Errno("open", path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return Errno("read", path);
  return buf.str();
}

Status WriteFileAtomic(const std::filesystem::path& path, std::string_view contents) {
  BARBIE_ASSIGN_OR_RETURN(std::filesystem::path tmp, WriteTemp(path, contents));
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    Status st = Errno("rename", path);
    ::unlink(tmp.c_str());
    return st;
  }
  return OkStatus();
}

Status WriteFileExclusive(const std::filesystem::path& path, std::string_view contents) {
  BARBIE_ASSIGN_OR_RETURN(std::filesystem::path tmp, WriteTemp(path, contents));
  int rc = ::link(tmp.c_str(), path.c_str());
  int err = errno;
  ::unlink(tmp.c_str());
  if (rc != 0) {
    if (err == EEXIST) return MakeError(ErrorCode::kExists, path.string());
    errno = err;
    return Errno("link", path);
  }
  return OkStatus();
}

}  // namespace barbie
