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

#ifndef BARBIE_COMMON_STATUS_H_
#define BARBIE_COMMON_STATUS_H_

#include <cassert>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace barbie {

// Every failure kind surfaced by the service. The string forms (see
// ErrorCodeName) are part of the wire contract: HTTP error bodies carry them
// in the "error" field.
enum class ErrorCode {
  kOk = 0,
  kInvalidArgument,
  kReportRejected,
  kAttestationFailed,
  kUnsealDenied,
  kProtocolError,
  kHandshakeFailed,
  kUnknownSession,
  kBindingFailed,
  kIdentityRejected,
  kMutualAttestationFailed,
  kProvisioningFailed,
  kKekExists,
  kPolicyNotAllowed,
  kKekMissing,
  kIntegrityViolation,
  kBadCiphertext,
  kNotFound,
  kAccessDenied,
  kAttestationRequired,
  kExists,
  kIoError,
  kBusy,
  kUnauthenticated,
  kPermissionDenied,
  kUnavailable,
  kTransportError,
  kInternal,
};

std::string_view ErrorCodeName(ErrorCode code);
std::optional<ErrorCode> ErrorCodeFromName(std::string_view name);

class Status {
 public:
  Status() = default;
  Status(ErrorCode code, std::string message)
      : code_(code), message_(std::move(message)) {}

  bool ok() const { return code_ == ErrorCode::kOk; }
  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }

  // "<code-name>: <message>"
  std::string ToString() const;

  friend bool operator==(const Status& a, const Status& b) {
    return a.code_ == b.code_ && a.message_ == b.message_;
  }

 private:
  ErrorCode code_ = ErrorCode::kOk;
  std::string message_;
};

inline Status OkStatus() { return Status(); }

inline Status MakeError(ErrorCode code, std::string message = {}) {
  return Status(code, std::move(message));
}

template <typename T>
class StatusOr {
 public:
  StatusOr(const Status& status) : rep_(status) { assert(!status.ok()); }
  StatusOr(Status&& status) : rep_(std::move(status)) {
    assert(!std::get<Status>(rep_).ok());
  }
  StatusOr(const T& value) : rep_(value) {}
  StatusOr(T&& value) : rep_(std::move(value)) {}

  bool ok() const { return std::holds_alternative<T>(rep_); }

  Status status() const {
    if (ok()) return OkStatus();
    return std::get<Status>(rep_);
  }

  const T& value() const& { return std::get<T>(rep_); }
  T& value() & { return std::get<T>(rep_); }
  T&& value() && { return std::get<T>(std::move(rep_)); }

  const T& operator*() const& { return value(); }
  T& operator*() & { return value(); }
  const T* operator->() const { return &value(); }
  T* operator->() { return &value(); }

 private:
  std::variant<Status, T> rep_;
};

}  // namespace barbie

#define BARBIE_RETURN_IF_ERROR(expr)         \
  do {                                       \
    ::barbie::Status _barbie_st = (expr);    \
    if (!_barbie_st.ok()) return _barbie_st; \
  } while (0)

#define BARBIE_CONCAT_INNER(a, b) a##b
#define BARBIE_CONCAT(a, b) BARBIE_CONCAT_INNER(a, b)

#define BARBIE_ASSIGN_OR_RETURN(lhs, expr) \
  BARBIE_ASSIGN_OR_RETURN_IMPL(BARBIE_CONCAT(_barbie_so_, __LINE__), lhs, expr)

#define BARBIE_ASSIGN_OR_RETURN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                                 \
  if (!tmp.ok()) return tmp.status();                \
  lhs = std::move(tmp).value()

#endif  // BARBIE_COMMON_STATUS_H_
