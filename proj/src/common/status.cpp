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

#include "barbie/common/status.h"

#include <array>

namespace barbie {
namespace {

struct CodeName {
  ErrorCode code;
  std::string_view name;
};

constexpr std::array<CodeName, 28> kNames = {{
    {ErrorCode::kOk, "ok"},
    {ErrorCode::kInvalidArgument, "invalid-argument"},
    {ErrorCode::kReportRejected, "report-rejected"},
    {ErrorCode::kAttestationFailed, "attestation-failed"},
    {ErrorCode::kUnsealDenied, "unseal-denied"},
    {ErrorCode::kProtocolError, "protocol-error"},
    {ErrorCode::kHandshakeFailed, "handshake-failed"},
    {ErrorCode::kUnknownSession, "unknown-session"},
    {ErrorCode::kBindingFailed, "binding-failed"},
    {ErrorCode::kIdentityRejected, "identity-rejected"},
    {ErrorCode::kMutualAttestationFailed, "mutual-attestation-failed"},
    {ErrorCode::kProvisioningFailed, "provisioning-failed"},
    {ErrorCode::kKekExists, "kek-exists"},
    {ErrorCode::kPolicyNotAllowed, "policy-not-allowed"},
    {ErrorCode::kKekMissing, "kek-missing"},
    {ErrorCode::kIntegrityViolation, "integrity-violation"},
    {ErrorCode::kBadCiphertext, "bad-ciphertext"},
    {ErrorCode::kNotFound, "not-found"},
    {ErrorCode::kAccessDenied, "access-denied"},
    {ErrorCode::kAttestationRequired, "attestation-required"},
    {ErrorCode::kExists, "exists"},
    {ErrorCode::kIoError, "io-error"},
    {ErrorCode::kBusy, "busy"},
    {ErrorCode::kUnauthenticated, "unauthenticated"},
    {ErrorCode::kPermissionDenied, "permission-denied"},
    {ErrorCode::kUnavailable, "unavailable"},
    {ErrorCode::kTransportError, "transport-error"},
    {ErrorCode::kInternal, "internal"},
}};

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  for (const auto& entry : kNames) {
    if (entry.code == code) return entry.name;
  }
  return "unknown";
}

std::optional<ErrorCode> ErrorCodeFromName(std::string_view name) {
  for (const auto& entry : kNames) {
    if (entry.name == name) return entry.code;
  }
  return std::nullopt;
}

std::string Status::ToString() const {
  std::string out(ErrorCodeName(code_));
  if (!message_.empty()) {
    out += ": ";
    out += message_;
  }
  return out;
}

}  // namespace barbie
