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

#include "barbie/kms/policy.h"

#include <algorithm>

namespace barbie::kms {

std::string_view DenyReasonName(DenyReason reason) {
  switch (reason) {
    case DenyReason::kMeasurementMismatch:
      return "measurement-mismatch";
    case DenyReason::kSignerMismatch:
      return "signer-mismatch";
    case DenyReason::kNotInAcl:
      return "not-in-acl";
    case DenyReason::kSvnDowngrade:
      return "svn-downgrade";
    case DenyReason::kProjectMismatch:
      return "project-mismatch";
  }
  return "?";
}

AccessDecision CheckAccess(const ProjectPolicyRecord& record,
                           const enclave::EnclaveIdentity& requester) {
  switch (record.policy_no) {
    case 1:
      if (requester.mr_enclave != record.owner_mr_enclave) {
        return AccessDecision::Deny(DenyReason::kMeasurementMismatch);
      }
      break;
    case 2:
      if (requester.mr_signer != record.owner_mr_signer) {
        return AccessDecision::Deny(DenyReason::kSignerMismatch);
      }
      break;
    case 3: {
      const auto& acl = record.child_mr_enclaves;
      if (std::find(acl.begin(), acl.end(), requester.mr_enclave) == acl.end()) {
        return AccessDecision::Deny(DenyReason::kNotInAcl);
      }
      break;
    }
    default:
      return AccessDecision::Deny(DenyReason::kNotInAcl);
  }
  if (requester.isv_svn < record.owner_isv_svn) {
    return AccessDecision::Deny(DenyReason::kSvnDowngrade);
  }
  return AccessDecision::Allow();
}

Status DenialStatus(DenyReason reason) {
  return MakeError(ErrorCode::kAccessDenied, std::string(DenyReasonName(reason)));
}

}  // namespace barbie::kms
