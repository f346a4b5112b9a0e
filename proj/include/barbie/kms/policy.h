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

#ifndef BARBIE_KMS_POLICY_H_
#define BARBIE_KMS_POLICY_H_

#include <optional>
#include <string_view>

#include "barbie/enclave/enclave_sim.h"
#include "barbie/kms/records.h"

namespace barbie::kms {

enum class DenyReason {
  kMeasurementMismatch,
  kSignerMismatch,
  kNotInAcl,
  kSvnDowngrade,
  kProjectMismatch,
};

std::string_view DenyReasonName(DenyReason reason);

struct AccessDecision {
  bool allowed = false;
  std::optional<DenyReason> reason;  // set iff !allowed

  static AccessDecision Allow() { return {true, std::nullopt}; }
  static AccessDecision Deny(DenyReason r) { return {false, r}; }
  friend bool operator==(const AccessDecision&, const AccessDecision&) = default;
};

// Policy 1 matches mr_enclave against the owner, policy 2 matches mr_signer,
// policy 3 requires mr_enclave in the child list. The identity rule is
// evaluated first; a requester that passes it must also have
// isv_svn >= owner_isv_svn.
AccessDecision CheckAccess(const ProjectPolicyRecord& record,
                           const enclave::EnclaveIdentity& requester);

// kAccessDenied carrying the reason name as its message.
Status DenialStatus(DenyReason reason);

}  // namespace barbie::kms

#endif  // BARBIE_KMS_POLICY_H_
