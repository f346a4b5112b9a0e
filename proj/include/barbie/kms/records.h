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

#ifndef BARBIE_KMS_RECORDS_H_
#define BARBIE_KMS_RECORDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "barbie/common/bytes.h"
#include "barbie/common/status.h"
#include "barbie/enclave/enclave_sim.h"

// Persisted record types. Every record is JSON: digests hex, ciphertexts
// base64. Ciphertext fields are AEAD under the KEK with the project_id as
// associated data; the *_tag fields are HMACs under a KEK-derived key over
// TagInput().
namespace barbie::kms {

enum class Origin { kLegacy, kRa, kMa };

std::string_view OriginName(Origin origin);
StatusOr<Origin> OriginFromName(std::string_view name);

nlohmann::json IdentityToJson(const enclave::EnclaveIdentity& id);
StatusOr<enclave::EnclaveIdentity> IdentityFromJson(const nlohmann::json& j);

struct ProjectPolicyRecord {
  std::string project_id;
  int policy_no = 3;
  Origin origin = Origin::kRa;  // RA-origin records are always policy 3
  Digest owner_mr_enclave{};    // zero when origin is RA
  Digest owner_mr_signer{};
  uint16_t owner_isv_svn = 0;
  std::vector<Digest> child_mr_enclaves;
  Bytes enc_sk;
  Digest policy_tag{};

  bool HasOwner() const { return origin == Origin::kMa; }
  bool IsOwner(const enclave::EnclaveIdentity& id) const;
  // Everything except enc_sk and the tag itself.
  Bytes TagInput() const;
  nlohmann::json ToJson() const;
  static StatusOr<ProjectPolicyRecord> FromJson(const nlohmann::json& j);
};

struct SecretRecord {
  std::string ref_id;  // 32 hex chars
  std::string project_id;
  Bytes kek_secret;
  std::string name;
  std::string content_type;
  Origin mode = Origin::kLegacy;
  std::optional<enclave::EnclaveIdentity> creator_identity;  // MA
  std::optional<Digest> owner_key_tag;                      // RA
  std::optional<Digest> creator_token_tag;                  // LEGACY
  std::string backend;  // crypto backend that wrote kek_secret
  Digest record_tag{};

  // Every field except record_tag, kek_secret included.
  Bytes TagInput() const;
  nlohmann::json ToJson() const;
  static StatusOr<SecretRecord> FromJson(const nlohmann::json& j);
};

// A data-plane session persisted after a v2 handshake so any instance
// sharing the store can serve it.
struct SessionRecord {
  std::string session_id;  // 32 hex chars
  std::string project_id;
  Origin origin = Origin::kRa;
  std::optional<enclave::EnclaveIdentity> identity;  // MA
  int64_t expires_at = 0;                            // unix seconds
  Bytes enc_sk;  // AEAD under the KEK, associated data = AssociatedData()

  Bytes AssociatedData() const;
  nlohmann::json ToJson() const;
  static StatusOr<SessionRecord> FromJson(const nlohmann::json& j);
};

}  // namespace barbie::kms

#endif  // BARBIE_KMS_RECORDS_H_
