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

#ifndef BARBIE_KMS_TRUSTED_CORE_H_
#define BARBIE_KMS_TRUSTED_CORE_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "barbie/attestation/protocol.h"
#include "barbie/kms/kek.h"
#include "barbie/kms/policy.h"
#include "barbie/kms/records.h"
#include "barbie/kms/secret_crypto.h"
#include "barbie/store/store.h"

namespace barbie::kms {

using attestation::Key128;

struct CoreConfig {
  KekMode kek_mode = KekMode::kSealDerived;
  std::filesystem::path sealed_kek_path;
  // Per-project KEKs derived from the master as HKDF(kek, project_id).
  bool per_project_keks = false;
  int64_t session_ttl_seconds = 3600;
  std::function<int64_t()> clock;  // unix seconds; system clock when empty
};

// A v2 session after its handshake, as every instance sees it.
struct DataSession {
  std::string session_id;  // hex
  std::string project_id;
  Origin origin = Origin::kRa;
  Key128 sk{};
  std::optional<enclave::EnclaveIdentity> identity;  // MA only
  int64_t expires_at = 0;
};

// Outcome of the policy decision taken before CMsg4 is sent.
struct MutualKeyPlan {
  Key128 key{};
  bool project_key = false;  // the project's stored SK rather than a per-session one
  std::optional<ProjectPolicyRecord> new_record;
};

// All plaintext keys and secrets live only inside this class. Thread-safe.
class TrustedCore final : public SecretCrypto {
 public:
  TrustedCore(enclave::EnclaveHandle enclave, store::Store store, CoreConfig config,
              RandomSource& rng = DefaultRandom());

  // Recovers or derives the KEK. Not finding one is not an error: the core
  // runs with kek_present() false and KEK-dependent calls fail kek-missing.
  Status Start();
  bool kek_present() const;
  std::optional<KekSource> kek_source() const;
  std::string kek_missing_reason() const;

  Status ProvisionKek(ByteSpan sk_kek, const Key128& session_key, bool overwrite);

  // enc_sk = AEAD(kek, sk, AAD = project_id). RA origin requires policy 3.
  // The record is returned, not persisted.
  StatusOr<ProjectPolicyRecord> StoreSessionKey(
      std::string_view project_id, const Key128& sk, int policy_no, Origin origin,
      const std::optional<enclave::EnclaveIdentity>& owner,
      std::vector<Digest> child_mr_enclaves) const;
  // kIntegrityViolation when enc_sk does not open under the record's own
  // project_id.
  StatusOr<Key128> LoadSessionKey(const ProjectPolicyRecord& record) const;

  // Verifies policy_tag; kIntegrityViolation on mismatch.
  StatusOr<std::optional<ProjectPolicyRecord>> FindProject(std::string_view project_id) const;
  Status SaveProject(const ProjectPolicyRecord& record, bool create_only) const;

  // The owner, or anyone check_access admits, receives the project SK. Others
  // receive a fresh per-session key. A project without a record gets a new
  // policy-1 record owned by `client`.
  StatusOr<MutualKeyPlan> PlanMutualSessionKey(std::string_view project_id,
                                               const enclave::EnclaveIdentity& client);
  Status CommitMutualSessionKey(const MutualKeyPlan& plan) const;
  // Creates the policy-3 record for an RA project if none exists.
  Status RecordRaProject(std::string_view project_id, const Key128& sk) const;
  Status SetPolicy(const DataSession& session, int policy_no,
                   std::vector<Digest> child_mr_enclaves) const;

  StatusOr<DataSession> OpenSession(std::string_view session_id, std::string_view project_id,
                                    Origin origin, const Key128& sk,
                                    std::optional<enclave::EnclaveIdentity> identity) const;
  // Unknown or expired sessions are kAttestationRequired.
  StatusOr<DataSession> LoadSession(std::string_view session_id) const;

  // sk_secret = AEAD(session sk, plaintext, "barbie-store").
  StatusOr<std::string> StoreSecret(const DataSession& session, ByteSpan sk_secret,
                                    std::string_view name, std::string_view content_type);
  // Returns AEAD(session sk, plaintext, "barbie-retrieve:" + ref_id).
  StatusOr<Bytes> RetrieveSecret(const DataSession& session, std::string_view ref_id) const;

  // SecretCrypto, for v1 traffic under the enclave backend.
  std::string_view name() const override { return "enclave"; }
  StatusOr<Bytes> Encrypt(std::string_view project_id, ByteSpan plaintext) override;
  StatusOr<Bytes> Decrypt(std::string_view project_id, ByteSpan ciphertext) override;
  StatusOr<Digest> Tag(ByteSpan data) override;

  const enclave::EnclaveHandle& enclave() const { return enclave_; }
  const store::Store& store() const { return store_; }
  int64_t Now() const;

 private:
  struct Keys {
    Kek master{};
    ByteArray<32> tag_key{};
    KekSource source = KekSource::kSealDerived;
  };

  StatusOr<Keys> CurrentKeys() const;
  ByteArray<32> ProjectKek(const Keys& keys, std::string_view project_id) const;
  Digest TagWith(const Keys& keys, ByteSpan data) const;
  Status InstallKek(const KekState& state);  // caller holds mu_ exclusively
  StatusOr<std::optional<Digest>> StoredFingerprint() const;

  enclave::EnclaveHandle enclave_;
  store::Store store_;
  CoreConfig config_;
  RandomSource& rng_;

  mutable std::shared_mutex mu_;
  std::optional<Keys> keys_;
  std::string missing_reason_ = "no KEK has been provisioned";
};

}  // namespace barbie::kms

#endif  // BARBIE_KMS_TRUSTED_CORE_H_
