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

#include "barbie/kms/trusted_core.h"

#include <chrono>
#include <mutex>

#include "barbie/common/file_util.h"
#include "barbie/crypto/crypto.h"
#include "barbie/kms/envelope.h"

namespace barbie::kms {

using nlohmann::json;

namespace {

constexpr std::string_view kFingerprintKey = "kek_fingerprint";
constexpr int kRefAttempts = 8;

Status KekMissing(const std::string& why) { return MakeError(ErrorCode::kKekMissing, why); }

bool IsHexId(std::string_view id) {
  if (id.size() != 32) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

StatusOr<json> ParseRecord(const Bytes& raw, std::string_view what) {
  auto j = json::parse(raw.begin(), raw.end(), nullptr, false);
  if (j.is_discarded()) {
    return MakeError(ErrorCode::kIntegrityViolation, std::string(what) + " record unreadable");
  }
  return j;
}

bool SameEnclave(const enclave::EnclaveIdentity& a, const enclave::EnclaveIdentity& b) {
  return a.mr_enclave == b.mr_enclave && a.mr_signer == b.mr_signer;
}

}  // namespace

TrustedCore::TrustedCore(enclave::EnclaveHandle enclave, store::Store store, CoreConfig config,
                         RandomSource& rng)
    : enclave_(std::move(enclave)), store_(std::move(store)), config_(std::move(config)),
      rng_(rng) {}

int64_t TrustedCore::Now() const {
  if (config_.clock) return config_.clock();
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

StatusOr<std::optional<Digest>> TrustedCore::StoredFingerprint() const {
  auto raw = store_.Get(store::Table::kMeta, kFingerprintKey);
  if (raw.status().code() == ErrorCode::kNotFound) return std::optional<Digest>();
  BARBIE_RETURN_IF_ERROR(raw.status());
  BARBIE_ASSIGN_OR_RETURN(json j, ParseRecord(*raw, "kek fingerprint"));
  auto hex = j.value("fingerprint", std::string());
  auto bytes = HexDecode(hex);
  if (!bytes.ok() || bytes->size() != 32) {
    return MakeError(ErrorCode::kIntegrityViolation, "kek fingerprint record malformed");
  }
  return std::optional<Digest>(ToArray<32>(*bytes).value());
}

Status TrustedCore::InstallKek(const KekState& state) {
  Keys keys;
  keys.master = state.kek;
  keys.source = state.provisioned_by;
  Bytes tag = crypto::HkdfSha256(state.kek, {}, AsBytes("barbie-record-tag"), 32);
  keys.tag_key = ToArray<32>(tag).value();
  keys_ = keys;
  return OkStatus();
}

Status TrustedCore::Start() {
  std::unique_lock lock(mu_);
  keys_.reset();
  BARBIE_ASSIGN_OR_RETURN(std::optional<Digest> stored, StoredFingerprint());

  if (!config_.sealed_kek_path.empty()) {
    auto file = ReadFile(config_.sealed_kek_path);
    if (file.ok()) {
      auto state = UnsealKekJson(enclave_, *file);
      if (!state.ok()) {
        missing_reason_ = "sealed KEK does not unseal here: " + state.status().message();
        return OkStatus();
      }
      if (stored && !SecureEquals(*stored, KekFingerprint(state->kek))) {
        missing_reason_ = "sealed KEK does not match the KEK protecting the store";
        return OkStatus();
      }
      return InstallKek(*state);
    }
    if (file.status().code() != ErrorCode::kNotFound) return file.status();
  }

  if (config_.kek_mode == KekMode::kAdminProvisioned) {
    missing_reason_ = "no KEK has been provisioned";
    return OkStatus();
  }
  KekState derived = GenerateKekFromSealKey(enclave_, rng_);
  Digest fingerprint = KekFingerprint(derived.kek);
  if (stored && !SecureEquals(*stored, fingerprint)) {
    missing_reason_ = "seal-derived KEK differs from the KEK protecting the store";
    return OkStatus();
  }
  if (!stored) {
    json j = {{"fingerprint", HexEncode(fingerprint)}};
    Status st = store_.PutIfAbsent(store::Table::kMeta, kFingerprintKey, AsBytes(j.dump()));
    if (st.code() == ErrorCode::kExists) {
      BARBIE_ASSIGN_OR_RETURN(stored, StoredFingerprint());
      if (!stored || !SecureEquals(*stored, fingerprint)) {
        missing_reason_ = "seal-derived KEK differs from the KEK protecting the store";
        return OkStatus();
      }
    } else {
      BARBIE_RETURN_IF_ERROR(st);
    }
  }
  if (!config_.sealed_kek_path.empty()) {
    BARBIE_RETURN_IF_ERROR(WriteFileAtomic(config_.sealed_kek_path, SealedKekToJson(derived)));
  }
  return InstallKek(derived);
}

bool TrustedCore::kek_present() const {
  std::shared_lock lock(mu_);
  return keys_.has_value();
}

std::optional<KekSource> TrustedCore::kek_source() const {
  std::shared_lock lock(mu_);
  if (!keys_) return std::nullopt;
  return keys_->source;
}

std::string TrustedCore::kek_missing_reason() const {
  std::shared_lock lock(mu_);
  return keys_ ? std::string() : missing_reason_;
}

Status TrustedCore::ProvisionKek(ByteSpan sk_kek, const Key128& session_key, bool overwrite) {
  BARBIE_ASSIGN_OR_RETURN(Kek kek, DecryptProvisionedKek(session_key, sk_kek));
  std::unique_lock lock(mu_);
  if (keys_ && !overwrite) {
    return MakeError(ErrorCode::kKekExists, "a KEK is already installed; pass overwrite");
  }
  Digest fingerprint = KekFingerprint(kek);
  BARBIE_ASSIGN_OR_RETURN(std::optional<Digest> stored, StoredFingerprint());
  if (stored && !SecureEquals(*stored, fingerprint) && !overwrite) {
    return MakeError(ErrorCode::kKekExists,
                     "the store is protected by a different KEK; pass overwrite");
  }
  if (!stored || !SecureEquals(*stored, fingerprint)) {
    json j = {{"fingerprint", HexEncode(fingerprint)}};
    BARBIE_RETURN_IF_ERROR(store_.Put(store::Table::kMeta, kFingerprintKey, j.dump()));
  }
  KekState state = SealKek(enclave_, kek, KekSource::kAdminRa, rng_);
  if (!config_.sealed_kek_path.empty()) {
    BARBIE_RETURN_IF_ERROR(WriteFileAtomic(config_.sealed_kek_path, SealedKekToJson(state)));
  }
  return InstallKek(state);
}

StatusOr<TrustedCore::Keys> TrustedCore::CurrentKeys() const {
  std::shared_lock lock(mu_);
  if (!keys_) return KekMissing(missing_reason_);
  return *keys_;
}

ByteArray<32> TrustedCore::ProjectKek(const Keys& keys, std::string_view project_id) const {
  if (!config_.per_project_keks) return keys.master;
  Bytes k = crypto::HkdfSha256(keys.master, {},
                               Concat(AsBytes("barbie-project-kek:"), AsBytes(project_id)), 32);
  return ToArray<32>(k).value();
}

Digest TrustedCore::TagWith(const Keys& keys, ByteSpan data) const {
  return crypto::HmacSha256(keys.tag_key, data);
}

StatusOr<ProjectPolicyRecord> TrustedCore::StoreSessionKey(
    std::string_view project_id, const Key128& sk, int policy_no, Origin origin,
    const std::optional<enclave::EnclaveIdentity>& owner,
    std::vector<Digest> child_mr_enclaves) const {
  if (policy_no < 1 || policy_no > 3) {
    return MakeError(ErrorCode::kInvalidArgument, "policy must be 1, 2 or 3");
  }
  if (origin == Origin::kRa && policy_no != 3) {
    return MakeError(ErrorCode::kPolicyNotAllowed, "RA sessions support policy 3 only");
  }
  if (origin == Origin::kMa && !owner) {
    return MakeError(ErrorCode::kInvalidArgument, "MA records need an owner identity");
  }
  if (origin == Origin::kLegacy) {
    return MakeError(ErrorCode::kInvalidArgument, "v1 projects hold no session key");
  }
  BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
  ProjectPolicyRecord record;
  record.project_id = std::string(project_id);
  record.policy_no = policy_no;
  record.origin = origin;
  if (owner) {
    record.owner_mr_enclave = owner->mr_enclave;
    record.owner_mr_signer = owner->mr_signer;
    record.owner_isv_svn = owner->isv_svn;
  }
  record.child_mr_enclaves = std::move(child_mr_enclaves);
  BARBIE_ASSIGN_OR_RETURN(record.enc_sk, crypto::AeadSeal(ProjectKek(keys, project_id), sk,
                                                          AsBytes(project_id), rng_));
  record.policy_tag = TagWith(keys, record.TagInput());
  return record;
}

StatusOr<Key128> TrustedCore::LoadSessionKey(const ProjectPolicyRecord& record) const {
  BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
  auto plain = crypto::AeadOpen(ProjectKek(keys, record.project_id), record.enc_sk,
                                AsBytes(record.project_id));
  if (!plain.ok() || plain->size() != attestation::kKeySize) {
    return MakeError(ErrorCode::kIntegrityViolation,
                     "session key of project '" + record.project_id + "' fails to authenticate");
  }
  return ToArray<attestation::kKeySize>(*plain).value();
}

StatusOr<std::optional<ProjectPolicyRecord>> TrustedCore::FindProject(
    std::string_view project_id) const {
  if (!store::IsValidKey(project_id)) {
    return MakeError(ErrorCode::kInvalidArgument, "invalid project_id");
  }
  auto raw = store_.Get(store::Table::kProjects, project_id);
  if (raw.status().code() == ErrorCode::kNotFound) return std::optional<ProjectPolicyRecord>();
  BARBIE_RETURN_IF_ERROR(raw.status());
  BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
  BARBIE_ASSIGN_OR_RETURN(json j, ParseRecord(*raw, "project"));
  BARBIE_ASSIGN_OR_RETURN(ProjectPolicyRecord record, ProjectPolicyRecord::FromJson(j));
  if (!SecureEquals(TagWith(keys, record.TagInput()), record.policy_tag)) {
    return MakeError(ErrorCode::kIntegrityViolation,
                     "policy record of project '" + std::string(project_id) + "' was altered");
  }
  if (record.project_id != project_id) {
    return MakeError(ErrorCode::kIntegrityViolation, "project record filed under another name");
  }
  return std::optional<ProjectPolicyRecord>(std::move(record));
}

Status TrustedCore::SaveProject(const ProjectPolicyRecord& record, bool create_only) const {
  std::string body = record.ToJson().dump(2);
  if (create_only) {
    return store_.PutIfAbsent(store::Table::kProjects, record.project_id, AsBytes(body));
  }
  return store_.Put(store::Table::kProjects, record.project_id, body);
}

StatusOr<MutualKeyPlan> TrustedCore::PlanMutualSessionKey(std::string_view project_id,
                                                          const enclave::EnclaveIdentity& client) {
  BARBIE_ASSIGN_OR_RETURN(std::optional<ProjectPolicyRecord> existing, FindProject(project_id));
  MutualKeyPlan plan;
  if (!existing) {
    plan.key = rng_.Array<attestation::kKeySize>();
    plan.project_key = true;
    BARBIE_ASSIGN_OR_RETURN(ProjectPolicyRecord record,
                            StoreSessionKey(project_id, plan.key, 1, Origin::kMa, client, {}));
    plan.new_record = std::move(record);
    return plan;
  }
  if (existing->IsOwner(client) || CheckAccess(*existing, client).allowed) {
    BARBIE_ASSIGN_OR_RETURN(plan.key, LoadSessionKey(*existing));
    plan.project_key = true;
    return plan;
  }
  // Not admitted: the session still completes, under a key nobody else holds,
  // and the recorded identity is judged again on every secret request.
  plan.key = rng_.Array<attestation::kKeySize>();
  return plan;
}

Status TrustedCore::CommitMutualSessionKey(const MutualKeyPlan& plan) const {
  if (!plan.new_record) return OkStatus();
  Status st = SaveProject(*plan.new_record, /*create_only=*/true);
  if (st.code() == ErrorCode::kExists) {
    return MakeError(ErrorCode::kBusy, "project record created concurrently; retry");
  }
  return st;
}

Status TrustedCore::RecordRaProject(std::string_view project_id, const Key128& sk) const {
  BARBIE_ASSIGN_OR_RETURN(std::optional<ProjectPolicyRecord> existing, FindProject(project_id));
  if (existing) return OkStatus();
  BARBIE_ASSIGN_OR_RETURN(ProjectPolicyRecord record,
                          StoreSessionKey(project_id, sk, 3, Origin::kRa, std::nullopt, {}));
  Status st = SaveProject(record, /*create_only=*/true);
  return st.code() == ErrorCode::kExists ? OkStatus() : st;
}

Status TrustedCore::SetPolicy(const DataSession& session, int policy_no,
                              std::vector<Digest> child_mr_enclaves) const {
  if (policy_no < 1 || policy_no > 3) {
    return MakeError(ErrorCode::kInvalidArgument, "policy must be 1, 2 or 3");
  }
  if (session.origin == Origin::kRa && policy_no != 3) {
    return MakeError(ErrorCode::kPolicyNotAllowed, "RA sessions support policy 3 only");
  }
  BARBIE_ASSIGN_OR_RETURN(std::optional<ProjectPolicyRecord> existing,
                          FindProject(session.project_id));
  if (!existing) return MakeError(ErrorCode::kNotFound, "project has no policy record");
  BARBIE_ASSIGN_OR_RETURN(Key128 project_sk, LoadSessionKey(*existing));
  bool owner = SecureEquals(project_sk, session.sk) &&
               (!existing->HasOwner() || (session.identity && existing->IsOwner(*session.identity)));
  if (!owner) return MakeError(ErrorCode::kAccessDenied, "not-owner");

  std::optional<enclave::EnclaveIdentity> owner_id;
  if (existing->HasOwner()) owner_id = *session.identity;
  BARBIE_ASSIGN_OR_RETURN(ProjectPolicyRecord updated,
                          StoreSessionKey(session.project_id, project_sk, policy_no,
                                          existing->origin, owner_id,
                                          std::move(child_mr_enclaves)));
  if (existing->HasOwner()) {
    // The owner keeps the svn floor it registered with.
    updated.owner_isv_svn = existing->owner_isv_svn;
    BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
    updated.policy_tag = TagWith(keys, updated.TagInput());
  }
  return SaveProject(updated, /*create_only=*/false);
}

StatusOr<DataSession> TrustedCore::OpenSession(
    std::string_view session_id, std::string_view project_id, Origin origin, const Key128& sk,
    std::optional<enclave::EnclaveIdentity> identity) const {
  if (!IsHexId(session_id)) return MakeError(ErrorCode::kInvalidArgument, "bad session id");
  BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
  SessionRecord record;
  record.session_id = std::string(session_id);
  record.project_id = std::string(project_id);
  record.origin = origin;
  record.identity = identity;
  record.expires_at = Now() + config_.session_ttl_seconds;
  BARBIE_ASSIGN_OR_RETURN(record.enc_sk,
                          crypto::AeadSeal(keys.master, sk, record.AssociatedData(), rng_));
  BARBIE_RETURN_IF_ERROR(
      store_.Put(store::Table::kSessions, record.session_id, record.ToJson().dump(2)));
  return DataSession{record.session_id, record.project_id, origin, sk, identity,
                     record.expires_at};
}

StatusOr<DataSession> TrustedCore::LoadSession(std::string_view session_id) const {
  auto required = [] {
    return MakeError(ErrorCode::kAttestationRequired, "no live session; attest again");
  };
  if (!IsHexId(session_id)) return required();
  auto raw = store_.Get(store::Table::kSessions, session_id);
  if (raw.status().code() == ErrorCode::kNotFound) return required();
  BARBIE_RETURN_IF_ERROR(raw.status());
  BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
  BARBIE_ASSIGN_OR_RETURN(json j, ParseRecord(*raw, "session"));
  BARBIE_ASSIGN_OR_RETURN(SessionRecord record, SessionRecord::FromJson(j));
  if (record.session_id != session_id) {
    return MakeError(ErrorCode::kIntegrityViolation, "session record filed under another id");
  }
  auto sk = crypto::AeadOpen(keys.master, record.enc_sk, record.AssociatedData());
  if (!sk.ok() || sk->size() != attestation::kKeySize) {
    return MakeError(ErrorCode::kIntegrityViolation, "session record was altered");
  }
  if (record.expires_at <= Now()) {
    (void)store_.Delete(store::Table::kSessions, session_id);
    return required();
  }
  return DataSession{record.session_id, record.project_id, record.origin,
                     ToArray<attestation::kKeySize>(*sk).value(), record.identity,
                     record.expires_at};
}

StatusOr<std::string> TrustedCore::StoreSecret(const DataSession& session, ByteSpan sk_secret,
                                               std::string_view name,
                                               std::string_view content_type) {
  BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
  BARBIE_ASSIGN_OR_RETURN(Bytes plain, OpenStored(session.sk, sk_secret));
  SecretRecord record;
  record.project_id = session.project_id;
  BARBIE_ASSIGN_OR_RETURN(record.kek_secret,
                          crypto::AeadSeal(ProjectKek(keys, session.project_id), plain,
                                           AsBytes(session.project_id), rng_));
  record.name = std::string(name);
  record.content_type = std::string(content_type);
  record.mode = session.origin;
  if (session.origin == Origin::kMa) {
    record.creator_identity = session.identity;
  } else {
    record.owner_key_tag = TagWith(keys, Concat(AsBytes("owner-key:"), session.sk));
  }
  record.backend = std::string(this->name());
  for (int attempt = 0; attempt < kRefAttempts; ++attempt) {
    record.ref_id = NewRefId(rng_);
    record.record_tag = TagWith(keys, record.TagInput());
    Status st = store_.PutIfAbsent(store::Table::kSecrets, record.ref_id,
                                   AsBytes(record.ToJson().dump(2)));
    if (st.code() != ErrorCode::kExists) {
      BARBIE_RETURN_IF_ERROR(st);
      return record.ref_id;
    }
  }
  return MakeError(ErrorCode::kInternal, "could not allocate a unique ref_id");
}

StatusOr<Bytes> TrustedCore::RetrieveSecret(const DataSession& session,
                                            std::string_view ref_id) const {
  if (!IsHexId(ref_id)) return MakeError(ErrorCode::kNotFound, "no secret " + std::string(ref_id));
  BARBIE_ASSIGN_OR_RETURN(Bytes raw, store_.Get(store::Table::kSecrets, ref_id));
  BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
  BARBIE_ASSIGN_OR_RETURN(json j, ParseRecord(raw, "secret"));
  BARBIE_ASSIGN_OR_RETURN(SecretRecord record, SecretRecord::FromJson(j));
  if (!SecureEquals(TagWith(keys, record.TagInput()), record.record_tag) ||
      record.ref_id != ref_id) {
    return MakeError(ErrorCode::kIntegrityViolation, "secret record was altered");
  }
  if (record.project_id != session.project_id) {
    return DenialStatus(DenyReason::kProjectMismatch);
  }

  bool owner = false;
  switch (record.mode) {
    case Origin::kLegacy:
      owner = true;
      break;
    case Origin::kRa:
      owner = record.owner_key_tag &&
              SecureEquals(*record.owner_key_tag,
                           TagWith(keys, Concat(AsBytes("owner-key:"), session.sk)));
      break;
    case Origin::kMa:
      owner = session.identity && record.creator_identity &&
              SameEnclave(*session.identity, *record.creator_identity) &&
              session.identity->isv_svn >= record.creator_identity->isv_svn;
      break;
  }
  if (!owner) {
    if (!session.identity) {
      return MakeError(ErrorCode::kAttestationRequired,
                       "this secret needs a mutually attested session");
    }
    BARBIE_ASSIGN_OR_RETURN(std::optional<ProjectPolicyRecord> policy,
                            FindProject(record.project_id));
    if (!policy) return DenialStatus(DenyReason::kNotInAcl);
    AccessDecision decision = CheckAccess(*policy, *session.identity);
    if (!decision.allowed) return DenialStatus(*decision.reason);
  }

  auto plain = crypto::AeadOpen(ProjectKek(keys, record.project_id), record.kek_secret,
                                AsBytes(record.project_id));
  if (!plain.ok()) return MakeError(ErrorCode::kIntegrityViolation, "secret does not decrypt");
  return SealForRetrieve(session.sk, *plain, ref_id, rng_);
}

StatusOr<Bytes> TrustedCore::Encrypt(std::string_view project_id, ByteSpan plaintext) {
  BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
  return crypto::AeadSeal(ProjectKek(keys, project_id), plaintext, AsBytes(project_id), rng_);
}

StatusOr<Bytes> TrustedCore::Decrypt(std::string_view project_id, ByteSpan ciphertext) {
  BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
  auto plain = crypto::AeadOpen(ProjectKek(keys, project_id), ciphertext, AsBytes(project_id));
  if (!plain.ok()) return MakeError(ErrorCode::kIntegrityViolation, "secret does not decrypt");
  return plain;
}

StatusOr<Digest> TrustedCore::Tag(ByteSpan data) {
  BARBIE_ASSIGN_OR_RETURN(Keys keys, CurrentKeys());
  return TagWith(keys, data);
}

}  // namespace barbie::kms
