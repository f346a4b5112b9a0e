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

#include "barbie/kms/secret_crypto.h"

#include "barbie/crypto/crypto.h"
#include "barbie/kms/policy.h"
#include "barbie/kms/records.h"

namespace barbie::kms {
namespace {

constexpr int kRefAttempts = 8;

bool IsRefId(std::string_view ref) {
  if (ref.size() != 32) return false;
  for (char c : ref) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

std::string NewRefId(RandomSource& rng) { return HexEncode(rng.Array<16>()); }

SoftwareSecretCrypto::SoftwareSecretCrypto(ByteArray<32> key, RandomSource& rng)
    : key_(key), rng_(rng) {
  Bytes tag = crypto::HkdfSha256(key_, {}, AsBytes("barbie-record-tag"), 32);
  tag_key_ = ToArray<32>(tag).value();
}

StatusOr<Bytes> SoftwareSecretCrypto::Encrypt(std::string_view project_id, ByteSpan plaintext) {
  return crypto::AeadSeal(key_, plaintext, AsBytes(project_id), rng_);
}

StatusOr<Bytes> SoftwareSecretCrypto::Decrypt(std::string_view project_id,
                                              ByteSpan ciphertext) {
  auto plain = crypto::AeadOpen(key_, ciphertext, AsBytes(project_id));
  if (!plain.ok()) return MakeError(ErrorCode::kIntegrityViolation, "secret does not decrypt");
  return plain;
}

StatusOr<Digest> SoftwareSecretCrypto::Tag(ByteSpan data) {
  return crypto::HmacSha256(tag_key_, data);
}

StatusOr<std::string> LegacySecrets::Store(std::string_view token, std::string_view project_id,
                                           ByteSpan plaintext, std::string_view name,
                                           std::string_view content_type) {
  SecretRecord record;
  record.project_id = std::string(project_id);
  BARBIE_ASSIGN_OR_RETURN(record.kek_secret, crypto_.Encrypt(project_id, plaintext));
  record.name = std::string(name);
  record.content_type = std::string(content_type);
  record.mode = Origin::kLegacy;
  BARBIE_ASSIGN_OR_RETURN(Digest token_tag,
                          crypto_.Tag(Concat(AsBytes("legacy-token:"), AsBytes(token))));
  record.creator_token_tag = token_tag;
  record.backend = std::string(crypto_.name());
  for (int attempt = 0; attempt < kRefAttempts; ++attempt) {
    record.ref_id = NewRefId(rng_);
    BARBIE_ASSIGN_OR_RETURN(record.record_tag, crypto_.Tag(record.TagInput()));
    Status st = store_.PutIfAbsent(store::Table::kSecrets, record.ref_id,
                                   AsBytes(record.ToJson().dump()));
    if (st.code() != ErrorCode::kExists) {
      BARBIE_RETURN_IF_ERROR(st);
      return record.ref_id;
    }
  }
  return MakeError(ErrorCode::kInternal, "could not allocate a unique ref_id");
}

StatusOr<Bytes> LegacySecrets::Retrieve(std::string_view project_id, std::string_view ref_id) {
  if (!IsRefId(ref_id)) return MakeError(ErrorCode::kNotFound, "no secret " + std::string(ref_id));
  BARBIE_ASSIGN_OR_RETURN(Bytes raw, store_.Get(store::Table::kSecrets, ref_id));
  auto j = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
  if (j.is_discarded()) return MakeError(ErrorCode::kIntegrityViolation, "secret record unreadable");
  BARBIE_ASSIGN_OR_RETURN(SecretRecord record, SecretRecord::FromJson(j));
  BARBIE_ASSIGN_OR_RETURN(Digest tag, crypto_.Tag(record.TagInput()));
  if (!SecureEquals(tag, record.record_tag) || record.ref_id != ref_id) {
    return MakeError(ErrorCode::kIntegrityViolation, "secret record tag mismatch");
  }
  if (record.project_id != project_id) return DenialStatus(DenyReason::kProjectMismatch);
  if (record.mode != Origin::kLegacy) {
    return MakeError(ErrorCode::kAccessDenied, "v2 secrets are not served on v1");
  }
  return crypto_.Decrypt(project_id, record.kek_secret);
}

}  // namespace barbie::kms
