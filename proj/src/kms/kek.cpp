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

#include "barbie/kms/kek.h"

#include <nlohmann/json.hpp>

#include "barbie/crypto/crypto.h"

namespace barbie::kms {

using nlohmann::json;

namespace {
constexpr std::string_view kProvisionAad = "barbie-kek";
}

std::string_view KekModeName(KekMode mode) {
  return mode == KekMode::kSealDerived ? "SEAL_DERIVED" : "ADMIN_PROVISIONED";
}

StatusOr<KekMode> KekModeFromName(std::string_view name) {
  if (name == "SEAL_DERIVED") return KekMode::kSealDerived;
  if (name == "ADMIN_PROVISIONED") return KekMode::kAdminProvisioned;
  return MakeError(ErrorCode::kInvalidArgument, "unknown kek_mode " + std::string(name));
}

std::string_view KekSourceName(KekSource source) {
  return source == KekSource::kSealDerived ? "SEAL_DERIVED" : "ADMIN_RA";
}

KekState GenerateKekFromSealKey(const enclave::EnclaveHandle& enclave, RandomSource& rng) {
  auto seal_key = enclave::DeriveSealKey(enclave, enclave::SealPolicy::kByMeasurement);
  Bytes derived = crypto::HkdfSha256(seal_key, {}, AsBytes("KEK"), kKekSize);
  return SealKek(enclave, ToArray<kKekSize>(derived).value(), KekSource::kSealDerived, rng);
}

KekState SealKek(const enclave::EnclaveHandle& enclave, const Kek& kek, KekSource source,
                 RandomSource& rng) {
  KekState state;
  state.kek = kek;
  state.provisioned_by = source;
  state.sealed_form = enclave::Seal(enclave, kek, enclave::SealPolicy::kByMeasurement, rng);
  return state;
}

std::string SealedKekToJson(const KekState& state) {
  json j = {{"provisioned_by", KekSourceName(state.provisioned_by)},
            {"sealed", json::parse(state.sealed_form.ToJson())}};
  return j.dump(2);
}

StatusOr<KekState> UnsealKekJson(const enclave::EnclaveHandle& enclave, std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("sealed") ||
      !j.contains("provisioned_by") || !j["provisioned_by"].is_string()) {
    return MakeError(ErrorCode::kUnsealDenied, "sealed KEK file is malformed");
  }
  auto parsed = enclave::SealedBlob::FromJson(j["sealed"].dump());
  if (!parsed.ok()) return MakeError(ErrorCode::kUnsealDenied, "sealed KEK blob is malformed");
  const enclave::SealedBlob& blob = *parsed;
  BARBIE_ASSIGN_OR_RETURN(Bytes kek, enclave::Unseal(enclave, blob));
  if (kek.size() != kKekSize) return MakeError(ErrorCode::kUnsealDenied, "sealed KEK has wrong size");
  KekState state;
  state.kek = ToArray<kKekSize>(kek).value();
  state.sealed_form = blob;
  state.provisioned_by = j["provisioned_by"] == "ADMIN_RA" ? KekSource::kAdminRa
                                                          : KekSource::kSealDerived;
  return state;
}

StatusOr<Bytes> EncryptKekForProvisioning(const attestation::Key128& session_key, const Kek& kek,
                                          RandomSource& rng) {
  return crypto::AeadSeal(session_key, kek, AsBytes(kProvisionAad), rng);
}

StatusOr<Kek> DecryptProvisionedKek(const attestation::Key128& session_key, ByteSpan sk_kek) {
  auto plain = crypto::AeadOpen(session_key, sk_kek, AsBytes(kProvisionAad));
  if (!plain.ok() || plain->size() != kKekSize) {
    return MakeError(ErrorCode::kProvisioningFailed, "SK_KEK does not decrypt to a 32-byte KEK");
  }
  return ToArray<kKekSize>(*plain).value();
}

Digest KekFingerprint(const Kek& kek) {
  return crypto::HmacSha256(kek, AsBytes("barbie-kek-check"));
}

}  // namespace barbie::kms
