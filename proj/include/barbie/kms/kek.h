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

#ifndef BARBIE_KMS_KEK_H_
#define BARBIE_KMS_KEK_H_

#include <string>

#include "barbie/attestation/protocol.h"
#include "barbie/enclave/enclave_sim.h"

namespace barbie::kms {

inline constexpr size_t kKekSize = 32;
using Kek = ByteArray<kKekSize>;

// How an instance obtains its KEK at startup.
enum class KekMode { kSealDerived, kAdminProvisioned };
// Where the KEK in hand came from.
enum class KekSource { kSealDerived, kAdminRa };

std::string_view KekModeName(KekMode mode);
StatusOr<KekMode> KekModeFromName(std::string_view name);
std::string_view KekSourceName(KekSource source);

struct KekState {
  Kek kek{};
  enclave::SealedBlob sealed_form;  // BY_MEASUREMENT
  KekSource provisioned_by = KekSource::kSealDerived;
};

// kek = HKDF(BY_MEASUREMENT seal key, info "KEK"): deterministic per enclave
// identity and platform.
KekState GenerateKekFromSealKey(const enclave::EnclaveHandle& enclave,
                                RandomSource& rng = DefaultRandom());

KekState SealKek(const enclave::EnclaveHandle& enclave, const Kek& kek, KekSource source,
                 RandomSource& rng = DefaultRandom());

// Sealed KEK file contents: {"provisioned_by", "sealed"}.
std::string SealedKekToJson(const KekState& state);
// kUnsealDenied when the blob was sealed by another enclave or platform.
StatusOr<KekState> UnsealKekJson(const enclave::EnclaveHandle& enclave, std::string_view json);

// SK_KEK: the KEK under an attested session key, associated data "barbie-kek".
StatusOr<Bytes> EncryptKekForProvisioning(const attestation::Key128& session_key, const Kek& kek,
                                          RandomSource& rng = DefaultRandom());
// kProvisioningFailed on any authentication or length failure.
StatusOr<Kek> DecryptProvisionedKek(const attestation::Key128& session_key, ByteSpan sk_kek);

// HMAC(kek, "barbie-kek-check"); safe to persist.
Digest KekFingerprint(const Kek& kek);

}  // namespace barbie::kms

#endif  // BARBIE_KMS_KEK_H_
