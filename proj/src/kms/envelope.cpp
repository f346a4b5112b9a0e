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

#include "barbie/kms/envelope.h"

namespace barbie::kms {

namespace {

Bytes RetrieveAad(std::string_view ref_id) {
  return Concat(AsBytes(kRetrievePrefix), AsBytes(ref_id));
}

}  // namespace

StatusOr<Bytes> SealForStore(const attestation::Key128& sk, ByteSpan plaintext,
                             RandomSource& rng) {
  return crypto::AeadSeal(sk, plaintext, AsBytes(kStoreAad), rng);
}

StatusOr<Bytes> OpenStored(const attestation::Key128& sk, ByteSpan sk_secret) {
  auto plain = crypto::AeadOpen(sk, sk_secret, AsBytes(kStoreAad));
  if (!plain.ok()) {
    return MakeError(ErrorCode::kBadCiphertext, "sk_secret does not decrypt under the session key");
  }
  return plain;
}

StatusOr<Bytes> SealForRetrieve(const attestation::Key128& sk, ByteSpan plaintext,
                                std::string_view ref_id, RandomSource& rng) {
  return crypto::AeadSeal(sk, plaintext, RetrieveAad(ref_id), rng);
}

StatusOr<Bytes> OpenRetrieved(const attestation::Key128& sk, ByteSpan sk_secret,
                              std::string_view ref_id) {
  auto plain = crypto::AeadOpen(sk, sk_secret, RetrieveAad(ref_id));
  if (!plain.ok()) {
    return MakeError(ErrorCode::kBadCiphertext, "response does not decrypt under the session key");
  }
  return plain;
}

}  // namespace barbie::kms
