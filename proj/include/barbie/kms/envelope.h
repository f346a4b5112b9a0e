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

#ifndef BARBIE_KMS_ENVELOPE_H_
#define BARBIE_KMS_ENVELOPE_H_

#include <string_view>

#include "barbie/attestation/protocol.h"

// Session-key envelopes for v2 secret payloads, shared by server and client.
namespace barbie::kms {

inline constexpr std::string_view kStoreAad = "barbie-store";
inline constexpr std::string_view kRetrievePrefix = "barbie-retrieve:";

// sk_secret for POST /v2/secrets.
StatusOr<Bytes> SealForStore(const attestation::Key128& sk, ByteSpan plaintext,
                             RandomSource& rng = DefaultRandom());
StatusOr<Bytes> OpenStored(const attestation::Key128& sk, ByteSpan sk_secret);

// sk_secret returned by GET /v2/secrets/{ref_id}; bound to the ref.
StatusOr<Bytes> SealForRetrieve(const attestation::Key128& sk, ByteSpan plaintext,
                                std::string_view ref_id, RandomSource& rng = DefaultRandom());
StatusOr<Bytes> OpenRetrieved(const attestation::Key128& sk, ByteSpan sk_secret,
                              std::string_view ref_id);

}  // namespace barbie::kms

#endif  // BARBIE_KMS_ENVELOPE_H_
