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

#ifndef BARBIE_ATTESTATION_TRANSCRIPT_H_
#define BARBIE_ATTESTATION_TRANSCRIPT_H_

#include <string_view>

#include <nlohmann/json.hpp>

#include "barbie/common/status.h"

// Golden RA transcripts: one complete handshake with fixed randomness, with
// the ephemeral private keys and derived keys disclosed so that another
// implementation can replay either side.
//
// Layout: version, seed, server {manifest, signer_key, isv_svn, mr_enclave,
// mr_signer}, authority_public_key, session_id_hex, responder_private_key,
// challenger_private_key, messages {msg1, msg2, msg3, msg4} in wire JSON,
// keys {smk, sk, mk, vk}. Binary values are base64 unless named *_hex.
namespace barbie::attestation {

inline constexpr int kTranscriptVersion = 1;

// The platform comes from SeededRandom(seed); the responder and the
// challenger each draw from their own seeded stream.
StatusOr<nlohmann::json> GenerateTranscript(uint64_t seed, std::string_view manifest,
                                            std::string_view signer_key, uint16_t isv_svn = 1);

// Checks the transcript from both ends without trusting its key fields:
// public keys match the disclosed private keys, the challenger derives the
// recorded keys and Msg2 MAC, the quote verifies under the authority with the
// recorded identity and binding, and a fresh responder fed the recorded
// Msg2 and Msg4 reproduces Msg3 and reaches ESTABLISHED. Wire JSON must
// re-encode byte for byte.
Status VerifyTranscript(const nlohmann::json& transcript);

}  // namespace barbie::attestation

#endif  // BARBIE_ATTESTATION_TRANSCRIPT_H_
