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

#ifndef BARBIE_ATTESTATION_WIRE_H_
#define BARBIE_ATTESTATION_WIRE_H_

#include <nlohmann/json.hpp>

#include "barbie/attestation/protocol.h"

// Canonical JSON encodings of the handshake messages. Binary fields are
// base64; every object carries a "type" discriminator ("msg1" ... "c_msg4").
// Field names: session_id, g_a, g_b, mac, quote, status, payload,
// client_msg1. Decoders fail with kProtocolError on any malformed input.
namespace barbie::attestation {

nlohmann::json ToJson(const Msg1& msg);
nlohmann::json ToJson(const Msg2& msg);
nlohmann::json ToJson(const Msg3& msg);
nlohmann::json ToJson(const Msg4& msg);
nlohmann::json ToJson(const SMsg4& msg);
nlohmann::json ToJson(const CMsg4& msg);

StatusOr<Msg1> Msg1FromJson(const nlohmann::json& j);
StatusOr<Msg2> Msg2FromJson(const nlohmann::json& j);
StatusOr<Msg3> Msg3FromJson(const nlohmann::json& j);
StatusOr<Msg4> Msg4FromJson(const nlohmann::json& j);
StatusOr<SMsg4> SMsg4FromJson(const nlohmann::json& j);
StatusOr<CMsg4> CMsg4FromJson(const nlohmann::json& j);

std::string EncodeSessionId(const SessionId& id);
StatusOr<SessionId> DecodeSessionId(std::string_view text);

}  // namespace barbie::attestation

#endif  // BARBIE_ATTESTATION_WIRE_H_
