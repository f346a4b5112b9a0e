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

#include "barbie/attestation/wire.h"

namespace barbie::attestation {

using nlohmann::json;

namespace {

Status Malformed(std::string what) {
  return MakeError(ErrorCode::kProtocolError, "malformed message: " + std::move(what));
}

Status CheckType(const json& j, std::string_view type) {
  if (!j.is_object()) return Malformed("not an object");
  auto it = j.find("type");
  if (it == j.end() || !it->is_string() || it->get<std::string>() != type) {
    return Malformed("expected type " + std::string(type));
  }
  return OkStatus();
}

StatusOr<Bytes> BytesField(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) return Malformed(std::string("missing ") + name);
  auto decoded = Base64Decode(it->get<std::string>());
  if (!decoded.ok()) return Malformed(std::string("bad base64 in ") + name);
  return std::move(decoded).value();
}

template <size_t N>
StatusOr<ByteArray<N>> ArrayField(const json& j, const char* name) {
  BARBIE_ASSIGN_OR_RETURN(Bytes raw, BytesField(j, name));
  if (raw.size() != N) return Malformed(std::string("wrong length for ") + name);
  ByteArray<N> out;
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

}  // namespace

std::string EncodeSessionId(const SessionId& id) { return Base64Encode(id); }

StatusOr<SessionId> DecodeSessionId(std::string_view text) {
  auto raw = Base64Decode(text);
  if (!raw.ok() || raw->size() != kSessionIdSize) return Malformed("session_id");
  SessionId id;
  std::copy(raw->begin(), raw->end(), id.begin());
  return id;
}

json ToJson(const Msg1& m) {
  return {{"type", "msg1"}, {"session_id", Base64Encode(m.session_id)},
          {"g_a", Base64Encode(m.g_a)}};
}

json ToJson(const Msg2& m) {
  return {{"type", "msg2"},
          {"session_id", Base64Encode(m.session_id)},
          {"g_b", Base64Encode(m.g_b)},
          {"mac", Base64Encode(m.mac)}};
}

json ToJson(const Msg3& m) {
  return {{"type", "msg3"},
          {"session_id", Base64Encode(m.session_id)},
          {"quote", Base64Encode(m.quote)},
          {"mac", Base64Encode(m.mac)}};
}

json ToJson(const Msg4& m) {
  return {{"type", "msg4"},
          {"session_id", Base64Encode(m.session_id)},
          {"status", m.status == Msg4Status::kOk ? "OK" : "REJECTED"},
          {"mac", Base64Encode(m.mac)}};
}

json ToJson(const SMsg4& m) {
  return {{"type", "s_msg4"},
          {"session_id", Base64Encode(m.session_id)},
          {"payload", Base64Encode(m.payload)},
          {"client_msg1", ToJson(m.client_msg1)}};
}

json ToJson(const CMsg4& m) {
  return {{"type", "c_msg4"},
          {"session_id", Base64Encode(m.session_id)},
          {"payload", Base64Encode(m.payload)}};
}

StatusOr<Msg1> Msg1FromJson(const json& j) {
  BARBIE_RETURN_IF_ERROR(CheckType(j, "msg1"));
  Msg1 m;
  BARBIE_ASSIGN_OR_RETURN(m.session_id, ArrayField<kSessionIdSize>(j, "session_id"));
  BARBIE_ASSIGN_OR_RETURN(m.g_a, BytesField(j, "g_a"));
  return m;
}

StatusOr<Msg2> Msg2FromJson(const json& j) {
  BARBIE_RETURN_IF_ERROR(CheckType(j, "msg2"));
  Msg2 m;
  BARBIE_ASSIGN_OR_RETURN(m.session_id, ArrayField<kSessionIdSize>(j, "session_id"));
  BARBIE_ASSIGN_OR_RETURN(m.g_b, BytesField(j, "g_b"));
  BARBIE_ASSIGN_OR_RETURN(m.mac, ArrayField<kMacSize>(j, "mac"));
  return m;
}

StatusOr<Msg3> Msg3FromJson(const json& j) {
  BARBIE_RETURN_IF_ERROR(CheckType(j, "msg3"));
  Msg3 m;
  BARBIE_ASSIGN_OR_RETURN(m.session_id, ArrayField<kSessionIdSize>(j, "session_id"));
  BARBIE_ASSIGN_OR_RETURN(m.quote, BytesField(j, "quote"));
  BARBIE_ASSIGN_OR_RETURN(m.mac, ArrayField<kMacSize>(j, "mac"));
  return m;
}

StatusOr<Msg4> Msg4FromJson(const json& j) {
  BARBIE_RETURN_IF_ERROR(CheckType(j, "msg4"));
  Msg4 m;
  BARBIE_ASSIGN_OR_RETURN(m.session_id, ArrayField<kSessionIdSize>(j, "session_id"));
  auto it = j.find("status");
  if (it == j.end() || !it->is_string()) return Malformed("missing status");
  std::string status = it->get<std::string>();
  if (status == "OK") {
    m.status = Msg4Status::kOk;
  } else if (status == "REJECTED") {
    m.status = Msg4Status::kRejected;
  } else {
    return Malformed("unknown status");
  }
  BARBIE_ASSIGN_OR_RETURN(m.mac, ArrayField<kMacSize>(j, "mac"));
  return m;
}

StatusOr<SMsg4> SMsg4FromJson(const json& j) {
  BARBIE_RETURN_IF_ERROR(CheckType(j, "s_msg4"));
  SMsg4 m;
  BARBIE_ASSIGN_OR_RETURN(m.session_id, ArrayField<kSessionIdSize>(j, "session_id"));
  BARBIE_ASSIGN_OR_RETURN(m.payload, BytesField(j, "payload"));
  auto it = j.find("client_msg1");
  if (it == j.end()) return Malformed("missing client_msg1");
  BARBIE_ASSIGN_OR_RETURN(m.client_msg1, Msg1FromJson(*it));
  return m;
}

StatusOr<CMsg4> CMsg4FromJson(const json& j) {
  BARBIE_RETURN_IF_ERROR(CheckType(j, "c_msg4"));
  CMsg4 m;
  BARBIE_ASSIGN_OR_RETURN(m.session_id, ArrayField<kSessionIdSize>(j, "session_id"));
  BARBIE_ASSIGN_OR_RETURN(m.payload, BytesField(j, "payload"));
  return m;
}

}  // namespace barbie::attestation
