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

#include "barbie/kms/records.h"

namespace barbie::kms {

using nlohmann::json;

namespace {

Status Corrupt(std::string what) {
  return MakeError(ErrorCode::kIntegrityViolation, "malformed record: " + std::move(what));
}

template <typename T>
StatusOr<T> Field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) return Corrupt(std::string("missing ") + name);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    return Corrupt(std::string("bad type for ") + name);
  }
}

StatusOr<Digest> DigestField(const json& j, const char* name) {
  BARBIE_ASSIGN_OR_RETURN(std::string hex, Field<std::string>(j, name));
  auto raw = HexDecode(hex);
  if (!raw.ok() || raw->size() != 32) return Corrupt(std::string("bad digest ") + name);
  return ToArray<32>(*raw).value();
}

StatusOr<Bytes> Base64Field(const json& j, const char* name) {
  BARBIE_ASSIGN_OR_RETURN(std::string text, Field<std::string>(j, name));
  auto raw = Base64Decode(text);
  if (!raw.ok()) return Corrupt(std::string("bad base64 ") + name);
  return std::move(raw).value();
}

void AppendString(Bytes& out, std::string_view s) { AppendLengthPrefixed(out, AsBytes(s)); }

void AppendOptionalIdentity(Bytes& out, const std::optional<enclave::EnclaveIdentity>& id) {
  out.push_back(id ? 1 : 0);
  if (id) {
    Bytes s = id->Serialize();
    out.insert(out.end(), s.begin(), s.end());
  }
}

void AppendOptionalDigest(Bytes& out, const std::optional<Digest>& d) {
  out.push_back(d ? 1 : 0);
  if (d) out.insert(out.end(), d->begin(), d->end());
}

StatusOr<std::optional<enclave::EnclaveIdentity>> OptionalIdentity(const json& j,
                                                                   const char* name) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::optional<enclave::EnclaveIdentity>();
  BARBIE_ASSIGN_OR_RETURN(auto id, IdentityFromJson(*it));
  return std::optional<enclave::EnclaveIdentity>(id);
}

StatusOr<std::optional<Digest>> OptionalDigest(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) return std::optional<Digest>();
  BARBIE_ASSIGN_OR_RETURN(Digest d, DigestField(j, name));
  return std::optional<Digest>(d);
}

}  // namespace

std::string_view OriginName(Origin origin) {
  switch (origin) {
    case Origin::kLegacy:
      return "LEGACY";
    case Origin::kRa:
      return "RA";
    case Origin::kMa:
      return "MA";
  }
  return "?";
}

StatusOr<Origin> OriginFromName(std::string_view name) {
  if (name == "LEGACY") return Origin::kLegacy;
  if (name == "RA") return Origin::kRa;
  if (name == "MA") return Origin::kMa;
  return Corrupt("unknown mode " + std::string(name));
}

json IdentityToJson(const enclave::EnclaveIdentity& id) {
  return {{"mr_enclave", HexEncode(id.mr_enclave)},
          {"mr_signer", HexEncode(id.mr_signer)},
          {"isv_svn", id.isv_svn},
          {"cpu_svn", HexEncode(id.cpu_svn)}};
}

StatusOr<enclave::EnclaveIdentity> IdentityFromJson(const json& j) {
  if (!j.is_object()) return Corrupt("identity is not an object");
  enclave::EnclaveIdentity id;
  BARBIE_ASSIGN_OR_RETURN(id.mr_enclave, DigestField(j, "mr_enclave"));
  BARBIE_ASSIGN_OR_RETURN(id.mr_signer, DigestField(j, "mr_signer"));
  BARBIE_ASSIGN_OR_RETURN(id.isv_svn, Field<uint16_t>(j, "isv_svn"));
  BARBIE_ASSIGN_OR_RETURN(std::string cpu, Field<std::string>(j, "cpu_svn"));
  auto raw = HexDecode(cpu);
  if (!raw.ok() || raw->size() != enclave::kCpuSvnSize) return Corrupt("bad cpu_svn");
  id.cpu_svn = ToArray<enclave::kCpuSvnSize>(*raw).value();
  return id;
}

bool ProjectPolicyRecord::IsOwner(const enclave::EnclaveIdentity& id) const {
  return HasOwner() && id.mr_enclave == owner_mr_enclave && id.mr_signer == owner_mr_signer &&
         id.isv_svn >= owner_isv_svn;
}

Bytes ProjectPolicyRecord::TagInput() const {
  Bytes out = ToBytes("barbie-project-record");
  AppendString(out, project_id);
  out.push_back(static_cast<uint8_t>(policy_no));
  AppendString(out, OriginName(origin));
  out.insert(out.end(), owner_mr_enclave.begin(), owner_mr_enclave.end());
  out.insert(out.end(), owner_mr_signer.begin(), owner_mr_signer.end());
  AppendU16(out, owner_isv_svn);
  AppendU32(out, static_cast<uint32_t>(child_mr_enclaves.size()));
  for (const auto& c : child_mr_enclaves) out.insert(out.end(), c.begin(), c.end());
  return out;
}

json ProjectPolicyRecord::ToJson() const {
  json children = json::array();
  for (const auto& c : child_mr_enclaves) children.push_back(HexEncode(c));
  return {{"project_id", project_id},
          {"policy_no", policy_no},
          {"origin", OriginName(origin)},
          {"owner_mr_enclave", HexEncode(owner_mr_enclave)},
          {"owner_mr_signer", HexEncode(owner_mr_signer)},
          {"owner_isv_svn", owner_isv_svn},
          {"child_mr_enclaves", children},
          {"enc_sk", Base64Encode(enc_sk)},
          {"policy_tag", HexEncode(policy_tag)}};
}

StatusOr<ProjectPolicyRecord> ProjectPolicyRecord::FromJson(const json& j) {
  if (!j.is_object()) return Corrupt("project record is not an object");
  ProjectPolicyRecord r;
  BARBIE_ASSIGN_OR_RETURN(r.project_id, Field<std::string>(j, "project_id"));
  BARBIE_ASSIGN_OR_RETURN(r.policy_no, Field<int>(j, "policy_no"));
  BARBIE_ASSIGN_OR_RETURN(std::string origin, Field<std::string>(j, "origin"));
  BARBIE_ASSIGN_OR_RETURN(r.origin, OriginFromName(origin));
  BARBIE_ASSIGN_OR_RETURN(r.owner_mr_enclave, DigestField(j, "owner_mr_enclave"));
  BARBIE_ASSIGN_OR_RETURN(r.owner_mr_signer, DigestField(j, "owner_mr_signer"));
  BARBIE_ASSIGN_OR_RETURN(r.owner_isv_svn, Field<uint16_t>(j, "owner_isv_svn"));
  BARBIE_ASSIGN_OR_RETURN(auto children, Field<std::vector<std::string>>(j, "child_mr_enclaves"));
  for (const auto& hex : children) {
    auto raw = HexDecode(hex);
    if (!raw.ok() || raw->size() != 32) return Corrupt("bad child_mr_enclaves entry");
    r.child_mr_enclaves.push_back(ToArray<32>(*raw).value());
  }
  BARBIE_ASSIGN_OR_RETURN(r.enc_sk, Base64Field(j, "enc_sk"));
  BARBIE_ASSIGN_OR_RETURN(r.policy_tag, DigestField(j, "policy_tag"));
  return r;
}

Bytes SecretRecord::TagInput() const {
  Bytes out = ToBytes("barbie-secret-record");
  AppendString(out, ref_id);
  AppendString(out, project_id);
  AppendLengthPrefixed(out, kek_secret);
  AppendString(out, name);
  AppendString(out, content_type);
  AppendString(out, OriginName(mode));
  AppendOptionalIdentity(out, creator_identity);
  AppendOptionalDigest(out, owner_key_tag);
  AppendOptionalDigest(out, creator_token_tag);
  AppendString(out, backend);
  return out;
}

json SecretRecord::ToJson() const {
  json j = {{"ref_id", ref_id},
            {"project_id", project_id},
            {"kek_secret", Base64Encode(kek_secret)},
            {"name", name},
            {"content_type", content_type},
            {"mode", OriginName(mode)},
            {"creator_identity", nullptr},
            {"owner_key_tag", nullptr},
            {"creator_token_tag", nullptr},
            {"backend", backend},
            {"record_tag", HexEncode(record_tag)}};
  if (creator_identity) j["creator_identity"] = IdentityToJson(*creator_identity);
  if (owner_key_tag) j["owner_key_tag"] = HexEncode(*owner_key_tag);
  if (creator_token_tag) j["creator_token_tag"] = HexEncode(*creator_token_tag);
  return j;
}

StatusOr<SecretRecord> SecretRecord::FromJson(const json& j) {
  if (!j.is_object()) return Corrupt("secret record is not an object");
  SecretRecord r;
  BARBIE_ASSIGN_OR_RETURN(r.ref_id, Field<std::string>(j, "ref_id"));
  BARBIE_ASSIGN_OR_RETURN(r.project_id, Field<std::string>(j, "project_id"));
  BARBIE_ASSIGN_OR_RETURN(r.kek_secret, Base64Field(j, "kek_secret"));
  BARBIE_ASSIGN_OR_RETURN(r.name, Field<std::string>(j, "name"));
  BARBIE_ASSIGN_OR_RETURN(r.content_type, Field<std::string>(j, "content_type"));
  BARBIE_ASSIGN_OR_RETURN(std::string mode, Field<std::string>(j, "mode"));
  BARBIE_ASSIGN_OR_RETURN(r.mode, OriginFromName(mode));
  BARBIE_ASSIGN_OR_RETURN(r.creator_identity, OptionalIdentity(j, "creator_identity"));
  BARBIE_ASSIGN_OR_RETURN(r.owner_key_tag, OptionalDigest(j, "owner_key_tag"));
  BARBIE_ASSIGN_OR_RETURN(r.creator_token_tag, OptionalDigest(j, "creator_token_tag"));
  BARBIE_ASSIGN_OR_RETURN(r.backend, Field<std::string>(j, "backend"));
  BARBIE_ASSIGN_OR_RETURN(r.record_tag, DigestField(j, "record_tag"));
  return r;
}

Bytes SessionRecord::AssociatedData() const {
  Bytes out = ToBytes("barbie-session-record");
  AppendString(out, session_id);
  AppendString(out, project_id);
  AppendString(out, OriginName(origin));
  AppendOptionalIdentity(out, identity);
  AppendU32(out, static_cast<uint32_t>(static_cast<uint64_t>(expires_at) >> 32));
  AppendU32(out, static_cast<uint32_t>(expires_at));
  return out;
}

json SessionRecord::ToJson() const {
  json j = {{"session_id", session_id},
            {"project_id", project_id},
            {"origin", OriginName(origin)},
            {"identity", nullptr},
            {"expires_at", expires_at},
            {"enc_sk", Base64Encode(enc_sk)}};
  if (identity) j["identity"] = IdentityToJson(*identity);
  return j;
}

StatusOr<SessionRecord> SessionRecord::FromJson(const json& j) {
  if (!j.is_object()) return Corrupt("session record is not an object");
  SessionRecord r;
  BARBIE_ASSIGN_OR_RETURN(r.session_id, Field<std::string>(j, "session_id"));
  BARBIE_ASSIGN_OR_RETURN(r.project_id, Field<std::string>(j, "project_id"));
  BARBIE_ASSIGN_OR_RETURN(std::string origin, Field<std::string>(j, "origin"));
  BARBIE_ASSIGN_OR_RETURN(r.origin, OriginFromName(origin));
  BARBIE_ASSIGN_OR_RETURN(r.identity, OptionalIdentity(j, "identity"));
  BARBIE_ASSIGN_OR_RETURN(r.expires_at, Field<int64_t>(j, "expires_at"));
  BARBIE_ASSIGN_OR_RETURN(r.enc_sk, Base64Field(j, "enc_sk"));
  return r;
}

}  // namespace barbie::kms
