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

#include "barbie/client/client.h"

#include "barbie/attestation/wire.h"
#include "barbie/kms/envelope.h"

namespace barbie::client {

using nlohmann::json;

namespace {

constexpr std::string_view kStickyCookie = "barbie_node";

Status Malformed(std::string_view what) {
  return MakeError(ErrorCode::kProtocolError, "malformed server response: " + std::string(what));
}

StatusOr<std::string> StringField(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) return Malformed(name);
  return it->get<std::string>();
}

StatusOr<Bytes> Base64Field(const json& j, const char* name) {
  BARBIE_ASSIGN_OR_RETURN(std::string text, StringField(j, name));
  auto raw = Base64Decode(text);
  if (!raw.ok()) return Malformed(name);
  return std::move(raw).value();
}

const json& Field(const json& j, const char* name) {
  static const json kNull;
  auto it = j.find(name);
  return it == j.end() ? kNull : *it;
}

Status RequireMode(Mode have, std::initializer_list<Mode> allowed, std::string_view op) {
  for (Mode m : allowed) {
    if (m == have) return OkStatus();
  }
  return MakeError(ErrorCode::kInvalidArgument,
                   std::string(op) + " is not available in " + std::string(ModeName(have)) +
                       " mode");
}

}  // namespace

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kLegacy:
      return "legacy";
    case Mode::kAware:
      return "aware";
    case Mode::kEnabled:
      return "enabled";
    case Mode::kAdmin:
      return "admin";
  }
  return "unknown";
}

StatusOr<Mode> ModeFromName(std::string_view name) {
  for (Mode m : {Mode::kLegacy, Mode::kAware, Mode::kEnabled, Mode::kAdmin}) {
    if (ModeName(m) == name) return m;
  }
  return MakeError(ErrorCode::kInvalidArgument, "unknown mode " + std::string(name));
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk:
      return 0;
    case ErrorCode::kReportRejected:
    case ErrorCode::kAttestationFailed:
    case ErrorCode::kProtocolError:
    case ErrorCode::kHandshakeFailed:
    case ErrorCode::kUnknownSession:
    case ErrorCode::kBindingFailed:
    case ErrorCode::kIdentityRejected:
    case ErrorCode::kMutualAttestationFailed:
    case ErrorCode::kAttestationRequired:
    case ErrorCode::kBadCiphertext:
      return 2;
    case ErrorCode::kAccessDenied:
    case ErrorCode::kPermissionDenied:
    case ErrorCode::kUnauthenticated:
    case ErrorCode::kPolicyNotAllowed:
      return 3;
    case ErrorCode::kTransportError:
    case ErrorCode::kUnavailable:
      return 4;
    default:
      return 1;
  }
}

StatusOr<kms::Kek> ParseKekHex(std::string_view hex) {
  if (hex.size() != 2 * kms::kKekSize) {
    return MakeError(ErrorCode::kInvalidArgument, "KEK must be 64 hex characters");
  }
  auto raw = HexDecode(hex);
  if (!raw.ok()) return MakeError(ErrorCode::kInvalidArgument, "KEK is not valid hex");
  return ToArray<kms::kKekSize>(*raw);
}

Client::Client(ClientProfile profile, Transport& transport, RandomSource& rng)
    : profile_(std::move(profile)), transport_(transport), rng_(rng) {}

StatusOr<json> Client::Send(HttpRequest request, bool sticky) {
  if (!profile_.token.empty()) request.headers["X-Auth-Token"] = profile_.token;
  if (sticky) {
    std::string cookie = cookies_.HeaderValue();
    if (!cookie.empty()) request.headers["Cookie"] = cookie;
  }
  BARBIE_ASSIGN_OR_RETURN(HttpResponse response, transport_.Send(request));
  if (sticky) cookies_.Absorb(response);
  json body = json::parse(response.body, nullptr, false);
  if (response.status >= 200 && response.status < 300) {
    if (body.is_discarded() || !body.is_object()) return Malformed("body is not JSON");
    return body;
  }
  if (!body.is_discarded() && body.is_object() && body.contains("error")) {
    auto code = ErrorCodeFromName(body.value("error", ""));
    if (code && *code != ErrorCode::kOk) return MakeError(*code, body.value("message", ""));
  }
  ErrorCode fallback = response.status == 503 ? ErrorCode::kUnavailable : ErrorCode::kInternal;
  return MakeError(fallback, "HTTP " + std::to_string(response.status) + " from " + request.path);
}

StatusOr<json> Client::Post(std::string_view path, const json& body, bool sticky) {
  return Send(HttpRequest{"POST", std::string(path), {}, body.dump()}, sticky);
}

StatusOr<json> Client::Get(std::string_view path, bool sticky) {
  return Send(HttpRequest{"GET", std::string(path), {}, ""}, sticky);
}

StatusOr<std::string> Client::LegacyStore(std::string_view name, ByteSpan plaintext,
                                          std::string_view content_type) {
  BARBIE_RETURN_IF_ERROR(RequireMode(profile_.mode, {Mode::kLegacy}, "legacy store"));
  BARBIE_ASSIGN_OR_RETURN(json reply,
                          Post("/v1/secrets",
                               {{"payload", Base64Encode(plaintext)},
                                {"name", name},
                                {"content_type", content_type}},
                               false));
  return StringField(reply, "secret_ref");
}

StatusOr<Bytes> Client::LegacyGet(std::string_view ref) {
  BARBIE_RETURN_IF_ERROR(RequireMode(profile_.mode, {Mode::kLegacy}, "legacy get"));
  BARBIE_ASSIGN_OR_RETURN(json reply, Get("/v1/secrets/" + std::string(ref), false));
  return Base64Field(reply, "payload");
}

StatusOr<ClientSession> Client::Attest() {
  BARBIE_RETURN_IF_ERROR(
      RequireMode(profile_.mode, {Mode::kAware, Mode::kEnabled, Mode::kAdmin}, "attest"));
  if (profile_.authority_keys.empty()) {
    return MakeError(ErrorCode::kInvalidArgument, "no quoting authority key configured");
  }
  if (profile_.mode == Mode::kEnabled && (!profile_.local_enclave || profile_.project_id.empty())) {
    return MakeError(ErrorCode::kInvalidArgument, "enabled mode needs a local enclave and project");
  }
  cookies_.Clear();
  BARBIE_ASSIGN_OR_RETURN(json start, Post("/v2/attest/start", json::object(), true));
  BARBIE_ASSIGN_OR_RETURN(std::string session_id, StringField(start, "session_id"));
  BARBIE_ASSIGN_OR_RETURN(attestation::Msg1 msg1, attestation::Msg1FromJson(Field(start, "msg1")));
  if (HexEncode(msg1.session_id) != session_id) return Malformed("session_id");

  BARBIE_ASSIGN_OR_RETURN(auto challenge, attestation::ChallengerProcessMsg1(msg1, rng_));
  auto& [challenger, msg2] = challenge;
  BARBIE_ASSIGN_OR_RETURN(json reply2, Post("/v2/attest/msg2",
                                            {{"session_id", session_id},
                                             {"msg2", attestation::ToJson(msg2)}},
                                            true));
  BARBIE_ASSIGN_OR_RETURN(attestation::Msg3 msg3,
                          attestation::Msg3FromJson(Field(reply2, "msg3")));
  attestation::ChallengeOutcome outcome = attestation::ChallengerProcessMsg3(
      challenger, msg3, profile_.authority_keys, profile_.expected_server.AsPredicate());
  if (!outcome.status.ok()) {
    // Tell the server the handshake is over; the local verdict stands.
    (void)Post("/v2/attest/msg4",
               {{"session_id", session_id}, {"msg4", attestation::ToJson(outcome.msg4)}}, true);
    return outcome.status;
  }
  if (profile_.mode == Mode::kEnabled) return AttestMa(session_id, challenger, outcome.msg4);
  return AttestRa(session_id, challenger, outcome.msg4);
}

StatusOr<ClientSession> Client::AttestRa(const std::string& session_id,
                                         attestation::AttestationSession& challenger,
                                         const attestation::Msg4& msg4) {
  BARBIE_ASSIGN_OR_RETURN(json reply, Post("/v2/attest/msg4",
                                           {{"session_id", session_id},
                                            {"msg4", attestation::ToJson(msg4)}},
                                           true));
  if (reply.value("status", "") != "OK") return Malformed("status");
  return ClientSession{session_id, *challenger.session_key(), profile_.mode,
                       cookies_.Get(std::string(kStickyCookie))};
}

StatusOr<ClientSession> Client::AttestMa(const std::string& session_id,
                                         attestation::AttestationSession& challenger,
                                         const attestation::Msg4& msg4) {
  const enclave::EnclaveHandle& local = *profile_.local_enclave;
  BARBIE_ASSIGN_OR_RETURN(
      auto built, attestation::ClientBuildSMsg4(challenger, local, profile_.project_id, rng_));
  auto& [s_msg4, responder] = built;
  BARBIE_ASSIGN_OR_RETURN(json reply4, Post("/v2/attest/msg4",
                                            {{"session_id", session_id},
                                             {"msg4", attestation::ToJson(msg4)},
                                             {"s_msg4", attestation::ToJson(s_msg4)}},
                                            true));
  BARBIE_ASSIGN_OR_RETURN(attestation::Msg2 r_msg2,
                          attestation::Msg2FromJson(Field(reply4, "msg2")));
  BARBIE_ASSIGN_OR_RETURN(attestation::Msg3 r_msg3,
                          attestation::ResponderProcessMsg2(responder, r_msg2, local));
  BARBIE_ASSIGN_OR_RETURN(json reply3, Post("/v2/attest/ma_msg3",
                                            {{"session_id", session_id},
                                             {"msg3", attestation::ToJson(r_msg3)}},
                                            true));
  BARBIE_ASSIGN_OR_RETURN(attestation::Msg4 r_msg4,
                          attestation::Msg4FromJson(Field(reply3, "msg4")));
  BARBIE_RETURN_IF_ERROR(attestation::ResponderProcessMsg4(responder, r_msg4));
  BARBIE_ASSIGN_OR_RETURN(attestation::CMsg4 c_msg4,
                          attestation::CMsg4FromJson(Field(reply3, "c_msg4")));
  BARBIE_ASSIGN_OR_RETURN(Key128 sk, attestation::ClientProcessCMsg4(challenger, c_msg4));
  return ClientSession{session_id, sk, profile_.mode, cookies_.Get(std::string(kStickyCookie))};
}

Status Client::SetPolicy(const ClientSession& session, const Acl& acl) {
  json children = json::array();
  for (const Digest& d : acl.child_mrenclaves) children.push_back(HexEncode(d));
  return Post("/v2/policy",
              {{"session_id", session.session_id},
               {"policy", acl.policy},
               {"child_mrenclaves", children}},
              false)
      .status();
}

StatusOr<std::string> Client::StoreSecret(const ClientSession& session, std::string_view name,
                                          ByteSpan plaintext, std::string_view content_type,
                                          const std::optional<Acl>& acl) {
  if (acl) BARBIE_RETURN_IF_ERROR(SetPolicy(session, *acl));
  BARBIE_ASSIGN_OR_RETURN(Bytes sk_secret, kms::SealForStore(session.sk, plaintext, rng_));
  BARBIE_ASSIGN_OR_RETURN(json reply, Post("/v2/secrets",
                                           {{"session_id", session.session_id},
                                            {"sk_secret", Base64Encode(sk_secret)},
                                            {"name", name},
                                            {"content_type", content_type}},
                                           false));
  return StringField(reply, "secret_ref");
}

StatusOr<Bytes> Client::GetSecret(const ClientSession& session, std::string_view ref) {
  BARBIE_ASSIGN_OR_RETURN(
      json reply,
      Get("/v2/secrets/" + std::string(ref) + "?session_id=" + session.session_id, false));
  BARBIE_ASSIGN_OR_RETURN(Bytes sk_secret, Base64Field(reply, "sk_secret"));
  return kms::OpenRetrieved(session.sk, sk_secret, ref);
}

Status Client::ProvisionKek(const ClientSession& session, std::string_view kek_hex,
                            bool overwrite) {
  BARBIE_RETURN_IF_ERROR(RequireMode(profile_.mode, {Mode::kAdmin}, "provision-kek"));
  BARBIE_ASSIGN_OR_RETURN(kms::Kek kek, ParseKekHex(kek_hex));
  BARBIE_ASSIGN_OR_RETURN(Bytes sk_kek, kms::EncryptKekForProvisioning(session.sk, kek, rng_));
  return Post("/v2/kek",
              {{"session_id", session.session_id},
               {"sk_kek", Base64Encode(sk_kek)},
               {"overwrite", overwrite}},
              true)
      .status();
}

}  // namespace barbie::client
