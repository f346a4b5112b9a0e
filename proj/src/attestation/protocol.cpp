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

#include "barbie/attestation/protocol.h"

#include <algorithm>

#include "barbie/crypto/crypto.h"

namespace barbie::attestation {
namespace {

using enclave::EnclaveIdentity;
using enclave::Report;
using enclave::ReportData;

constexpr std::string_view kMsg3Label = "msg3";
constexpr std::string_view kMsg4Label = "msg4";
constexpr std::string_view kSMsg4Aad = "s_msg4";
constexpr std::string_view kCMsg4Aad = "c_msg4";

Mac TruncatedHmac(const Key128& key, ByteSpan data) {
  Digest full = crypto::HmacSha256(key, data);
  Mac mac;
  std::copy(full.begin(), full.begin() + kMacSize, mac.begin());
  return mac;
}

Mac Msg3Mac(const Key128& smk, const SessionId& id, ByteSpan quote) {
  return TruncatedHmac(smk, Concat(AsBytes(kMsg3Label), id, quote));
}

Mac Msg4Mac(const Key128& smk, const SessionId& id, Msg4Status status) {
  Bytes data = Concat(AsBytes(kMsg4Label), id);
  data.push_back(static_cast<uint8_t>(status));
  return TruncatedHmac(smk, data);
}

Msg4 MakeMsg4(const AttestationSession& session, Msg4Status status) {
  Msg4 msg;
  msg.session_id = session.session_id();
  msg.status = status;
  if (session.keys()) msg.mac = Msg4Mac(session.keys()->smk, msg.session_id, status);
  return msg;
}

Bytes SMsg4Aad(const SessionId& id) { return Concat(AsBytes(kSMsg4Aad), id); }
Bytes CMsg4Aad(const SessionId& id) { return Concat(AsBytes(kCMsg4Aad), id); }

StatusOr<SessionKeys> KeysFromPeer(const crypto::X25519KeyPair& own, ByteSpan peer_public) {
  BARBIE_ASSIGN_OR_RETURN(auto shared, crypto::X25519SharedSecret(own.private_key, peer_public));
  return DeriveSessionKeys(shared);
}

Status WrongState(const AttestationSession& session, std::string_view op) {
  return MakeError(ErrorCode::kProtocolError,
                   std::string(op) + " not valid in state " +
                       std::string(SessionStateName(session.state())));
}

}  // namespace

SessionKeys DeriveSessionKeys(ByteSpan shared_secret) {
  auto derive = [&](std::string_view label) {
    Bytes k = crypto::HkdfSha256(shared_secret, {}, AsBytes(label), kKeySize);
    Key128 out;
    std::copy(k.begin(), k.end(), out.begin());
    return out;
  };
  return SessionKeys{derive("SMK"), derive("SK"), derive("MK"), derive("VK")};
}

std::string_view SessionStateName(SessionState state) {
  switch (state) {
    case SessionState::kStarted:
      return "STARTED";
    case SessionState::kMsg1Sent:
      return "MSG1_SENT";
    case SessionState::kMsg2Sent:
      return "MSG2_SENT";
    case SessionState::kMsg3Sent:
      return "MSG3_SENT";
    case SessionState::kEstablished:
      return "ESTABLISHED";
    case SessionState::kFailed:
      return "FAILED";
  }
  return "?";
}

std::optional<Key128> AttestationSession::session_key() const {
  if (state_ != SessionState::kEstablished || !keys_) return std::nullopt;
  if (issued_sk_) return issued_sk_;
  return keys_->sk;
}

IdentityPredicate IdentityExpectation::AsPredicate() const {
  return [expect = *this](const EnclaveIdentity& id) {
    if (expect.mr_enclave && *expect.mr_enclave != id.mr_enclave) return false;
    if (expect.mr_signer && *expect.mr_signer != id.mr_signer) return false;
    if (expect.min_isv_svn && id.isv_svn < *expect.min_isv_svn) return false;
    return true;
  };
}

Mac ComputeMsg2Mac(const Key128& smk, ByteSpan g_b, ByteSpan g_a) {
  return TruncatedHmac(smk, Concat(g_b, g_a));
}

ReportData BindingReportData(ByteSpan g_a, ByteSpan g_b, const Key128& vk) {
  Digest h = crypto::Sha256(Concat(g_a, g_b, vk));
  ReportData data{};
  std::copy(h.begin(), h.end(), data.begin());
  return data;
}

ReportData ClientBindingReportData(ByteSpan client_g_a) {
  Digest h = crypto::Sha256(client_g_a);
  ReportData data{};
  std::copy(h.begin(), h.end(), data.begin());
  return data;
}

Digest MutualReportHash(ByteSpan client_report_body, ByteSpan server_report_body) {
  return crypto::Sha256(Concat(client_report_body, server_report_body));
}

std::pair<AttestationSession, Msg1> ResponderStart(const enclave::EnclaveHandle& enclave,
                                                   RandomSource& rng) {
  (void)enclave;
  AttestationSession session(Role::kResponder, rng.Array<kSessionIdSize>(),
                             crypto::X25519Generate(rng));
  session.state_ = SessionState::kMsg1Sent;
  Msg1 msg1{session.session_id(), Bytes(session.own_dh_public().begin(),
                                        session.own_dh_public().end())};
  return {std::move(session), std::move(msg1)};
}

StatusOr<std::pair<AttestationSession, Msg2>> ChallengerProcessMsg1(const Msg1& msg1,
                                                                    RandomSource& rng) {
  AttestationSession session(Role::kChallenger, msg1.session_id, crypto::X25519Generate(rng));
  BARBIE_ASSIGN_OR_RETURN(SessionKeys keys, KeysFromPeer(session.ephemeral_dh_, msg1.g_a));
  ByteArray<32> g_a;
  std::copy(msg1.g_a.begin(), msg1.g_a.end(), g_a.begin());
  session.peer_dh_public_ = g_a;
  session.keys_ = keys;
  session.state_ = SessionState::kMsg2Sent;

  Msg2 msg2;
  msg2.session_id = msg1.session_id;
  msg2.g_b.assign(session.own_dh_public().begin(), session.own_dh_public().end());
  msg2.mac = ComputeMsg2Mac(keys.smk, msg2.g_b, msg1.g_a);
  return std::make_pair(std::move(session), std::move(msg2));
}

StatusOr<Msg3> ResponderProcessMsg2(AttestationSession& session, const Msg2& msg2,
                                    const enclave::EnclaveHandle& enclave) {
  if (session.role() != Role::kResponder || session.state() != SessionState::kMsg1Sent) {
    return WrongState(session, "msg2");
  }
  if (msg2.session_id != session.session_id()) {
    return MakeError(ErrorCode::kUnknownSession, "msg2 names a different session");
  }
  auto keys = KeysFromPeer(session.ephemeral_dh_, msg2.g_b);
  if (!keys.ok()) return session.Fail(keys.status());

  const auto& g_a = session.own_dh_public();
  Mac expected = ComputeMsg2Mac(keys->smk, msg2.g_b, g_a);
  if (!SecureEquals(expected, msg2.mac)) {
    return session.Fail(MakeError(ErrorCode::kHandshakeFailed, "msg2 mac mismatch"));
  }

  auto report = enclave::CreateReport(enclave, BindingReportData(g_a, msg2.g_b, keys->vk));
  if (!report.ok()) return session.Fail(report.status());
  auto quote = enclave::QuoteReport(*report, enclave.platform());
  if (!quote.ok()) return session.Fail(quote.status());

  ByteArray<32> g_b;
  std::copy(msg2.g_b.begin(), msg2.g_b.end(), g_b.begin());
  session.peer_dh_public_ = g_b;
  session.keys_ = *keys;
  session.own_report_ = *report;
  session.state_ = SessionState::kMsg3Sent;

  Msg3 msg3;
  msg3.session_id = session.session_id();
  msg3.quote = quote->Serialize();
  msg3.mac = Msg3Mac(keys->smk, msg3.session_id, msg3.quote);
  return msg3;
}

ChallengeOutcome ChallengerProcessMsg3(AttestationSession& session, const Msg3& msg3,
                                       std::span<const ByteArray<32>> authority_keys,
                                       const IdentityPredicate& expected_identity) {
  if (session.role() != Role::kChallenger || session.state() != SessionState::kMsg2Sent) {
    return {MakeMsg4(session, Msg4Status::kRejected), WrongState(session, "msg3")};
  }
  if (msg3.session_id != session.session_id()) {
    return {MakeMsg4(session, Msg4Status::kRejected),
            MakeError(ErrorCode::kUnknownSession, "msg3 names a different session")};
  }
  auto reject = [&](Status st) {
    session.Fail(st);
    return ChallengeOutcome{MakeMsg4(session, Msg4Status::kRejected), std::move(st)};
  };

  const SessionKeys& keys = *session.keys_;
  if (!SecureEquals(Msg3Mac(keys.smk, msg3.session_id, msg3.quote), msg3.mac)) {
    return reject(MakeError(ErrorCode::kHandshakeFailed, "msg3 mac mismatch"));
  }
  auto quote = enclave::Quote::Parse(msg3.quote);
  if (!quote.ok()) return reject(quote.status());

  std::optional<EnclaveIdentity> identity;
  for (const auto& key : authority_keys) {
    auto verified = enclave::VerifyQuote(*quote, key);
    if (verified.ok()) {
      identity = *verified;
      break;
    }
  }
  if (!identity) {
    return reject(MakeError(ErrorCode::kAttestationFailed,
                            "quote not signed by a trusted quoting authority"));
  }

  ReportData expected =
      BindingReportData(*session.peer_dh_public_, session.own_dh_public(), keys.vk);
  if (!SecureEquals(expected, quote->report.report_data)) {
    return reject(MakeError(ErrorCode::kBindingFailed,
                            "quote report_data does not bind this key exchange"));
  }
  if (expected_identity && !expected_identity(*identity)) {
    return reject(MakeError(ErrorCode::kIdentityRejected,
                            "enclave identity does not satisfy the expected predicate"));
  }

  session.peer_report_ = quote->report;
  session.peer_identity_ = *identity;
  session.state_ = SessionState::kEstablished;
  return {MakeMsg4(session, Msg4Status::kOk), OkStatus()};
}

Status ResponderProcessMsg4(AttestationSession& session, const Msg4& msg4) {
  if (session.role() != Role::kResponder || session.state() != SessionState::kMsg3Sent) {
    return WrongState(session, "msg4");
  }
  if (msg4.session_id != session.session_id()) {
    return MakeError(ErrorCode::kUnknownSession, "msg4 names a different session");
  }
  Mac expected = Msg4Mac(session.keys_->smk, msg4.session_id, msg4.status);
  if (!SecureEquals(expected, msg4.mac)) {
    return session.Fail(MakeError(ErrorCode::kHandshakeFailed, "msg4 mac mismatch"));
  }
  if (msg4.status != Msg4Status::kOk) {
    return session.Fail(
        MakeError(ErrorCode::kAttestationFailed, "challenger rejected the attestation"));
  }
  session.state_ = SessionState::kEstablished;
  return OkStatus();
}

StatusOr<std::pair<SMsg4, AttestationSession>> ClientBuildSMsg4(
    AttestationSession& session, const enclave::EnclaveHandle& client_enclave,
    std::string_view project_id, RandomSource& rng) {
  if (session.role() != Role::kChallenger || !session.established() ||
      !session.peer_report_) {
    return MakeError(ErrorCode::kProtocolError,
                     "s_msg4 requires an established attestation of the server");
  }
  if (session.nonce_) {
    return MakeError(ErrorCode::kProtocolError, "s_msg4 already sent on this session");
  }
  auto [reverse, client_msg1] = ResponderStart(client_enclave, rng);

  BARBIE_ASSIGN_OR_RETURN(
      Report client_report,
      enclave::CreateReport(client_enclave, ClientBindingReportData(client_msg1.g_a)));
  Digest hash = MutualReportHash(client_report.SerializeBody(),
                                 session.peer_report_->SerializeBody());

  Nonce nonce = rng.Array<kNonceSize>();
  Bytes plain = Concat(nonce, hash);
  AppendLengthPrefixed(plain, AsBytes(project_id));
  BARBIE_ASSIGN_OR_RETURN(
      Bytes payload,
      crypto::AeadSeal(session.keys_->mk, plain, SMsg4Aad(session.session_id()), rng));

  session.nonce_ = nonce;
  session.project_id_ = std::string(project_id);

  SMsg4 msg;
  msg.session_id = session.session_id();
  msg.payload = std::move(payload);
  msg.client_msg1 = std::move(client_msg1);
  return std::make_pair(std::move(msg), std::move(reverse));
}

StatusOr<SMsg4Contents> OpenSMsg4(const AttestationSession& session, const SMsg4& s_msg4) {
  if (s_msg4.session_id != session.session_id()) {
    return MakeError(ErrorCode::kUnknownSession, "s_msg4 names a different session");
  }
  if (!session.keys()) {
    return MakeError(ErrorCode::kProtocolError, "no session keys");
  }
  auto plain = crypto::AeadOpen(session.keys()->mk, s_msg4.payload,
                                SMsg4Aad(session.session_id()));
  if (!plain.ok()) {
    return MakeError(ErrorCode::kProtocolError, "s_msg4 payload does not decrypt");
  }
  constexpr size_t kFixed = kNonceSize + 32 + 4;
  if (plain->size() < kFixed) {
    return MakeError(ErrorCode::kProtocolError, "s_msg4 payload too short");
  }
  const uint8_t* p = plain->data();
  uint32_t len = (uint32_t(p[48]) << 24) | (uint32_t(p[49]) << 16) |
                 (uint32_t(p[50]) << 8) | uint32_t(p[51]);
  if (plain->size() != kFixed + len) {
    return MakeError(ErrorCode::kProtocolError, "s_msg4 project_id length mismatch");
  }
  SMsg4Contents out;
  std::copy(p, p + kNonceSize, out.nonce.begin());
  std::copy(p + kNonceSize, p + kNonceSize + 32, out.report_hash.begin());
  out.project_id.assign(reinterpret_cast<const char*>(p + kFixed), len);
  return out;
}

StatusOr<CMsg4> ServerProcessSMsg4(AttestationSession& session, const SMsg4& s_msg4,
                                   const AttestationSession& reverse,
                                   std::optional<Key128> sk_to_issue, RandomSource& rng) {
  if (session.role() != Role::kResponder || !session.established() || !session.own_report_) {
    return WrongState(session, "s_msg4");
  }
  if (session.issued_sk_) {
    return MakeError(ErrorCode::kProtocolError, "session key already issued");
  }
  BARBIE_ASSIGN_OR_RETURN(SMsg4Contents contents, OpenSMsg4(session, s_msg4));

  if (reverse.role() != Role::kChallenger || !reverse.established() ||
      !reverse.peer_identity() || !reverse.peer_dh_public()) {
    return session.Fail(MakeError(ErrorCode::kAttestationFailed,
                                  "reverse attestation of the client did not complete"));
  }
  if (!SecureEquals(*reverse.peer_dh_public(), s_msg4.client_msg1.g_a)) {
    return session.Fail(MakeError(ErrorCode::kMutualAttestationFailed,
                                  "reverse attestation is not the one announced in s_msg4"));
  }

  Bytes client_body = Concat(reverse.peer_identity()->Serialize(),
                             ClientBindingReportData(*reverse.peer_dh_public()));
  Digest expected = MutualReportHash(client_body, session.own_report_->SerializeBody());
  if (!SecureEquals(expected, contents.report_hash)) {
    return session.Fail(MakeError(ErrorCode::kMutualAttestationFailed,
                                  "report digest does not match the attested enclaves"));
  }

  Key128 issued = sk_to_issue ? *sk_to_issue : rng.Array<kKeySize>();
  BARBIE_ASSIGN_OR_RETURN(
      Bytes payload, crypto::AeadSeal(session.keys_->mk, Concat(contents.nonce, issued),
                                      CMsg4Aad(session.session_id()), rng));

  session.issued_sk_ = issued;
  session.peer_identity_ = *reverse.peer_identity();
  session.project_id_ = contents.project_id;
  session.nonce_ = contents.nonce;
  return CMsg4{session.session_id(), std::move(payload)};
}

StatusOr<Key128> ClientProcessCMsg4(AttestationSession& session, const CMsg4& c_msg4) {
  if (session.role() != Role::kChallenger || !session.established() || !session.nonce_) {
    return WrongState(session, "c_msg4");
  }
  if (c_msg4.session_id != session.session_id()) {
    return MakeError(ErrorCode::kUnknownSession, "c_msg4 names a different session");
  }
  auto plain = crypto::AeadOpen(session.keys_->mk, c_msg4.payload,
                                CMsg4Aad(session.session_id()));
  if (!plain.ok() || plain->size() != kNonceSize + kKeySize) {
    return session.Fail(MakeError(ErrorCode::kProtocolError, "c_msg4 payload does not decrypt"));
  }
  if (!SecureEquals(ByteSpan(plain->data(), kNonceSize), *session.nonce_)) {
    return session.Fail(
        MakeError(ErrorCode::kMutualAttestationFailed, "c_msg4 nonce does not match"));
  }
  Key128 sk;
  std::copy(plain->begin() + kNonceSize, plain->end(), sk.begin());
  session.issued_sk_ = sk;
  return sk;
}

}  // namespace barbie::attestation
