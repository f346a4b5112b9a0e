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

#ifndef BARBIE_ATTESTATION_PROTOCOL_H_
#define BARBIE_ATTESTATION_PROTOCOL_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "barbie/common/bytes.h"
#include "barbie/common/random.h"
#include "barbie/common/status.h"
#include "barbie/enclave/enclave_sim.h"

// Sigma-style remote attestation over X25519.
//
//   responder (enclave)                      challenger
//   ResponderStart            -- Msg1 -->
//                             <-- Msg2 --    ChallengerProcessMsg1
//   ResponderProcessMsg2      -- Msg3 -->    (quote over SHA-256(g_a||g_b||vk))
//                             <-- Msg4 --    ChallengerProcessMsg3
//   ResponderProcessMsg4
//
// Mutual attestation runs the same exchange a second time in the reverse
// direction, tied to the first by SMsg4/CMsg4 (nonce + report digest under
// mk). See ClientBuildSMsg4 and ServerProcessSMsg4.
namespace barbie::attestation {

inline constexpr size_t kSessionIdSize = 16;
inline constexpr size_t kKeySize = 16;
inline constexpr size_t kMacSize = 16;
inline constexpr size_t kNonceSize = 16;

using SessionId = ByteArray<kSessionIdSize>;
using Key128 = ByteArray<kKeySize>;
using Mac = ByteArray<kMacSize>;
using Nonce = ByteArray<kNonceSize>;

struct SessionKeys {
  Key128 smk{};  // handshake message integrity
  Key128 sk{};   // session key
  Key128 mk{};   // masks the mutual-attestation payloads
  Key128 vk{};   // bound into the responder's report_data

  friend bool operator==(const SessionKeys&, const SessionKeys&) = default;
};

// HKDF-SHA-256 over the shared secret (empty salt) with info labels
// "SMK", "SK", "MK", "VK"; 16 bytes each.
SessionKeys DeriveSessionKeys(ByteSpan shared_secret);

enum class Role { kChallenger, kResponder };

enum class SessionState {
  kStarted,
  kMsg1Sent,
  kMsg2Sent,
  kMsg3Sent,
  kEstablished,
  kFailed,
};

std::string_view SessionStateName(SessionState state);

enum class Msg4Status : uint8_t { kOk = 1, kRejected = 2 };

struct Msg1 {
  SessionId session_id{};
  Bytes g_a;
};

struct Msg2 {
  SessionId session_id{};
  Bytes g_b;
  Mac mac{};  // HMAC(smk, g_b || g_a)
};

struct Msg3 {
  SessionId session_id{};
  Bytes quote;  // serialized enclave::Quote
  Mac mac{};    // HMAC(smk, "msg3" || session_id || quote)
};

struct Msg4 {
  SessionId session_id{};
  Msg4Status status = Msg4Status::kRejected;
  Mac mac{};  // HMAC(smk, "msg4" || session_id || status)
};

struct SMsg4 {
  SessionId session_id{};
  // AEAD under mk of nonce(16) || SHA-256(client_body || server_body)(32) ||
  // u32 length || project_id.
  Bytes payload;
  Msg1 client_msg1;
};

struct CMsg4 {
  SessionId session_id{};
  Bytes payload;  // AEAD under mk of nonce(16) || sk(16)
};

// Decrypted SMsg4 payload.
struct SMsg4Contents {
  Nonce nonce{};
  Digest report_hash{};
  std::string project_id;
};

struct ChallengeOutcome;

class AttestationSession {
 public:
  AttestationSession(Role role, SessionId id, crypto::X25519KeyPair dh)
      : role_(role), session_id_(id), ephemeral_dh_(dh) {}

  Role role() const { return role_; }
  const SessionId& session_id() const { return session_id_; }
  SessionState state() const { return state_; }
  bool established() const { return state_ == SessionState::kEstablished; }
  const ByteArray<32>& own_dh_public() const { return ephemeral_dh_.public_key; }
  const std::optional<ByteArray<32>>& peer_dh_public() const { return peer_dh_public_; }
  const std::optional<SessionKeys>& keys() const { return keys_; }
  const std::optional<enclave::Report>& own_report() const { return own_report_; }
  const std::optional<enclave::Report>& peer_report() const { return peer_report_; }
  const std::optional<Nonce>& nonce() const { return nonce_; }
  const std::optional<std::string>& project_id() const { return project_id_; }
  const std::optional<enclave::EnclaveIdentity>& peer_identity() const {
    return peer_identity_;
  }

  // The key protecting application traffic: the server-issued key after a
  // mutual attestation, else the DH-derived sk. Empty until established.
  std::optional<Key128> session_key() const;

 private:
  friend std::pair<AttestationSession, Msg1> ResponderStart(const enclave::EnclaveHandle&,
                                                            RandomSource&);
  friend StatusOr<std::pair<AttestationSession, Msg2>> ChallengerProcessMsg1(const Msg1&,
                                                                            RandomSource&);
  friend StatusOr<Msg3> ResponderProcessMsg2(AttestationSession&, const Msg2&,
                                             const enclave::EnclaveHandle&);
  friend ChallengeOutcome ChallengerProcessMsg3(
      AttestationSession&, const Msg3&, std::span<const ByteArray<32>>,
      const std::function<bool(const enclave::EnclaveIdentity&)>&);
  friend Status ResponderProcessMsg4(AttestationSession&, const Msg4&);
  friend StatusOr<std::pair<SMsg4, AttestationSession>> ClientBuildSMsg4(
      AttestationSession&, const enclave::EnclaveHandle&, std::string_view, RandomSource&);
  friend StatusOr<CMsg4> ServerProcessSMsg4(AttestationSession&, const SMsg4&,
                                            const AttestationSession&,
                                            std::optional<Key128>, RandomSource&);
  friend StatusOr<Key128> ClientProcessCMsg4(AttestationSession&, const CMsg4&);

  Status Fail(Status status) {
    state_ = SessionState::kFailed;
    return status;
  }

  Role role_;
  SessionId session_id_;
  crypto::X25519KeyPair ephemeral_dh_;
  SessionState state_ = SessionState::kStarted;
  std::optional<ByteArray<32>> peer_dh_public_;
  std::optional<SessionKeys> keys_;
  std::optional<enclave::Report> own_report_;
  std::optional<enclave::Report> peer_report_;
  std::optional<Nonce> nonce_;
  std::optional<std::string> project_id_;
  std::optional<enclave::EnclaveIdentity> peer_identity_;
  std::optional<Key128> issued_sk_;
};

using IdentityPredicate = std::function<bool(const enclave::EnclaveIdentity&)>;

// Common predicate shape: every field that is set must match exactly, and
// isv_svn must be at least min_isv_svn.
struct IdentityExpectation {
  std::optional<Digest> mr_enclave;
  std::optional<Digest> mr_signer;
  std::optional<uint16_t> min_isv_svn;

  IdentityPredicate AsPredicate() const;
};

std::pair<AttestationSession, Msg1> ResponderStart(const enclave::EnclaveHandle& enclave,
                                                   RandomSource& rng = DefaultRandom());

StatusOr<std::pair<AttestationSession, Msg2>> ChallengerProcessMsg1(
    const Msg1& msg1, RandomSource& rng = DefaultRandom());

StatusOr<Msg3> ResponderProcessMsg2(AttestationSession& session, const Msg2& msg2,
                                    const enclave::EnclaveHandle& enclave);

struct ChallengeOutcome {
  Msg4 msg4;
  Status status;  // ok iff msg4.status == kOk
};

// Verifies the quote against any of `authority_keys`, the report_data
// binding, then the optional predicate. Never leaves the session half-done:
// either ESTABLISHED with an OK Msg4 or FAILED with a REJECTED one.
ChallengeOutcome ChallengerProcessMsg3(AttestationSession& session, const Msg3& msg3,
                                       std::span<const ByteArray<32>> authority_keys,
                                       const IdentityPredicate& expected_identity = {});

Status ResponderProcessMsg4(AttestationSession& session, const Msg4& msg4);

// Client side of mutual attestation, after the forward RA is established.
// Returns SMsg4 plus the client's responder session for the reverse RA,
// whose Msg1 rides inside the SMsg4.
StatusOr<std::pair<SMsg4, AttestationSession>> ClientBuildSMsg4(
    AttestationSession& session, const enclave::EnclaveHandle& client_enclave,
    std::string_view project_id, RandomSource& rng = DefaultRandom());

// Decrypts an SMsg4 without changing session state.
StatusOr<SMsg4Contents> OpenSMsg4(const AttestationSession& session, const SMsg4& s_msg4);

// Server side: `reverse` is the server's challenger session against the
// client enclave and must be ESTABLISHED. Issues `sk_to_issue` when given,
// else a fresh random key.
StatusOr<CMsg4> ServerProcessSMsg4(AttestationSession& session, const SMsg4& s_msg4,
                                   const AttestationSession& reverse,
                                   std::optional<Key128> sk_to_issue = std::nullopt,
                                   RandomSource& rng = DefaultRandom());

StatusOr<Key128> ClientProcessCMsg4(AttestationSession& session, const CMsg4& c_msg4);

// SHA-256(g_a) zero-padded to 64 bytes: the report_data of the client report
// named in SMsg4, fixed before the reverse exchange starts.
enclave::ReportData ClientBindingReportData(ByteSpan client_g_a);

// SHA-256(client_report_body || server_report_body). Bodies exclude the
// platform-local MAC so both ends can compute them.
Digest MutualReportHash(ByteSpan client_report_body, ByteSpan server_report_body);

// Raw HMAC used for Msg2 (exposed for cross-checks in tests).
Mac ComputeMsg2Mac(const Key128& smk, ByteSpan g_b, ByteSpan g_a);

// report_data expected in the responder's quote.
enclave::ReportData BindingReportData(ByteSpan g_a, ByteSpan g_b, const Key128& vk);

}  // namespace barbie::attestation

#endif  // BARBIE_ATTESTATION_PROTOCOL_H_
