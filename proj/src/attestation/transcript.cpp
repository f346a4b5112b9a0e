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

#include "barbie/attestation/transcript.h"

#include <algorithm>
#include <deque>
#include <memory>

#include "barbie/attestation/protocol.h"
#include "barbie/attestation/wire.h"
#include "barbie/crypto/crypto.h"

namespace barbie::attestation {

using nlohmann::json;

namespace {

constexpr uint64_t kResponderStream = 0x5245535000000000ULL;
constexpr uint64_t kChallengerStream = 0x4348414c00000000ULL;

// Records every draw from the wrapped source, in order.
class RecordingRandom final : public RandomSource {
 public:
  explicit RecordingRandom(RandomSource& inner) : inner_(inner) {}
  void Fill(std::span<uint8_t> out) override {
    inner_.Fill(out);
    draws_.emplace_back(out.begin(), out.end());
  }
  const std::vector<Bytes>& draws() const { return draws_; }

 private:
  RandomSource& inner_;
  std::vector<Bytes> draws_;
};

// Hands out the given byte strings, each to the first draw of its length.
// Draw order inside one expression is unspecified, so lengths must differ.
class ReplayRandom final : public RandomSource {
 public:
  explicit ReplayRandom(std::deque<Bytes> draws) : draws_(std::move(draws)) {}
  void Fill(std::span<uint8_t> out) override {
    auto it = std::find_if(draws_.begin(), draws_.end(),
                           [&](const Bytes& d) { return d.size() == out.size(); });
    if (it == draws_.end()) {
      exhausted_ = true;
      std::fill(out.begin(), out.end(), 0);
      return;
    }
    std::copy(it->begin(), it->end(), out.begin());
    draws_.erase(it);
  }
  bool exhausted() const { return exhausted_; }

 private:
  std::deque<Bytes> draws_;
  bool exhausted_ = false;
};

Status Mismatch(std::string_view what) {
  return MakeError(ErrorCode::kIntegrityViolation, "transcript " + std::string(what) + " mismatch");
}

StatusOr<Bytes> B64Field(const json& j, std::string_view key) {
  if (!j.contains(key) || !j[std::string(key)].is_string()) {
    return MakeError(ErrorCode::kProtocolError, "transcript lacks " + std::string(key));
  }
  return Base64Decode(j[std::string(key)].get<std::string>());
}

template <size_t N>
StatusOr<ByteArray<N>> B64Array(const json& j, std::string_view key) {
  BARBIE_ASSIGN_OR_RETURN(Bytes bytes, B64Field(j, key));
  return ToArray<N>(bytes);
}

StatusOr<enclave::EnclaveHandle> ServerEnclave(const json& server,
                                               std::shared_ptr<const enclave::PlatformState> p) {
  std::string manifest = server.value("manifest", "");
  std::string signer = server.value("signer_key", "");
  uint16_t svn = server.value("isv_svn", uint16_t{1});
  return enclave::LoadEnclave(AsBytes(manifest), AsBytes(signer), svn, std::move(p));
}

}  // namespace

StatusOr<json> GenerateTranscript(uint64_t seed, std::string_view manifest,
                                  std::string_view signer_key, uint16_t isv_svn) {
  SeededRandom platform_rng(seed);
  auto platform =
      std::make_shared<const enclave::PlatformState>(enclave::PlatformState::Generate(platform_rng));
  BARBIE_ASSIGN_OR_RETURN(enclave::EnclaveHandle server,
                          enclave::LoadEnclave(AsBytes(manifest), AsBytes(signer_key), isv_svn,
                                               platform));

  SeededRandom responder_seeded(seed ^ kResponderStream);
  SeededRandom challenger_seeded(seed ^ kChallengerStream);
  RecordingRandom responder_rng(responder_seeded);
  RecordingRandom challenger_rng(challenger_seeded);

  auto [responder, msg1] = ResponderStart(server, responder_rng);
  BARBIE_ASSIGN_OR_RETURN(auto challenger_and_msg2, ChallengerProcessMsg1(msg1, challenger_rng));
  auto& [challenger, msg2] = challenger_and_msg2;
  BARBIE_ASSIGN_OR_RETURN(Msg3 msg3, ResponderProcessMsg2(responder, msg2, server));
  std::vector<ByteArray<32>> authorities{platform->authority_public_key()};
  IdentityExpectation expect{server.identity().mr_enclave, server.identity().mr_signer,
                             std::nullopt};
  ChallengeOutcome outcome = ChallengerProcessMsg3(challenger, msg3, authorities,
                                                   expect.AsPredicate());
  BARBIE_RETURN_IF_ERROR(outcome.status);
  BARBIE_RETURN_IF_ERROR(ResponderProcessMsg4(responder, outcome.msg4));
  // The responder draws its session id (16 bytes) and private key (32).
  const auto& rdraws = responder_rng.draws();
  if (rdraws.size() != 2 || challenger_rng.draws().size() != 1) {
    return MakeError(ErrorCode::kInternal, "unexpected randomness use in the handshake");
  }
  const Bytes& responder_priv = rdraws[0].size() == 32 ? rdraws[0] : rdraws[1];
  BARBIE_ASSIGN_OR_RETURN(ByteArray<32> challenger_priv, ToArray<32>(challenger_rng.draws()[0]));
  BARBIE_ASSIGN_OR_RETURN(auto shared, crypto::X25519SharedSecret(challenger_priv, msg1.g_a));
  SessionKeys keys = DeriveSessionKeys(shared);
  if (!challenger.keys() || !responder.keys() || *challenger.keys() != keys ||
      *responder.keys() != keys) {
    return MakeError(ErrorCode::kInternal, "handshake ends disagree");
  }

  return json{
      {"version", kTranscriptVersion},
      {"seed", seed},
      {"server",
       {{"manifest", std::string(manifest)},
        {"signer_key", std::string(signer_key)},
        {"isv_svn", isv_svn},
        {"mr_enclave", HexEncode(server.identity().mr_enclave)},
        {"mr_signer", HexEncode(server.identity().mr_signer)}}},
      {"authority_public_key", Base64Encode(platform->authority_public_key())},
      {"session_id_hex", HexEncode(msg1.session_id)},
      {"responder_private_key", Base64Encode(responder_priv)},
      {"challenger_private_key", Base64Encode(challenger_priv)},
      {"messages",
       {{"msg1", ToJson(msg1)},
        {"msg2", ToJson(msg2)},
        {"msg3", ToJson(msg3)},
        {"msg4", ToJson(outcome.msg4)}}},
      {"keys",
       {{"smk", Base64Encode(keys.smk)},
        {"sk", Base64Encode(keys.sk)},
        {"mk", Base64Encode(keys.mk)},
        {"vk", Base64Encode(keys.vk)}}},
  };
}

Status VerifyTranscript(const json& t) {
  if (!t.is_object() || t.value("version", 0) != kTranscriptVersion) {
    return MakeError(ErrorCode::kProtocolError, "unsupported transcript version");
  }
  if (!t.contains("messages") || !t.contains("server") || !t.contains("keys")) {
    return MakeError(ErrorCode::kProtocolError, "transcript is missing sections");
  }
  const json& m = t["messages"];
  BARBIE_ASSIGN_OR_RETURN(Msg1 msg1, Msg1FromJson(m.value("msg1", json())));
  BARBIE_ASSIGN_OR_RETURN(Msg2 msg2, Msg2FromJson(m.value("msg2", json())));
  BARBIE_ASSIGN_OR_RETURN(Msg3 msg3, Msg3FromJson(m.value("msg3", json())));
  BARBIE_ASSIGN_OR_RETURN(Msg4 msg4, Msg4FromJson(m.value("msg4", json())));
  if (ToJson(msg1).dump() != m["msg1"].dump()) return Mismatch("msg1 encoding");
  if (ToJson(msg2).dump() != m["msg2"].dump()) return Mismatch("msg2 encoding");
  if (ToJson(msg3).dump() != m["msg3"].dump()) return Mismatch("msg3 encoding");
  if (ToJson(msg4).dump() != m["msg4"].dump()) return Mismatch("msg4 encoding");
  if (t.value("session_id_hex", "") != HexEncode(msg1.session_id)) return Mismatch("session id");

  // Challenger side.
  BARBIE_ASSIGN_OR_RETURN(auto challenger_priv, B64Array<32>(t, "challenger_private_key"));
  BARBIE_ASSIGN_OR_RETURN(auto responder_priv, B64Array<32>(t, "responder_private_key"));
  if (!SecureEquals(crypto::X25519FromPrivate(challenger_priv).public_key, msg2.g_b)) {
    return Mismatch("challenger public key");
  }
  if (!SecureEquals(crypto::X25519FromPrivate(responder_priv).public_key, msg1.g_a)) {
    return Mismatch("responder public key");
  }
  BARBIE_ASSIGN_OR_RETURN(auto shared, crypto::X25519SharedSecret(challenger_priv, msg1.g_a));
  SessionKeys keys = DeriveSessionKeys(shared);
  const json& k = t["keys"];
  BARBIE_ASSIGN_OR_RETURN(auto smk, B64Array<16>(k, "smk"));
  BARBIE_ASSIGN_OR_RETURN(auto sk, B64Array<16>(k, "sk"));
  BARBIE_ASSIGN_OR_RETURN(auto mk, B64Array<16>(k, "mk"));
  BARBIE_ASSIGN_OR_RETURN(auto vk, B64Array<16>(k, "vk"));
  if (keys != SessionKeys{smk, sk, mk, vk}) return Mismatch("derived keys");
  if (ComputeMsg2Mac(keys.smk, msg2.g_b, msg1.g_a) != msg2.mac) return Mismatch("msg2 mac");

  BARBIE_ASSIGN_OR_RETURN(auto authority, B64Array<32>(t, "authority_public_key"));
  BARBIE_ASSIGN_OR_RETURN(enclave::Quote quote, enclave::Quote::Parse(msg3.quote));
  BARBIE_ASSIGN_OR_RETURN(enclave::EnclaveIdentity identity,
                          enclave::VerifyQuote(quote, authority));
  const json& server = t["server"];
  if (HexEncode(identity.mr_enclave) != server.value("mr_enclave", "") ||
      HexEncode(identity.mr_signer) != server.value("mr_signer", "")) {
    return Mismatch("server identity");
  }
  if (quote.report.report_data != BindingReportData(msg1.g_a, msg2.g_b, keys.vk)) {
    return Mismatch("report binding");
  }

  // The challenger, replayed from its private key, must accept Msg3 and
  // produce the recorded Msg4.
  {
    ReplayRandom replay({Bytes(challenger_priv.begin(), challenger_priv.end())});
    BARBIE_ASSIGN_OR_RETURN(auto replayed, ChallengerProcessMsg1(msg1, replay));
    auto& [challenger, replayed_msg2] = replayed;
    if (ToJson(replayed_msg2).dump() != m["msg2"].dump()) return Mismatch("replayed msg2");
    std::vector<ByteArray<32>> authorities{authority};
    ChallengeOutcome outcome = ChallengerProcessMsg3(challenger, msg3, authorities);
    BARBIE_RETURN_IF_ERROR(outcome.status);
    if (ToJson(outcome.msg4).dump() != m["msg4"].dump()) return Mismatch("replayed msg4");
  }

  // The responder, replayed from the seeded platform and its private key,
  // must reproduce Msg3 and accept Msg4.
  {
    SeededRandom platform_rng(t.value("seed", uint64_t{0}));
    auto platform = std::make_shared<const enclave::PlatformState>(
        enclave::PlatformState::Generate(platform_rng));
    if (platform->authority_public_key() != authority) return Mismatch("platform authority");
    BARBIE_ASSIGN_OR_RETURN(enclave::EnclaveHandle enclave, ServerEnclave(server, platform));
    ReplayRandom replay({Bytes(msg1.session_id.begin(), msg1.session_id.end()),
                         Bytes(responder_priv.begin(), responder_priv.end())});
    auto [responder, replayed_msg1] = ResponderStart(enclave, replay);
    if (replay.exhausted() || ToJson(replayed_msg1).dump() != m["msg1"].dump()) {
      return Mismatch("replayed msg1");
    }
    BARBIE_ASSIGN_OR_RETURN(Msg3 replayed_msg3, ResponderProcessMsg2(responder, msg2, enclave));
    if (ToJson(replayed_msg3).dump() != m["msg3"].dump()) return Mismatch("replayed msg3");
    BARBIE_RETURN_IF_ERROR(ResponderProcessMsg4(responder, msg4));
    if (!responder.keys() || responder.keys()->sk != sk) return Mismatch("responder sk");
  }
  return OkStatus();
}

}  // namespace barbie::attestation
