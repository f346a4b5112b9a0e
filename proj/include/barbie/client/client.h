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

#ifndef BARBIE_CLIENT_CLIENT_H_
#define BARBIE_CLIENT_CLIENT_H_

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "barbie/attestation/protocol.h"
#include "barbie/client/transport.h"
#include "barbie/kms/kek.h"

namespace barbie::client {

using attestation::Key128;

// LEGACY speaks v1 only. AWARE and ADMIN attest the server with RA. ENABLED
// runs mutual attestation from a local enclave.
enum class Mode { kLegacy, kAware, kEnabled, kAdmin };

std::string_view ModeName(Mode mode);
StatusOr<Mode> ModeFromName(std::string_view name);

struct ClientProfile {
  Mode mode = Mode::kLegacy;
  std::string token;
  std::string project_id;  // required for ENABLED
  attestation::IdentityExpectation expected_server;
  std::vector<ByteArray<32>> authority_keys;
  std::optional<enclave::EnclaveHandle> local_enclave;  // ENABLED only
};

struct Acl {
  int policy = 3;
  std::vector<Digest> child_mrenclaves;
};

struct ClientSession {
  std::string session_id;  // hex
  Key128 sk{};
  Mode mode = Mode::kAware;
  std::string node;  // sticky cookie value seen on attest/start
};

// CLI exit status for an error: 0 ok, 2 protocol or attestation failure,
// 3 access denied, 4 transport error, 1 anything else.
int ExitCodeFor(ErrorCode code);

// 64 hex characters.
StatusOr<kms::Kek> ParseKekHex(std::string_view hex);

// One handshake at a time per Client; established sessions may be used from
// several threads.
class Client {
 public:
  Client(ClientProfile profile, Transport& transport, RandomSource& rng = DefaultRandom());

  StatusOr<std::string> LegacyStore(std::string_view name, ByteSpan plaintext,
                                    std::string_view content_type = "text/plain");
  StatusOr<Bytes> LegacyGet(std::string_view ref);

  // The sticky cookie from attest/start is replayed on every later
  // handshake request and on KEK provisioning.
  StatusOr<ClientSession> Attest();

  Status SetPolicy(const ClientSession& session, const Acl& acl);
  // Sets `acl` first when given. Only SK-encrypted bytes leave the client.
  StatusOr<std::string> StoreSecret(const ClientSession& session, std::string_view name,
                                    ByteSpan plaintext,
                                    std::string_view content_type = "text/plain",
                                    const std::optional<Acl>& acl = std::nullopt);
  StatusOr<Bytes> GetSecret(const ClientSession& session, std::string_view ref);

  Status ProvisionKek(const ClientSession& session, std::string_view kek_hex,
                      bool overwrite = false);

  const ClientProfile& profile() const { return profile_; }
  CookieJar& cookies() { return cookies_; }

 private:
  StatusOr<nlohmann::json> Post(std::string_view path, const nlohmann::json& body,
                                bool sticky);
  StatusOr<nlohmann::json> Get(std::string_view path, bool sticky);
  StatusOr<nlohmann::json> Send(HttpRequest request, bool sticky);
  StatusOr<ClientSession> AttestRa(const std::string& session_id,
                                   attestation::AttestationSession& challenger,
                                   const attestation::Msg4& msg4);
  StatusOr<ClientSession> AttestMa(const std::string& session_id,
                                   attestation::AttestationSession& challenger,
                                   const attestation::Msg4& msg4);

  ClientProfile profile_;
  Transport& transport_;
  RandomSource& rng_;
  CookieJar cookies_;
};

}  // namespace barbie::client

#endif  // BARBIE_CLIENT_CLIENT_H_
