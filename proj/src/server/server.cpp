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

#include "barbie/server/server.h"

#include <httplib.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "barbie/attestation/wire.h"

namespace barbie::server {

using attestation::AttestationSession;
using attestation::Key128;
using kms::DataSession;
using kms::Origin;
using nlohmann::json;

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk:
      return 200;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kProtocolError:
    case ErrorCode::kBadCiphertext:
    case ErrorCode::kProvisioningFailed:
    case ErrorCode::kPolicyNotAllowed:
      return 400;
    case ErrorCode::kUnauthenticated:
      return 401;
    case ErrorCode::kReportRejected:
    case ErrorCode::kAttestationFailed:
    case ErrorCode::kHandshakeFailed:
    case ErrorCode::kBindingFailed:
    case ErrorCode::kIdentityRejected:
    case ErrorCode::kMutualAttestationFailed:
    case ErrorCode::kAccessDenied:
    case ErrorCode::kPermissionDenied:
      return 403;
    case ErrorCode::kUnknownSession:
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kKekExists:
    case ErrorCode::kExists:
    case ErrorCode::kBusy:
      return 409;
    case ErrorCode::kAttestationRequired:
      return 428;
    case ErrorCode::kKekMissing:
    case ErrorCode::kUnavailable:
      return 503;
    case ErrorCode::kTransportError:
      return 502;
    case ErrorCode::kUnsealDenied:
    case ErrorCode::kIntegrityViolation:
    case ErrorCode::kIoError:
    case ErrorCode::kInternal:
      return 500;
  }
  return 500;
}

namespace {

struct Reply {
  int status = 200;
  json body = json::object();
  std::string set_cookie;
};

Reply ErrorReply(const Status& st) {
  Reply r;
  r.status = HttpStatusFor(st.code());
  r.body = {{"error", std::string(ErrorCodeName(st.code()))}, {"message", st.message()}};
  return r;
}

Reply Ok(json body) {
  Reply r;
  r.body = std::move(body);
  return r;
}

Status BadRequest(std::string message) {
  return MakeError(ErrorCode::kInvalidArgument, std::move(message));
}

StatusOr<json> ParseBody(const httplib::Request& req) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return BadRequest("body must be a JSON object");
  return j;
}

StatusOr<std::string> StringField(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) {
    return BadRequest(std::string("missing string field ") + name);
  }
  return it->get<std::string>();
}

StatusOr<Bytes> Base64Field(const json& j, const char* name) {
  BARBIE_ASSIGN_OR_RETURN(std::string text, StringField(j, name));
  auto raw = Base64Decode(text);
  if (!raw.ok()) return BadRequest(std::string(name) + " is not base64");
  return std::move(raw).value();
}

int64_t SteadySeconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Principal {
  std::string project_id;
  bool admin = false;
};

// Mid-handshake state. Lives only in this process.
struct Handshake {
  explicit Handshake(AttestationSession s) : server(std::move(s)) {}
  std::mutex mu;
  std::atomic<int64_t> last_used{0};
  Principal principal;
  AttestationSession server;
  std::optional<attestation::SMsg4> s_msg4;
  std::optional<AttestationSession> reverse;
  std::optional<Key128> admin_sk;
};

}  // namespace

class Server::Impl {
 public:
  Impl(InstanceConfig config, enclave::EnclaveHandle enclave, std::vector<ByteArray<32>> authorities,
       std::unique_ptr<kms::TrustedCore> core, std::unique_ptr<kms::SecretCrypto> software,
       RandomSource& rng)
      : config_(std::move(config)),
        enclave_(std::move(enclave)),
        authorities_(std::move(authorities)),
        core_(std::move(core)),
        software_(std::move(software)),
        rng_(rng),
        v1_(store::Store::Open(config_.store_root).value(),
            software_ ? *software_ : static_cast<kms::SecretCrypto&>(*core_), rng_) {
    if (config_.request_log == "-") {
      log_stream_ = &std::cerr;
    } else if (!config_.request_log.empty()) {
      std::filesystem::create_directories(config_.request_log.parent_path());
      log_file_.open(config_.request_log, std::ios::app);
      log_stream_ = &log_file_;
    }
    // Stop() waits out idle keep-alive connections; keep that short.
    http_.set_keep_alive_timeout(1);
    Routes();
  }

  Status Bind() {
    int port = config_.port();
    if (port == 0) {
      port = http_.bind_to_any_port(config_.host());
      if (port < 0) return MakeError(ErrorCode::kIoError, "cannot bind " + config_.host());
    } else if (!http_.bind_to_port(config_.host(), port)) {
      return MakeError(ErrorCode::kIoError, "cannot bind " + config_.listen_address);
    }
    port_ = port;
    return OkStatus();
  }

  void Run() { http_.listen_after_bind(); }

  Status Start() {
    BARBIE_RETURN_IF_ERROR(Bind());
    thread_ = std::thread([this] { Run(); });
    http_.wait_until_ready();
    return OkStatus();
  }

  void Stop() {
    http_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  const InstanceConfig& config() const { return config_; }
  kms::TrustedCore& core() { return *core_; }
  void SetObserver(ExchangeObserver observer) { observer_ = std::move(observer); }

 private:
  using Handler = std::function<Reply(const httplib::Request&)>;

  void Routes() {
    http_.Get("/health", Wrap([this](const auto&) { return Health(); }));
    http_.Post("/v1/secrets", Wrap([this](const auto& r) { return V1Store(r); }));
    http_.Get(R"(/v1/secrets/([^/]+))", Wrap([this](const auto& r) { return V1Get(r); }));
    http_.Post("/v2/attest/start", Wrap([this](const auto& r) { return AttestStart(r); }));
    http_.Post("/v2/attest/msg2", Wrap([this](const auto& r) { return AttestMsg2(r); }));
    http_.Post("/v2/attest/msg4", Wrap([this](const auto& r) { return AttestMsg4(r); }));
    http_.Post("/v2/attest/ma_msg3", Wrap([this](const auto& r) { return AttestMaMsg3(r); }));
    http_.Post("/v2/kek", Wrap([this](const auto& r) { return ProvisionKek(r); }));
    http_.Post("/v2/policy", Wrap([this](const auto& r) { return SetPolicy(r); }));
    http_.Post("/v2/secrets", Wrap([this](const auto& r) { return V2Store(r); }));
    http_.Get(R"(/v2/secrets/([^/]+))", Wrap([this](const auto& r) { return V2Get(r); }));
  }

  httplib::Server::Handler Wrap(Handler handler) {
    return [this, handler = std::move(handler)](const httplib::Request& req,
                                                httplib::Response& res) {
      auto started = std::chrono::steady_clock::now();
      Reply reply;
      try {
        reply = handler(req);
      } catch (const std::exception& e) {
        reply = ErrorReply(MakeError(ErrorCode::kInternal, e.what()));
      }
      res.status = reply.status;
      if (!reply.set_cookie.empty()) res.set_header("Set-Cookie", reply.set_cookie);
      res.set_content(reply.body.dump(), "application/json");
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            started)
                      .count();
      Log(req, res, ms);
      if (observer_) {
        observer_({req.method, req.path, req.body, res.status, res.body, reply.set_cookie});
      }
    };
  }

  void Log(const httplib::Request& req, const httplib::Response& res, double ms) {
    if (!log_stream_) return;
    json line = {
        {"ts", std::chrono::duration<double>(
                   std::chrono::system_clock::now().time_since_epoch())
                   .count()},
        {"instance", config_.instance_id},
        {"method", req.method},
        {"path", req.path},
        {"status", res.status},
        {"duration_ms", ms},
        {"request_bytes", req.body.size()},
        {"response_bytes", res.body.size()},
    };
    std::lock_guard lock(log_mu_);
    *log_stream_ << line.dump() << '\n';
    log_stream_->flush();
  }

  StatusOr<Principal> Authenticate(const httplib::Request& req) const {
    std::string token = req.get_header_value(std::string(kAuthHeader));
    if (token.empty()) return MakeError(ErrorCode::kUnauthenticated, "missing X-Auth-Token");
    if (!config_.admin_token.empty() && token == config_.admin_token) {
      return Principal{"", true};
    }
    auto it = config_.keystone_tokens.find(token);
    if (it == config_.keystone_tokens.end()) {
      return MakeError(ErrorCode::kUnauthenticated, "unknown token");
    }
    return Principal{it->second, false};
  }

  Reply Health() {
    json j = {{"instance_id", config_.instance_id},
              {"kek_present", core_->kek_present()},
              {"kek_mode", std::string(kms::KekModeName(config_.kek_mode))},
              {"mr_enclave", HexEncode(enclave_.identity().mr_enclave)},
              {"mr_signer", HexEncode(enclave_.identity().mr_signer)},
              {"v1_backend", config_.v1_backend}};
    if (auto source = core_->kek_source()) {
      j["kek_source"] = std::string(kms::KekSourceName(*source));
    } else {
      j["kek_missing_reason"] = core_->kek_missing_reason();
    }
    return Ok(j);
  }

  // v1: plaintext over the wire, project from the token.
  Reply V1Store(const httplib::Request& req) {
    auto principal = Authenticate(req);
    if (!principal.ok()) return ErrorReply(principal.status());
    if (principal->admin) return ErrorReply(MakeError(ErrorCode::kPermissionDenied, "admin token"));
    auto body = ParseBody(req);
    if (!body.ok()) return ErrorReply(body.status());
    auto payload = Base64Field(*body, "payload");
    if (!payload.ok()) return ErrorReply(payload.status());
    auto ref = v1_.Store(req.get_header_value(std::string(kAuthHeader)), principal->project_id,
                         *payload, body->value("name", ""),
                         body->value("content_type", "application/octet-stream"));
    if (!ref.ok()) return ErrorReply(ref.status());
    return Ok({{"secret_ref", *ref}});
  }

  Reply V1Get(const httplib::Request& req) {
    auto principal = Authenticate(req);
    if (!principal.ok()) return ErrorReply(principal.status());
    if (principal->admin) return ErrorReply(MakeError(ErrorCode::kPermissionDenied, "admin token"));
    auto plain = v1_.Retrieve(principal->project_id, req.matches[1].str());
    if (!plain.ok()) return ErrorReply(plain.status());
    return Ok({{"payload", Base64Encode(*plain)}});
  }

  void PruneHandshakes() {
    int64_t cutoff = SteadySeconds() - config_.handshake_idle_seconds;
    std::lock_guard lock(handshakes_mu_);
    for (auto it = handshakes_.begin(); it != handshakes_.end();) {
      if (it->second->last_used.load() < cutoff) {
        it = handshakes_.erase(it);
      } else {
        ++it;
      }
    }
  }

  StatusOr<std::shared_ptr<Handshake>> FindHandshake(const std::string& id) {
    std::lock_guard lock(handshakes_mu_);
    auto it = handshakes_.find(id);
    if (it == handshakes_.end() ||
        it->second->last_used.load() < SteadySeconds() - config_.handshake_idle_seconds) {
      return MakeError(ErrorCode::kUnknownSession,
                       "no handshake " + id + " on instance " + config_.instance_id);
    }
    return it->second;
  }

  void DropHandshake(const std::string& id) {
    std::lock_guard lock(handshakes_mu_);
    handshakes_.erase(id);
  }

  // Runs `step` with the handshake named in the body locked. A handshake
  // whose step fails is discarded.
  template <typename Step>
  Reply WithHandshake(const httplib::Request& req, Step step) {
    auto body = ParseBody(req);
    if (!body.ok()) return ErrorReply(body.status());
    auto id = StringField(*body, "session_id");
    if (!id.ok()) return ErrorReply(id.status());
    auto hs = FindHandshake(*id);
    if (!hs.ok()) return ErrorReply(hs.status());
    std::unique_lock lock((*hs)->mu, std::try_to_lock);
    if (!lock.owns_lock()) {
      return ErrorReply(MakeError(ErrorCode::kBusy, "handshake step already in progress"));
    }
    (*hs)->last_used = SteadySeconds();
    StatusOr<Reply> reply = step(**hs, *body, *id);
    if (!reply.ok()) {
      DropHandshake(*id);
      return ErrorReply(reply.status());
    }
    return std::move(reply).value();
  }

  Reply AttestStart(const httplib::Request& req) {
    auto principal = Authenticate(req);
    if (!principal.ok()) return ErrorReply(principal.status());
    PruneHandshakes();
    auto [session, msg1] = attestation::ResponderStart(enclave_, rng_);
    std::string id = HexEncode(session.session_id());
    auto hs = std::make_shared<Handshake>(std::move(session));
    hs->principal = *principal;
    hs->last_used = SteadySeconds();
    {
      std::lock_guard lock(handshakes_mu_);
      handshakes_[id] = hs;
    }
    Reply r = Ok({{"session_id", id},
                  {"instance_id", config_.instance_id},
                  {"msg1", attestation::ToJson(msg1)}});
    r.set_cookie = std::string(kStickyCookie) + "=" + config_.instance_id + "; Path=/";
    return r;
  }

  Reply AttestMsg2(const httplib::Request& req) {
    return WithHandshake(req, [&](Handshake& hs, const json& body,
                                  const std::string&) -> StatusOr<Reply> {
      if (!body.contains("msg2")) return BadRequest("missing msg2");
      BARBIE_ASSIGN_OR_RETURN(attestation::Msg2 msg2, attestation::Msg2FromJson(body["msg2"]));
      BARBIE_ASSIGN_OR_RETURN(attestation::Msg3 msg3,
                              attestation::ResponderProcessMsg2(hs.server, msg2, enclave_));
      return Ok({{"msg3", attestation::ToJson(msg3)}});
    });
  }

  Reply AttestMsg4(const httplib::Request& req) {
    return WithHandshake(req, [&](Handshake& hs, const json& body,
                                  const std::string& id) -> StatusOr<Reply> {
      if (!body.contains("msg4")) return BadRequest("missing msg4");
      BARBIE_ASSIGN_OR_RETURN(attestation::Msg4 msg4, attestation::Msg4FromJson(body["msg4"]));
      BARBIE_RETURN_IF_ERROR(attestation::ResponderProcessMsg4(hs.server, msg4));

      if (!body.contains("s_msg4")) {
        Key128 sk = *hs.server.session_key();
        if (hs.principal.admin) {
          // Admin sessions only ever provision this instance's KEK.
          hs.admin_sk = sk;
          return Ok({{"status", "OK"}});
        }
        BARBIE_RETURN_IF_ERROR(core_->RecordRaProject(hs.principal.project_id, sk));
        BARBIE_RETURN_IF_ERROR(
            core_->OpenSession(id, hs.principal.project_id, Origin::kRa, sk, std::nullopt)
                .status());
        DropHandshake(id);
        return Ok({{"status", "OK"}});
      }

      if (hs.principal.admin) return BadRequest("admin sessions use RA only");
      BARBIE_ASSIGN_OR_RETURN(attestation::SMsg4 s_msg4,
                              attestation::SMsg4FromJson(body["s_msg4"]));
      BARBIE_ASSIGN_OR_RETURN(attestation::SMsg4Contents contents,
                              attestation::OpenSMsg4(hs.server, s_msg4));
      if (contents.project_id != hs.principal.project_id) {
        return kms::DenialStatus(kms::DenyReason::kProjectMismatch);
      }
      BARBIE_ASSIGN_OR_RETURN(auto reverse,
                              attestation::ChallengerProcessMsg1(s_msg4.client_msg1, rng_));
      hs.s_msg4 = std::move(s_msg4);
      hs.reverse.emplace(std::move(reverse.first));
      return Ok({{"status", "OK"}, {"msg2", attestation::ToJson(reverse.second)}});
    });
  }

  Reply AttestMaMsg3(const httplib::Request& req) {
    return WithHandshake(req, [&](Handshake& hs, const json& body,
                                  const std::string& id) -> StatusOr<Reply> {
      if (!hs.reverse || !hs.s_msg4) {
        return MakeError(ErrorCode::kProtocolError, "no reverse attestation in progress");
      }
      if (!body.contains("msg3")) return BadRequest("missing msg3");
      BARBIE_ASSIGN_OR_RETURN(attestation::Msg3 msg3, attestation::Msg3FromJson(body["msg3"]));
      attestation::ChallengeOutcome outcome =
          attestation::ChallengerProcessMsg3(*hs.reverse, msg3, authorities_);
      BARBIE_RETURN_IF_ERROR(outcome.status);
      const enclave::EnclaveIdentity& client = *hs.reverse->peer_identity();
      BARBIE_ASSIGN_OR_RETURN(kms::MutualKeyPlan plan,
                              core_->PlanMutualSessionKey(hs.principal.project_id, client));
      BARBIE_ASSIGN_OR_RETURN(
          attestation::CMsg4 c_msg4,
          attestation::ServerProcessSMsg4(hs.server, *hs.s_msg4, *hs.reverse, plan.key, rng_));
      BARBIE_RETURN_IF_ERROR(core_->CommitMutualSessionKey(plan));
      BARBIE_RETURN_IF_ERROR(
          core_->OpenSession(id, hs.principal.project_id, Origin::kMa, plan.key, client).status());
      DropHandshake(id);
      return Ok({{"msg4", attestation::ToJson(outcome.msg4)},
                 {"c_msg4", attestation::ToJson(c_msg4)}});
    });
  }

  Reply ProvisionKek(const httplib::Request& req) {
    auto body = ParseBody(req);
    if (!body.ok()) return ErrorReply(body.status());
    auto id = StringField(*body, "session_id");
    if (!id.ok()) return ErrorReply(id.status());
    auto sk_kek = Base64Field(*body, "sk_kek");
    if (!sk_kek.ok()) return ErrorReply(sk_kek.status());
    auto hs = FindHandshake(*id);
    if (!hs.ok()) {
      if (core_->LoadSession(*id).ok()) {
        return ErrorReply(MakeError(ErrorCode::kPermissionDenied, "not an admin session"));
      }
      return ErrorReply(hs.status());
    }
    std::unique_lock lock((*hs)->mu, std::try_to_lock);
    if (!lock.owns_lock()) return ErrorReply(MakeError(ErrorCode::kBusy, "session busy"));
    if (!(*hs)->principal.admin) {
      return ErrorReply(MakeError(ErrorCode::kPermissionDenied, "not an admin session"));
    }
    if (!(*hs)->admin_sk) {
      return ErrorReply(MakeError(ErrorCode::kProtocolError, "handshake not finished"));
    }
    (*hs)->last_used = SteadySeconds();
    Status st = core_->ProvisionKek(*sk_kek, *(*hs)->admin_sk, body->value("overwrite", false));
    if (!st.ok()) return ErrorReply(st);
    return Ok({{"status", "OK"}, {"kek_present", core_->kek_present()}});
  }

  StatusOr<DataSession> SessionFrom(std::string_view id) const {
    if (id.empty()) return BadRequest("missing session_id");
    return core_->LoadSession(id);
  }

  Reply SetPolicy(const httplib::Request& req) {
    auto body = ParseBody(req);
    if (!body.ok()) return ErrorReply(body.status());
    auto session = SessionFrom(body->value("session_id", ""));
    if (!session.ok()) return ErrorReply(session.status());
    if (!body->contains("policy") || !(*body)["policy"].is_number_integer()) {
      return ErrorReply(BadRequest("missing integer policy"));
    }
    std::vector<Digest> children;
    for (const auto& child : body->value("child_mrenclaves", json::array())) {
      if (!child.is_string()) return ErrorReply(BadRequest("child_mrenclaves must be hex"));
      auto raw = HexDecode(child.get<std::string>());
      if (!raw.ok() || raw->size() != 32) {
        return ErrorReply(BadRequest("child measurement must be 64 hex chars"));
      }
      children.push_back(ToArray<32>(*raw).value());
    }
    Status st = core_->SetPolicy(*session, (*body)["policy"].get<int>(), std::move(children));
    if (!st.ok()) return ErrorReply(st);
    return Ok({{"status", "OK"}});
  }

  Reply V2Store(const httplib::Request& req) {
    auto body = ParseBody(req);
    if (!body.ok()) return ErrorReply(body.status());
    auto session = SessionFrom(body->value("session_id", ""));
    if (!session.ok()) return ErrorReply(session.status());
    auto sk_secret = Base64Field(*body, "sk_secret");
    if (!sk_secret.ok()) return ErrorReply(sk_secret.status());
    auto ref = core_->StoreSecret(*session, *sk_secret, body->value("name", ""),
                                  body->value("content_type", "application/octet-stream"));
    if (!ref.ok()) return ErrorReply(ref.status());
    return Ok({{"secret_ref", *ref}});
  }

  Reply V2Get(const httplib::Request& req) {
    auto session = SessionFrom(req.get_param_value("session_id"));
    if (!session.ok()) return ErrorReply(session.status());
    auto sealed = core_->RetrieveSecret(*session, req.matches[1].str());
    if (!sealed.ok()) return ErrorReply(sealed.status());
    return Ok({{"sk_secret", Base64Encode(*sealed)}});
  }

  InstanceConfig config_;
  enclave::EnclaveHandle enclave_;
  std::vector<ByteArray<32>> authorities_;
  std::unique_ptr<kms::TrustedCore> core_;
  std::unique_ptr<kms::SecretCrypto> software_;
  RandomSource& rng_;
  kms::LegacySecrets v1_;

  httplib::Server http_;
  std::thread thread_;
  int port_ = -1;
  ExchangeObserver observer_;

  std::mutex handshakes_mu_;
  std::map<std::string, std::shared_ptr<Handshake>> handshakes_;

  std::mutex log_mu_;
  std::ofstream log_file_;
  std::ostream* log_stream_ = nullptr;
};

StatusOr<std::unique_ptr<Server>> Server::Create(InstanceConfig config, RandomSource& rng) {
  BARBIE_ASSIGN_OR_RETURN(enclave::EnclaveHandle enclave, LoadInstanceEnclave(config));
  std::vector<ByteArray<32>> authorities = {enclave.platform().authority_public_key()};
  for (const auto& file : config.trusted_authority_files) {
    BARBIE_ASSIGN_OR_RETURN(ByteArray<32> key, enclave::LoadAuthorityPublicKey(file));
    authorities.push_back(key);
  }
  BARBIE_ASSIGN_OR_RETURN(store::Store store, store::Store::Open(config.store_root));

  kms::CoreConfig core_config;
  core_config.kek_mode = config.kek_mode;
  core_config.sealed_kek_path = config.EffectiveSealedKekPath();
  core_config.per_project_keks = config.per_project_keks;
  core_config.session_ttl_seconds = config.session_ttl_seconds;
  auto core = std::make_unique<kms::TrustedCore>(enclave, std::move(store), core_config, rng);
  BARBIE_RETURN_IF_ERROR(core->Start());

  std::unique_ptr<kms::SecretCrypto> software;
  if (config.v1_backend == "simple_crypto") {
    BARBIE_ASSIGN_OR_RETURN(Bytes key, HexDecode(config.simple_crypto_key));
    BARBIE_ASSIGN_OR_RETURN(ByteArray<32> key32, ToArray<32>(key));
    software = std::make_unique<kms::SoftwareSecretCrypto>(key32, rng);
  }
  auto impl = std::make_unique<Impl>(std::move(config), std::move(enclave), std::move(authorities),
                                     std::move(core), std::move(software), rng);
  return std::unique_ptr<Server>(new Server(std::move(impl)));
}

Server::Server(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Server::~Server() { impl_->Stop(); }
Status Server::Bind() { return impl_->Bind(); }
void Server::Run() { impl_->Run(); }
Status Server::Start() { return impl_->Start(); }
void Server::Stop() { impl_->Stop(); }
int Server::port() const { return impl_->port(); }
std::string Server::base_url() const {
  return "http://" + impl_->config().host() + ":" + std::to_string(impl_->port());
}
const InstanceConfig& Server::config() const { return impl_->config(); }
kms::TrustedCore& Server::core() { return impl_->core(); }
void Server::SetObserver(ExchangeObserver observer) { impl_->SetObserver(std::move(observer)); }

}  // namespace barbie::server
