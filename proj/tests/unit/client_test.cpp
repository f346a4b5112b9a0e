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

#include <gtest/gtest.h>

#include <functional>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "support/deployment.h"

namespace barbie::client {
namespace {

using nlohmann::json;
using testing::Deployment;
using testing::kAdminToken;
using testing::kAlphaToken;

// Forwards to a real transport, recording traffic and letting a test rewrite
// request or response bodies per path.
class InterceptingTransport final : public Transport {
 public:
  using Rewrite = std::function<void(json&)>;
  explicit InterceptingTransport(Transport& inner) : inner_(inner) {}

  StatusOr<HttpResponse> Send(const HttpRequest& request) override {
    HttpRequest sent = request;
    if (auto it = request_rewrites_.find(request.path); it != request_rewrites_.end()) {
      json body = json::parse(sent.body);
      it->second(body);
      sent.body = body.dump();
    }
    {
      std::lock_guard lock(mu_);
      requests_.push_back(sent);
    }
    BARBIE_ASSIGN_OR_RETURN(HttpResponse response, inner_.Send(sent));
    if (auto it = response_rewrites_.find(request.path); it != response_rewrites_.end()) {
      json body = json::parse(response.body);
      it->second(body);
      response.body = body.dump();
    }
    return response;
  }

  void RewriteRequest(const std::string& path, Rewrite f) { request_rewrites_[path] = f; }
  void RewriteResponse(const std::string& path, Rewrite f) { response_rewrites_[path] = f; }
  std::vector<HttpRequest> requests() {
    std::lock_guard lock(mu_);
    return requests_;
  }

 private:
  Transport& inner_;
  std::map<std::string, Rewrite> request_rewrites_;
  std::map<std::string, Rewrite> response_rewrites_;
  std::mutex mu_;
  std::vector<HttpRequest> requests_;
};

void FlipBase64(json& field, size_t index = 0) {
  Bytes raw = Base64Decode(field.get<std::string>()).value();
  raw[index % raw.size()] ^= 0x40;
  field = Base64Encode(raw);
}

bool AnyRequestTo(const std::vector<HttpRequest>& requests, std::string_view path) {
  for (const auto& r : requests) {
    if (r.path.rfind(path, 0) == 0) return true;
  }
  return false;
}

class ClientTest : public ::testing::Test {
 protected:
  ClientTest() : d_("client"), server_(d_.Launch(d_.Config("n0"))), http_(server_->base_url()) {}

  ClientProfile Enabled(std::string_view manifest, uint16_t svn = 3) {
    ClientProfile p = d_.Profile(Mode::kEnabled, kAlphaToken, "alpha");
    p.local_enclave = d_.LocalEnclave(manifest, "openstack", svn);
    return p;
  }

  Deployment d_;
  std::unique_ptr<server::Server> server_;
  HttpTransport http_;
};

TEST(ClientUnitTest, ModesAndExitCodes) {
  EXPECT_EQ(ModeFromName("enabled").value(), Mode::kEnabled);
  EXPECT_FALSE(ModeFromName("sgx").ok());
  EXPECT_EQ(ExitCodeFor(ErrorCode::kOk), 0);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kIdentityRejected), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kMutualAttestationFailed), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kAccessDenied), 3);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kTransportError), 4);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kNotFound), 1);
}

TEST(ClientUnitTest, KekHexValidation) {
  EXPECT_TRUE(ParseKekHex(std::string(64, 'A')).ok());
  EXPECT_EQ(ParseKekHex("abcd").status().code(), ErrorCode::kInvalidArgument);
  EXPECT_EQ(ParseKekHex(std::string(63, 'a') + "g").status().code(),
            ErrorCode::kInvalidArgument);
}

TEST(ClientUnitTest, CookieJarKeepsNameValuePairs) {
  CookieJar jar;
  HttpResponse r;
  r.headers["set-cookie"] = "barbie_node=n3; Path=/; HttpOnly";
  jar.Absorb(r);
  EXPECT_EQ(jar.Get("barbie_node"), "n3");
  r.headers["set-cookie"] = "=broken";
  jar.Absorb(r);
  jar.Set("other", "1");
  EXPECT_EQ(jar.HeaderValue(), "barbie_node=n3; other=1");
  jar.Clear();
  EXPECT_EQ(jar.HeaderValue(), "");
}

TEST(ClientUnitTest, TransportErrorWhenNothingListens) {
  HttpTransport t("http://127.0.0.1:1", 1);
  Deployment d("no-server");
  Client c(d.Profile(Mode::kLegacy, kAlphaToken), t);
  EXPECT_EQ(c.LegacyStore("n", AsBytes("x")).status().code(), ErrorCode::kTransportError);
}

TEST_F(ClientTest, ModeGuards) {
  Client legacy(d_.Profile(Mode::kLegacy, kAlphaToken), http_);
  EXPECT_EQ(legacy.Attest().status().code(), ErrorCode::kInvalidArgument);
  Client aware(d_.Profile(Mode::kAware, kAlphaToken), http_);
  EXPECT_EQ(aware.LegacyStore("n", AsBytes("x")).status().code(), ErrorCode::kInvalidArgument);
  auto s = aware.Attest().value();
  EXPECT_EQ(aware.ProvisionKek(s, std::string(64, 'a')).code(), ErrorCode::kInvalidArgument);
  ClientProfile no_enclave = d_.Profile(Mode::kEnabled, kAlphaToken, "alpha");
  EXPECT_EQ(Client(no_enclave, http_).Attest().status().code(), ErrorCode::kInvalidArgument);
}

TEST_F(ClientTest, AwareRoundTripSendsOnlyCiphertext) {
  InterceptingTransport spy(http_);
  Client c(d_.Profile(Mode::kAware, kAlphaToken), spy);
  auto session = c.Attest().value();
  std::string ref = c.StoreSecret(session, "pw", AsBytes("correct horse battery")).value();
  EXPECT_EQ(ToString(c.GetSecret(session, ref).value()), "correct horse battery");
  for (const auto& r : spy.requests()) {
    EXPECT_EQ(r.body.find("correct horse"), std::string::npos) << r.path;
    EXPECT_EQ(r.body.find(Base64Encode(AsBytes("correct horse battery"))), std::string::npos);
  }
}

TEST_F(ClientTest, StickyCookieReplayedOnHandshakeOnly) {
  InterceptingTransport spy(http_);
  ClientProfile p = Enabled("cinder");
  Client enabled(p, spy);
  auto session = enabled.Attest().value();
  enabled.StoreSecret(session, "n", AsBytes("v")).value();
  for (const auto& r : spy.requests()) {
    bool handshake = r.path.rfind("/v2/attest/", 0) == 0 && r.path != "/v2/attest/start";
    auto cookie = r.headers.find("Cookie");
    if (handshake) {
      ASSERT_NE(cookie, r.headers.end()) << r.path;
      EXPECT_EQ(cookie->second, "barbie_node=n0");
    } else {
      EXPECT_EQ(cookie, r.headers.end()) << r.path;
    }
  }
}

TEST_F(ClientTest, PinnedWrongMeasurementIsRejectedBeforeAnySecret) {
  InterceptingTransport spy(http_);
  ClientProfile p = d_.Profile(Mode::kAware, kAlphaToken);
  p.expected_server.mr_enclave = crypto::Sha256(AsBytes("some other enclave"));
  Client c(p, spy);
  auto session = c.Attest();
  EXPECT_EQ(session.status().code(), ErrorCode::kIdentityRejected);
  EXPECT_FALSE(AnyRequestTo(spy.requests(), "/v2/secrets"));
}

TEST_F(ClientTest, ForeignQuotingAuthorityIsRejected) {
  ClientProfile p = d_.Profile(Mode::kAware, kAlphaToken);
  SeededRandom rng(404);
  p.authority_keys = {enclave::PlatformState::Generate(rng).authority_public_key()};
  EXPECT_EQ(Client(p, http_).Attest().status().code(), ErrorCode::kAttestationFailed);
}

// Attest, then store only if attestation succeeded.
void AttestThenStore(Client& c) {
  auto session = c.Attest();
  if (session.ok()) (void)c.StoreSecret(*session, "n", AsBytes("must-not-leak"));
}

TEST_F(ClientTest, EnabledClientAbortsOnEveryInjectedMaFailure) {
  struct Injection {
    std::string name;
    std::function<void(InterceptingTransport&)> apply;
  };
  std::vector<Injection> injections = {
      {"msg2", [](auto& t) {
         t.RewriteRequest("/v2/attest/msg2", [](json& b) { FlipBase64(b["msg2"]["mac"]); });
       }},
      {"msg2-g_b", [](auto& t) {
         t.RewriteRequest("/v2/attest/msg2", [](json& b) { FlipBase64(b["msg2"]["g_b"], 5); });
       }},
      {"msg3", [](auto& t) {
         t.RewriteResponse("/v2/attest/msg2", [](json& b) { FlipBase64(b["msg3"]["quote"], 9); });
       }},
      {"msg3-mac", [](auto& t) {
         t.RewriteResponse("/v2/attest/msg2", [](json& b) { FlipBase64(b["msg3"]["mac"]); });
       }},
      {"s_msg4", [](auto& t) {
         t.RewriteRequest("/v2/attest/msg4",
                          [](json& b) { FlipBase64(b["s_msg4"]["payload"], 20); });
       }},
      {"s_msg4-client_msg1", [](auto& t) {
         t.RewriteRequest("/v2/attest/msg4",
                          [](json& b) { FlipBase64(b["s_msg4"]["client_msg1"]["g_a"], 3); });
       }},
      {"reverse-msg2", [](auto& t) {
         t.RewriteResponse("/v2/attest/msg4", [](json& b) { FlipBase64(b["msg2"]["mac"]); });
       }},
      {"reverse-msg3", [](auto& t) {
         t.RewriteRequest("/v2/attest/ma_msg3",
                          [](json& b) { FlipBase64(b["msg3"]["quote"], 100); });
       }},
      {"c_msg4", [](auto& t) {
         t.RewriteResponse("/v2/attest/ma_msg3",
                           [](json& b) { FlipBase64(b["c_msg4"]["payload"], 7); });
       }},
  };
  for (const auto& injection : injections) {
    InterceptingTransport spy(http_);
    injection.apply(spy);
    Client c(Enabled("cinder"), spy);
    auto session = c.Attest();
    EXPECT_FALSE(session.ok()) << injection.name;
    EXPECT_NE(ExitCodeFor(session.status().code()), 0);
    AttestThenStore(c);
    EXPECT_FALSE(AnyRequestTo(spy.requests(), "/v2/secrets")) << injection.name;
    for (const auto& r : spy.requests()) {
      EXPECT_EQ(r.body.find("must-not-leak"), std::string::npos);
    }
  }
}

TEST_F(ClientTest, MultiUserDistribution) {
  ClientProfile owner_p = Enabled("cinder");
  ClientProfile child_p = Enabled("nova");
  ClientProfile old_child_p = Enabled("nova", 2);
  ClientProfile stranger_p = Enabled("glance");
  Client owner(owner_p, http_), child(child_p, http_), old_child(old_child_p, http_),
      stranger(stranger_p, http_);

  auto os = owner.Attest().value();
  std::string ref = owner
                        .StoreSecret(os, "vol", AsBytes("cinder-volume-key"), "text/plain",
                                     Acl{3, {child_p.local_enclave->identity().mr_enclave}})
                        .value();
  EXPECT_EQ(ToString(child.GetSecret(child.Attest().value(), ref).value()),
            "cinder-volume-key");
  auto denied = stranger.GetSecret(stranger.Attest().value(), ref);
  EXPECT_EQ(denied.status().message(), "not-in-acl");
  auto downgraded = old_child.GetSecret(old_child.Attest().value(), ref);
  EXPECT_EQ(downgraded.status().message(), "svn-downgrade");
  EXPECT_EQ(ExitCodeFor(downgraded.status().code()), 3);
}

TEST_F(ClientTest, RaSecretsNeedMutualAttestationForOthers) {
  Client first(d_.Profile(Mode::kAware, kAlphaToken), http_);
  Client second(d_.Profile(Mode::kAware, kAlphaToken), http_);
  auto s1 = first.Attest().value();
  std::string ref = first.StoreSecret(s1, "n", AsBytes("ra")).value();
  auto got = second.GetSecret(second.Attest().value(), ref);
  EXPECT_EQ(got.status().code(), ErrorCode::kAttestationRequired);
  EXPECT_EQ(ExitCodeFor(got.status().code()), 2);
  EXPECT_EQ(first.SetPolicy(s1, Acl{1, {}}).code(), ErrorCode::kPolicyNotAllowed);
}

TEST_F(ClientTest, ConcurrentCallsOnOneSession) {
  Client c(d_.Profile(Mode::kAware, kAlphaToken), http_);
  auto session = c.Attest().value();
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      HttpTransport own(server_->base_url());
      Client worker(d_.Profile(Mode::kAware, kAlphaToken), own);
      for (int i = 0; i < 10; ++i) {
        std::string text = "t" + std::to_string(t) + "-" + std::to_string(i);
        auto ref = worker.StoreSecret(session, "n", AsBytes(text));
        if (ref.ok() && ToString(worker.GetSecret(session, *ref).value()) == text) ++ok;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(ok.load(), 40);
}

TEST(ClientProvisioningTest, RestartRecoveryWithoutReprovisioning) {
  Deployment d("provision-restart");
  auto config = d.Config("n0", kms::KekMode::kAdminProvisioned);
  std::string ref;
  ClientSession session;
  {
    auto s = d.Launch(config);
    HttpTransport t(s->base_url());
    Client admin(d.Profile(Mode::kAdmin, kAdminToken), t);
    ASSERT_TRUE(admin.ProvisionKek(admin.Attest().value(), std::string(64, 'c')).ok());
    Client aware(d.Profile(Mode::kAware, kAlphaToken), t);
    session = aware.Attest().value();
    ref = aware.StoreSecret(session, "n", AsBytes("survives")).value();
  }
  auto restarted = d.Launch(config);
  EXPECT_TRUE(restarted->core().kek_present());
  HttpTransport t(restarted->base_url());
  Client aware(d.Profile(Mode::kAware, kAlphaToken), t);
  EXPECT_EQ(ToString(aware.GetSecret(session, ref).value()), "survives");
}

TEST(ClientProvisioningTest, SameKekOnFourInstancesServesInterchangeably) {
  Deployment d("provision-four");
  std::vector<std::unique_ptr<server::Server>> nodes;
  std::vector<std::filesystem::path> platforms;
  for (int i = 0; i < 4; ++i) {
    // Each instance runs on its own machine.
    auto config = d.Config("n" + std::to_string(i), kms::KekMode::kAdminProvisioned);
    config.platform_file = d.NewPlatformFile("machine" + std::to_string(i), 100 + i);
    platforms.push_back(config.platform_file);
    nodes.push_back(d.Launch(config));
    HttpTransport t(nodes.back()->base_url());
    ClientProfile admin_p = d.Profile(Mode::kAdmin, kAdminToken);
    admin_p.authority_keys = {enclave::LoadAuthorityPublicKey(config.platform_file).value()};
    Client admin(admin_p, t);
    ASSERT_TRUE(admin.ProvisionKek(admin.Attest().value(), std::string(64, 'e')).ok());
  }
  HttpTransport first(nodes[0]->base_url());
  ClientProfile p = d.Profile(Mode::kAware, kAlphaToken);
  p.authority_keys = {enclave::LoadAuthorityPublicKey(platforms[0]).value()};
  Client writer(p, first);
  auto session = writer.Attest().value();
  std::string ref = writer.StoreSecret(session, "n", AsBytes("probe")).value();
  for (const auto& node : nodes) {
    HttpTransport t(node->base_url());
    Client reader(p, t);
    EXPECT_EQ(ToString(reader.GetSecret(session, ref).value()), "probe") << node->base_url();
  }
}

}  // namespace
}  // namespace barbie::client
