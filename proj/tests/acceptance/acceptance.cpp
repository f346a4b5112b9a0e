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

// Acceptance suite: one PASS/FAIL line per criterion. Thresholds and time
// limits are fixed below. Exit status is 1 if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "barbie/cluster/bench.h"
#include "barbie/cluster/cluster.h"
#include "barbie/common/file_util.h"
#include "barbie/kms/policy.h"
#include "support/deployment.h"
#include "support/handshake_harness.h"
#include "support/policy_truth_table.h"

namespace barbie::acceptance {
namespace {

using client::Acl;
using client::Client;
using client::ClientProfile;
using client::HttpTransport;
using client::Mode;
using nlohmann::json;
using testing::Deployment;
using testing::kAdminToken;
using testing::kAlphaToken;
using testing::kBetaToken;

constexpr int kHonestRuns = 1000;
constexpr int kCorruptionRuns = 1000;
constexpr int kConfinementCycles = 100;
constexpr int kStickyAttempts = 200;
constexpr double kStickyOffCeiling = 0.5;
constexpr double kScalingFloor = 2.0;
constexpr unsigned kScalingMinCores = 4;
constexpr std::string_view kKekHex =
    "5eb63bbbe01eeed093cb22bb8f5acdc35eb63bbbe01eeed093cb22bb8f5acdc3";

enum class Verdict { kPass, kFail, kNotApplicable };

struct Outcome {
  Verdict verdict = Verdict::kFail;
  std::string detail;
};

Outcome Check(bool ok, std::string detail) {
  return {ok ? Verdict::kPass : Verdict::kFail, std::move(detail)};
}

Bytes ToBytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

// ---------------------------------------------------------------------------

struct HandshakeFixture {
  HandshakeFixture()
      : rng(1),
        platform(std::make_shared<const enclave::PlatformState>(
            enclave::PlatformState::Generate(rng))),
        server(enclave::LoadEnclave(AsBytes("barbie-kms-enclave"), AsBytes("release"), 2,
                                    platform)
                   .value()),
        client(enclave::LoadEnclave(AsBytes("cinder"), AsBytes("openstack"), 1, platform)
                   .value()) {}

  testing::HandshakeSetup Setup() const {
    testing::HandshakeSetup s;
    s.server_enclave = &server;
    s.client_enclave = &client;
    s.client_trusts = {platform->authority_public_key()};
    s.server_trusts = {platform->authority_public_key()};
    attestation::IdentityExpectation expect{server.identity().mr_enclave,
                                            server.identity().mr_signer, std::nullopt};
    s.server_predicate = expect.AsPredicate();
    return s;
  }

  SeededRandom rng;
  std::shared_ptr<const enclave::PlatformState> platform;
  enclave::EnclaveHandle server;
  enclave::EnclaveHandle client;
};

Outcome ProtocolCompleteness() {
  HandshakeFixture f;
  int ra_ok = 0;
  int ma_ok = 0;
  for (int run = 0; run < kHonestRuns; ++run) {
    SeededRandom ra_rng(uint64_t(run) * 2 + 1);
    SeededRandom ma_rng(uint64_t(run) * 2 + 2);
    ra_ok += testing::RunRa(f.Setup(), ra_rng).Succeeded();
    ma_ok += testing::RunMa(f.Setup(), ma_rng).Succeeded();
  }
  std::ostringstream d;
  d << "RA " << ra_ok << "/" << kHonestRuns << ", MA " << ma_ok << "/" << kHonestRuns
    << " established with matching keys";
  return Check(ra_ok == kHonestRuns && ma_ok == kHonestRuns, d.str());
}

Outcome HandshakeRobustness() {
  HandshakeFixture f;
  std::mt19937_64 gen(0x5eed);
  const auto ra_names = testing::RaMessageNames();
  const auto ma_names = testing::MaMessageNames();
  int mismatched = 0;
  int explicit_failures = 0;
  int missed = 0;
  for (int run = 0; run < kCorruptionRuns; ++run) {
    bool mutual = run % 2 == 1;
    const auto& names = mutual ? ma_names : ra_names;
    std::string target = names[gen() % names.size()];
    uint64_t pick = gen();
    uint8_t flip = static_cast<uint8_t>(1 + gen() % 255);
    bool hit = false;
    auto hook = [&](const std::string& name, testing::FieldList& fields) {
      if (name != target || hit) return;
      size_t total = 0;
      for (auto field : fields) total += field.size();
      if (total == 0) return;
      size_t at = pick % total;
      for (auto field : fields) {
        if (at < field.size()) {
          field[at] ^= flip;
          break;
        }
        at -= field.size();
      }
      hit = true;
    };
    SeededRandom rng(uint64_t(run) + 7000);
    auto out = mutual ? testing::RunMa(f.Setup(), rng, hook) : testing::RunRa(f.Setup(), rng, hook);
    if (!hit) ++missed;
    if (out.EstablishedWithMismatchedKeys()) ++mismatched;
    bool failed_explicitly =
        !out.first_error.ok() && !(out.client_established && out.server_established);
    explicit_failures += failed_explicitly;
  }
  std::ostringstream d;
  d << kCorruptionRuns << " corrupted runs: " << mismatched << " mismatched-key sessions, "
    << explicit_failures << " explicit failures, " << missed << " runs missed their target";
  return Check(mismatched == 0 && explicit_failures == kCorruptionRuns && missed == 0, d.str());
}

// ---------------------------------------------------------------------------

Outcome PolicyTruthTable() {
  SeededRandom rng(3);
  auto platform =
      std::make_shared<const enclave::PlatformState>(enclave::PlatformState::Generate(rng));
  auto load = [&](std::string_view m, std::string_view s, uint16_t svn) {
    return enclave::LoadEnclave(AsBytes(m), AsBytes(s), svn, platform).value().identity();
  };
  const uint16_t owner_svn = 5;
  auto owner = load("cinder", "openstack", owner_svn);
  auto same_signer = load("cinder-v2", "openstack", owner_svn);
  auto child = load("nova", "nova-signer", owner_svn);
  auto stranger = load("glance", "glance-signer", owner_svn);
  int matched = 0;
  std::string first_mismatch;
  for (const auto& row : testing::kPolicyTruthTable) {
    kms::ProjectPolicyRecord rec;
    rec.policy_no = row.policy;
    rec.origin = kms::Origin::kMa;
    rec.owner_mr_enclave = owner.mr_enclave;
    rec.owner_mr_signer = owner.mr_signer;
    rec.owner_isv_svn = owner_svn;
    rec.child_mr_enclaves = {child.mr_enclave};
    enclave::EnclaveIdentity req;
    switch (row.who) {
      case testing::Who::kOwner: req = owner; break;
      case testing::Who::kSameSigner: req = same_signer; break;
      case testing::Who::kChild: req = child; break;
      case testing::Who::kStranger: req = stranger; break;
    }
    req.isv_svn = static_cast<uint16_t>(owner_svn + row.svn_offset);
    kms::AccessDecision d = kms::CheckAccess(rec, req);
    std::string got = d.allowed ? "allow" : std::string(kms::DenyReasonName(*d.reason));
    if (got == row.expected) {
      ++matched;
    } else if (first_mismatch.empty()) {
      first_mismatch = "; first mismatch at policy " + std::to_string(row.policy) + " got " + got;
    }
  }
  return Check(matched == int(testing::kPolicyTruthTable.size()),
               std::to_string(matched) + "/" + std::to_string(testing::kPolicyTruthTable.size()) +
                   " rows match" + first_mismatch);
}

// ---------------------------------------------------------------------------

const std::vector<std::string> kProjects = {"alpha", "bravo", "charlie", "delta", "echo"};

std::string TokenFor(const std::string& project) { return "token-" + project; }

Outcome CopiedSessionKeyRows() {
  Deployment d("accept-swap", 5);
  auto config = d.Config("n0");
  for (const auto& p : kProjects) config.keystone_tokens[TokenFor(p)] = p;
  auto server = d.Launch(config);
  HttpTransport t(server->base_url());
  std::map<std::string, ClientProfile> profiles;
  for (const auto& p : kProjects) {
    ClientProfile profile = d.Profile(Mode::kEnabled, TokenFor(p), p);
    profile.local_enclave = d.LocalEnclave("owner-" + p, "signer-" + p, 1);
    profiles[p] = profile;
    Client c(profile, t);
    if (!c.Attest().ok()) return Check(false, "initial MA failed for " + p);
  }
  const store::Store& store = server->core().store();
  int refused = 0;
  int pairs = 0;
  int restored_ok = 0;
  for (const auto& a : kProjects) {
    for (const auto& b : kProjects) {
      if (a == b) continue;
      ++pairs;
      auto a_path = store.RecordPath(store::Table::kProjects, a);
      auto b_path = store.RecordPath(store::Table::kProjects, b);
      std::string original = ReadFile(b_path).value();
      json victim = json::parse(ReadFile(a_path).value());
      json tampered = json::parse(original);
      tampered["enc_sk"] = victim["enc_sk"];
      (void)WriteFileAtomic(b_path, tampered.dump());
      Client attacker(profiles[b], t);
      auto session = attacker.Attest();
      if (!session.ok() && session.status().code() == ErrorCode::kIntegrityViolation) ++refused;
      (void)WriteFileAtomic(b_path, original);
      restored_ok += Client(profiles[b], t).Attest().ok();
    }
  }
  std::ostringstream out;
  out << refused << "/" << pairs << " cross-project copies refused with integrity-violation, "
      << restored_ok << "/" << pairs << " MA runs succeed again after restoring the row";
  return Check(pairs == 20 && refused == pairs && restored_ok == pairs, out.str());
}

// ---------------------------------------------------------------------------

bool TreeContains(const std::filesystem::path& root, ByteSpan needle) {
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    auto data = ReadFile(entry.path());
    if (!data.ok()) continue;
    if (ContainsSubsequence(AsBytes(*data), needle)) return true;
  }
  return false;
}

Outcome PlaintextConfinement() {
  Deployment d("accept-confine", 9);
  auto config = d.Config("n0", kms::KekMode::kAdminProvisioned);
  std::mutex mu;
  std::vector<std::string> wire;
  auto server = server::Server::Create(config).value();
  server->SetObserver([&](const server::Exchange& e) {
    if (e.path.rfind("/v2/", 0) != 0) return;
    std::lock_guard lock(mu);
    wire.push_back(e.request_body);
    wire.push_back(e.response_body);
  });
  if (!server->Start().ok()) return Check(false, "server did not start");
  HttpTransport t(server->base_url());
  Client admin(d.Profile(Mode::kAdmin, kAdminToken), t);
  auto admin_session = admin.Attest();
  if (!admin_session.ok() || !admin.ProvisionKek(*admin_session, kKekHex).ok()) {
    return Check(false, "KEK provisioning failed");
  }
  ClientProfile enabled = d.Profile(Mode::kEnabled, kAlphaToken, "alpha");
  enabled.local_enclave = d.LocalEnclave("cinder", "openstack", 1);
  Client aware(d.Profile(Mode::kAware, kBetaToken), t);
  Client mutual(enabled, t);
  auto aware_session = aware.Attest();
  auto mutual_session = mutual.Attest();
  if (!aware_session.ok() || !mutual_session.ok()) return Check(false, "attestation failed");

  std::mt19937_64 gen(100);
  std::vector<Bytes> plaintexts;
  int roundtrips = 0;
  for (int i = 0; i < kConfinementCycles; ++i) {
    Bytes plain(24 + gen() % 40);
    for (auto& b : plain) b = static_cast<uint8_t>(gen());
    bool use_mutual = i % 2 == 1;
    Client& c = use_mutual ? mutual : aware;
    const auto& s = use_mutual ? *mutual_session : *aware_session;
    auto ref = c.StoreSecret(s, "cycle-" + std::to_string(i), plain);
    if (!ref.ok()) continue;
    auto back = c.GetSecret(s, *ref);
    roundtrips += back.ok() && *back == plain;
    plaintexts.push_back(std::move(plain));
  }
  Bytes kek = HexDecode(kKekHex).value();
  std::vector<Bytes> needles = plaintexts;
  needles.push_back(kek);
  std::vector<std::string> text_needles;
  for (const auto& n : needles) {
    text_needles.push_back(Base64Encode(n));
    text_needles.push_back(HexEncode(n));
  }
  int store_hits = 0;
  for (const auto& n : needles) store_hits += TreeContains(d.store_root(), n);
  for (const auto& n : text_needles) store_hits += TreeContains(d.store_root(), AsBytes(n));
  int wire_hits = 0;
  {
    std::lock_guard lock(mu);
    for (const auto& body : wire) {
      for (const auto& n : needles) wire_hits += ContainsSubsequence(AsBytes(body), n);
      for (const auto& n : text_needles) wire_hits += body.find(n) != std::string::npos;
    }
  }
  std::ostringstream out;
  out << roundtrips << "/" << kConfinementCycles << " roundtrips; " << store_hits
      << " plaintext or KEK hits in the store, " << wire_hits << " in " << wire.size()
      << " captured v2 bodies";
  return Check(roundtrips == kConfinementCycles && store_hits == 0 && wire_hits == 0, out.str());
}

// ---------------------------------------------------------------------------

// Stores `count` secrets under a fresh AWARE session.
std::vector<std::pair<std::string, std::string>> StoreSome(Client& c,
                                                           const client::ClientSession& s,
                                                           int count, std::string_view tag) {
  std::vector<std::pair<std::string, std::string>> out;
  for (int i = 0; i < count; ++i) {
    std::string plain = std::string(tag) + "-" + std::to_string(i);
    auto ref = c.StoreSecret(s, "r", AsBytes(plain));
    if (ref.ok()) out.emplace_back(*ref, plain);
  }
  return out;
}

int CountRetrievable(Client& c, const client::ClientSession& s,
                     const std::vector<std::pair<std::string, std::string>>& refs) {
  int ok = 0;
  for (const auto& [ref, plain] : refs) {
    auto got = c.GetSecret(s, ref);
    ok += got.ok() && *got == ToBytes(plain);
  }
  return ok;
}

Outcome RestartRecovery() {
  Deployment d("accept-restart", 11);
  std::ostringstream out;
  bool ok = true;
  for (kms::KekMode mode : {kms::KekMode::kSealDerived, kms::KekMode::kAdminProvisioned}) {
    auto config = d.Config(std::string(kms::KekModeName(mode)), mode);
    // A store is bound to one KEK, so each mode gets its own.
    config.store_root = d.root() / ("store-" + config.instance_id);
    client::ClientSession session;
    std::vector<std::pair<std::string, std::string>> refs;
    {
      auto s = d.Launch(config);
      HttpTransport t(s->base_url());
      if (mode == kms::KekMode::kAdminProvisioned) {
        Client admin(d.Profile(Mode::kAdmin, kAdminToken), t);
        auto as = admin.Attest();
        Status provisioned = as.ok() ? admin.ProvisionKek(*as, kKekHex) : as.status();
        if (!provisioned.ok()) return Check(false, "provisioning: " + provisioned.ToString());
      }
      Client c(d.Profile(Mode::kAware, kAlphaToken), t);
      auto attested = c.Attest();
      if (!attested.ok()) return Check(false, "attestation: " + attested.status().ToString());
      session = *attested;
      refs = StoreSome(c, session, 10, kms::KekModeName(mode));
    }
    auto restarted = d.Launch(config);
    HttpTransport t(restarted->base_url());
    Client c(d.Profile(Mode::kAware, kAlphaToken), t);
    int got = CountRetrievable(c, session, refs);
    out << kms::KekModeName(mode) << " " << got << "/" << refs.size() << " after restart; ";
    ok = ok && refs.size() == 10 && got == 10 && restarted->core().kek_present();
  }

  // The admin-provisioned instance moves to another machine.
  auto config = d.Config("ADMIN_PROVISIONED", kms::KekMode::kAdminProvisioned);
  config.store_root = d.root() / "store-ADMIN_PROVISIONED";
  config.platform_file = d.NewPlatformFile("other-machine", 12);
  auto moved = d.Launch(config);
  HttpTransport t(moved->base_url());
  ClientProfile aware = d.Profile(Mode::kAware, kAlphaToken);
  aware.authority_keys = {enclave::LoadAuthorityPublicKey(config.platform_file).value()};
  Client c(aware, t);
  // Refused at attestation or at the first store, as long as it is kek-missing.
  auto session = c.Attest();
  Status before = session.ok() ? c.StoreSecret(*session, "r", AsBytes("x")).status()
                               : session.status();
  bool missing = !moved->core().kek_present() && before.code() == ErrorCode::kKekMissing;
  ClientProfile admin_p = d.Profile(Mode::kAdmin, kAdminToken);
  admin_p.authority_keys = aware.authority_keys;
  Client admin(admin_p, t);
  auto as = admin.Attest();
  bool reprovisioned = as.ok() && admin.ProvisionKek(*as, kKekHex).ok();
  auto fresh = c.Attest();
  auto after = fresh.ok() ? c.StoreSecret(*fresh, "r", AsBytes("x"))
                          : StatusOr<std::string>(fresh.status());
  out << "cross-platform: " << (missing ? "kek-missing" : "NOT kek-missing")
      << " before, " << (reprovisioned && after.ok() ? "serving" : "still failing")
      << " after re-provisioning";
  return Check(ok && missing && reprovisioned && after.ok(), out.str());
}

// ---------------------------------------------------------------------------

Outcome MultiUserDistribution() {
  Deployment d("accept-distribution", 13);
  auto server = d.Launch(d.Config("n0"));
  HttpTransport t(server->base_url());
  auto profile = [&](std::string_view manifest, uint16_t svn) {
    ClientProfile p = d.Profile(Mode::kEnabled, kAlphaToken, "alpha");
    p.local_enclave = d.LocalEnclave(manifest, manifest == "cinder" ? "openstack" : "nova-signer",
                                     svn);
    return p;
  };
  ClientProfile owner_p = profile("cinder", 3);
  ClientProfile child_p = profile("nova", 3);
  ClientProfile old_child_p = profile("nova", 2);
  ClientProfile stranger_p = profile("glance", 3);
  Client owner(owner_p, t), child(child_p, t), old_child(old_child_p, t), stranger(stranger_p, t);
  auto os = owner.Attest();
  if (!os.ok()) return Check(false, "owner MA failed: " + os.status().ToString());
  auto ref = owner.StoreSecret(*os, "volume", AsBytes("cinder-volume-key"), "text/plain",
                               Acl{3, {child_p.local_enclave->identity().mr_enclave}});
  if (!ref.ok()) return Check(false, "owner store failed");
  auto describe = [](const StatusOr<Bytes>& r) {
    return r.ok() ? std::string("allowed") : std::string(r.status().message());
  };
  auto listed = child.GetSecret(child.Attest().value(), *ref);
  auto unlisted = stranger.GetSecret(stranger.Attest().value(), *ref);
  auto downgraded = old_child.GetSecret(old_child.Attest().value(), *ref);
  bool ok = listed.ok() && *listed == ToBytes("cinder-volume-key") && !unlisted.ok() &&
            unlisted.status().message() == "not-in-acl" && !downgraded.ok() &&
            downgraded.status().message() == "svn-downgrade";
  return Check(ok, "listed child " + describe(listed) + ", unlisted " + describe(unlisted) +
                       ", listed at lower ISV_SVN " + describe(downgraded));
}

// ---------------------------------------------------------------------------

cluster::ClusterSpec ClusterSpecFor(const Deployment& d, int n, cluster::Routing routing,
                                    bool sticky, int index) {
  cluster::ClusterSpec s;
  s.n = n;
  s.server_binary = BARBIE_SERVER_BINARY;
  s.work_dir = d.root() / ("cluster" + std::to_string(index));
  s.store_root = d.store_root();
  s.platform_files = {d.platform_file()};
  s.admin_token = std::string(kAdminToken);
  s.keystone_tokens = {{std::string(kAlphaToken), "alpha"}};
  s.routing = routing;
  s.honor_sticky = sticky;
  s.lb_seed = 2024;
  s.request_logs = false;
  return s;
}

Outcome StickySessions() {
  Deployment d("accept-sticky", 17);
  std::ostringstream out;
  double on_rate = 0;
  double off_rate = 0;
  for (bool sticky : {true, false}) {
    auto c = cluster::Cluster::Launch(ClusterSpecFor(d, 4, cluster::Routing::kRandom, sticky,
                                                     sticky ? 0 : 1));
    if (!c.ok()) return Check(false, "cluster launch failed: " + c.status().ToString());
    auto tally = cluster::RunHandshakes((*c)->lb().base_url(),
                                        (*c)->Profile(Mode::kAware, kAlphaToken).value(),
                                        kStickyAttempts);
    (sticky ? on_rate : off_rate) = tally.completion_rate();
    out << "sticky " << (sticky ? "on" : "off") << ": " << tally.completed << "/"
        << tally.attempts << " handshakes; ";
  }
  int data_ok = 0;
  int data_total = 0;
  int index = 2;
  for (auto routing :
       {cluster::Routing::kRoundRobin, cluster::Routing::kRandom,
        cluster::Routing::kLeastOutstanding}) {
    auto c = cluster::Cluster::Launch(ClusterSpecFor(d, 4, routing, false, index++));
    if (!c.ok()) return Check(false, "cluster launch failed: " + c.status().ToString());
    auto profile = (*c)->Profile(Mode::kAware, kAlphaToken).value();
    HttpTransport direct((*c)->instances()[1].url);
    auto session = Client(profile, direct).Attest();
    if (!session.ok()) return Check(false, "direct attestation failed");
    HttpTransport via((*c)->lb().base_url());
    Client user(profile, via);
    for (int i = 0; i < 10; ++i) {
      std::string plain = "affinity-free-" + std::to_string(i);
      ++data_total;
      auto ref = user.StoreSecret(*session, "s", AsBytes(plain));
      if (!ref.ok()) continue;
      auto got = user.GetSecret(*session, *ref);
      data_ok += got.ok() && *got == ToBytes(plain);
    }
  }
  out << data_ok << "/" << data_total
      << " store+get pairs on established sessions with stickiness off across 3 policies";
  return Check(on_rate == 1.0 && off_rate < kStickyOffCeiling && data_ok == data_total, out.str());
}

// ---------------------------------------------------------------------------

Outcome Scaling() {
  Deployment d("accept-scaling", 19);
  double rps[2] = {0, 0};
  bool degraded = false;
  int index = 10;
  std::ostringstream out;
  for (int k = 0; k < 2; ++k) {
    int n = k == 0 ? 1 : 4;
    auto c = cluster::Cluster::Launch(
        ClusterSpecFor(d, n, cluster::Routing::kRoundRobin, true, index++));
    if (!c.ok()) return Check(false, "cluster launch failed: " + c.status().ToString());
    cluster::BenchOptions o;
    o.target_url = (*c)->lb().base_url();
    o.users = 5;
    o.concurrency = 2;
    o.requests_per_user = 100;
    o.workload = cluster::Workload::kV2RaStore;
    o.profile = (*c)->Profile(Mode::kAware, kAlphaToken).value();
    auto report = cluster::RunBench(o);
    if (!report.ok()) return Check(false, "bench failed: " + report.status().ToString());
    json j = report->ToJson();
    j["instances"] = n;
    std::cout << "  report " << j.dump() << "\n";
    rps[k] = report->requests_per_second;
    degraded = degraded || report->degraded;
  }
  double ratio = rps[0] > 0 ? rps[1] / rps[0] : 0;
  unsigned cores = std::thread::hardware_concurrency();
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "throughput 1 instance %.1f req/s, 4 instances %.1f req/s, ratio %.2f "
                "(floor %.1f), %u cores",
                rps[0], rps[1], ratio, kScalingFloor, cores);
  out << buf;
  if (degraded) return Check(false, out.str() + ", degraded run");
  if (cores < kScalingMinCores) {
    return {Verdict::kNotApplicable,
            out.str() + "; the criterion needs a host with at least 4 cores"};
  }
  return Check(ratio >= kScalingFloor, out.str());
}

// ---------------------------------------------------------------------------

// The v1 suite, written once against the client API and run unchanged
// against both backends.
std::vector<std::string> V1Suite(const Deployment& d, const std::string& url) {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, std::string what) {
    if (!ok) failures.push_back(std::move(what));
  };
  HttpTransport t(url);
  Client alpha(d.Profile(Mode::kLegacy, kAlphaToken), t);
  Client beta(d.Profile(Mode::kLegacy, kBetaToken), t);
  Client nobody(d.Profile(Mode::kLegacy, "unknown-token"), t);
  std::vector<Bytes> payloads = {ToBytes("s3cret"), ToBytes(std::string(4096, 'x')), Bytes{0},
                                 Bytes{0xff, 0x00, 0x10, 0x80}};
  for (size_t i = 0; i < payloads.size(); ++i) {
    auto ref = alpha.LegacyStore("item" + std::to_string(i), payloads[i]);
    expect(ref.ok(), "store " + std::to_string(i));
    if (!ref.ok()) continue;
    auto got = alpha.LegacyGet(*ref);
    expect(got.ok() && *got == payloads[i], "roundtrip " + std::to_string(i));
    expect(beta.LegacyGet(*ref).status().code() == ErrorCode::kAccessDenied, "cross-project");
  }
  expect(nobody.LegacyStore("x", AsBytes("y")).status().code() == ErrorCode::kUnauthenticated,
         "unknown token");
  expect(alpha.LegacyGet(std::string(32, 'b')).status().code() == ErrorCode::kNotFound,
         "unknown ref");
  client::HttpRequest bad{"POST", "/v1/secrets", {{"X-Auth-Token", std::string(kAlphaToken)}},
                          R"({"payload":"***"})"};
  auto r = t.Send(bad);
  expect(r.ok() && r->status == 400, "malformed payload");
  return failures;
}

Outcome LegacyCompatibility() {
  Deployment d("accept-legacy", 23);
  server::InstanceConfig pass = d.Config("pass");
  pass.v1_backend = "simple_crypto";
  pass.simple_crypto_key = std::string(64, '7');
  pass.store_root = d.root() / "store-simple";
  server::InstanceConfig enclave = d.Config("enclave");
  std::ostringstream out;
  bool ok = true;
  for (const auto& config : {pass, enclave}) {
    auto s = d.Launch(config);
    auto failures = V1Suite(d, s->base_url());
    HttpTransport t(s->base_url());
    auto health = t.Send({"GET", "/health", {}, ""});
    bool backend_ok = health.ok() && json::parse(health->body).value("v1_backend", "") ==
                                         config.v1_backend;
    ok = ok && failures.empty() && backend_ok;
    out << config.v1_backend << ": " << (failures.empty() ? "all checks pass" : "failed ");
    for (const auto& f : failures) out << f << ",";
    out << "; ";
  }
  out << "same client code for both";
  return Check(ok, out.str());
}

// ---------------------------------------------------------------------------

struct Criterion {
  std::string_view name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace barbie::acceptance

int main() {
  using namespace barbie::acceptance;
  const std::vector<Criterion> criteria = {
      {"protocol-completeness", 60, ProtocolCompleteness},
      {"handshake-robustness", 120, HandshakeRobustness},
      {"policy-truth-table", 1, PolicyTruthTable},
      {"copied-session-key-rows", 5, CopiedSessionKeyRows},
      {"plaintext-confinement", 60, PlaintextConfinement},
      {"restart-recovery", 30, RestartRecovery},
      {"multi-user-distribution", 10, MultiUserDistribution},
      {"sticky-sessions", 120, StickySessions},
      {"scaling-shape", 300, Scaling},
      {"legacy-compatibility", 30, LegacyCompatibility},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {Verdict::kFail, std::string("exception: ") + e.what()};
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (outcome.verdict == Verdict::kPass && elapsed > c.limit_s) {
      outcome.verdict = Verdict::kFail;
      outcome.detail += "; over the time limit";
    }
    const char* label = outcome.verdict == Verdict::kPass   ? "PASS"
                        : outcome.verdict == Verdict::kFail ? "FAIL"
                                                            : "N/A ";
    std::printf("%s %-24s %7.2fs/%gs  %s\n", label, std::string(c.name).c_str(), elapsed,
                c.limit_s, outcome.detail.c_str());
    std::fflush(stdout);
    failed += outcome.verdict == Verdict::kFail;
  }
  return failed == 0 ? 0 : 1;
}
