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

#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "barbie/client/client.h"
#include "barbie/cluster/bench.h"
#include "barbie/common/file_util.h"
#include "barbie/enclave/enclave_sim.h"

namespace {

using nlohmann::json;
using namespace barbie;

constexpr std::string_view kDefaultClientManifest = "barbie-client-enclave\nversion=1\n";

struct Options {
  std::string mode = "aware";
  std::string server = "http://127.0.0.1:9311";
  std::string project;
  std::string token;
  std::string expect_mrenclave;
  std::string expect_mrsigner;
  std::vector<std::string> authority_files;
  // ENABLED mode: the local enclave.
  std::string enclave_platform;
  std::string enclave_manifest;
  std::string enclave_signer = "barbie-client-signing-key";
  uint16_t enclave_svn = 1;
  // Session reuse across invocations.
  std::string session_in;
  std::string session_out;
};

int Report(const Status& status) {
  std::cerr << json{{"error", std::string(ErrorCodeName(status.code()))},
                    {"message", status.message()}}
                   .dump()
            << "\n";
  return client::ExitCodeFor(status.code());
}

StatusOr<Digest> ParseDigest(const std::string& hex, std::string_view flag) {
  auto bytes = HexDecode(hex);
  if (!bytes.ok() || bytes->size() != 32) {
    return MakeError(ErrorCode::kInvalidArgument, std::string(flag) + " needs 64 hex characters");
  }
  return ToArray<32>(*bytes);
}

StatusOr<client::ClientProfile> BuildProfile(const Options& o) {
  client::ClientProfile p;
  BARBIE_ASSIGN_OR_RETURN(p.mode, client::ModeFromName(o.mode));
  p.token = o.token;
  p.project_id = o.project;
  if (!o.expect_mrenclave.empty()) {
    BARBIE_ASSIGN_OR_RETURN(p.expected_server.mr_enclave,
                            ParseDigest(o.expect_mrenclave, "--expect-mrenclave"));
  }
  if (!o.expect_mrsigner.empty()) {
    BARBIE_ASSIGN_OR_RETURN(p.expected_server.mr_signer,
                            ParseDigest(o.expect_mrsigner, "--expect-mrsigner"));
  }
  for (const auto& file : o.authority_files) {
    BARBIE_ASSIGN_OR_RETURN(ByteArray<32> key, enclave::LoadAuthorityPublicKey(file));
    p.authority_keys.push_back(key);
  }
  if (p.mode != client::Mode::kLegacy && p.authority_keys.empty()) {
    return MakeError(ErrorCode::kInvalidArgument, "attesting modes need --authority");
  }
  if (p.mode == client::Mode::kEnabled) {
    if (o.enclave_platform.empty()) {
      return MakeError(ErrorCode::kInvalidArgument, "enabled mode needs --enclave-platform");
    }
    BARBIE_ASSIGN_OR_RETURN(enclave::PlatformState platform,
                            enclave::LoadPlatform(o.enclave_platform));
    std::string manifest(kDefaultClientManifest);
    if (!o.enclave_manifest.empty()) {
      BARBIE_ASSIGN_OR_RETURN(manifest, ReadFile(o.enclave_manifest));
    }
    BARBIE_ASSIGN_OR_RETURN(
        p.local_enclave,
        enclave::LoadEnclave(AsBytes(manifest), AsBytes(o.enclave_signer), o.enclave_svn,
                             std::make_shared<const enclave::PlatformState>(platform)));
  }
  return p;
}

json SessionJson(const client::ClientSession& s) {
  return json{{"session_id", s.session_id},
              {"sk", HexEncode(s.sk)},
              {"mode", std::string(client::ModeName(s.mode))},
              {"node", s.node}};
}

StatusOr<client::ClientSession> SessionFromFile(const std::string& path) {
  BARBIE_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("session_id") || !j.contains("sk")) {
    return MakeError(ErrorCode::kInvalidArgument, path + " is not a session file");
  }
  client::ClientSession s;
  s.session_id = j["session_id"].get<std::string>();
  BARBIE_ASSIGN_OR_RETURN(Bytes sk, HexDecode(j["sk"].get<std::string>()));
  BARBIE_ASSIGN_OR_RETURN(s.sk, ToArray<16>(sk));
  BARBIE_ASSIGN_OR_RETURN(s.mode, client::ModeFromName(j.value("mode", "aware")));
  s.node = j.value("node", "");
  return s;
}

// The session from --session, or a fresh attestation.
StatusOr<client::ClientSession> Session(const Options& o, client::Client& c) {
  if (!o.session_in.empty()) return SessionFromFile(o.session_in);
  BARBIE_ASSIGN_OR_RETURN(client::ClientSession s, c.Attest());
  if (!o.session_out.empty()) {
    BARBIE_RETURN_IF_ERROR(WriteFileAtomic(o.session_out, SessionJson(s).dump(2)));
  }
  return s;
}

StatusOr<client::Acl> BuildAcl(int policy, const std::vector<std::string>& children) {
  client::Acl acl;
  acl.policy = policy;
  for (const auto& hex : children) {
    BARBIE_ASSIGN_OR_RETURN(Digest d, ParseDigest(hex, "--child"));
    acl.child_mrenclaves.push_back(d);
  }
  return acl;
}

int Emit(const json& j) {
  std::cout << j.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barbie key management client"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--mode", o.mode, "legacy, aware, enabled or admin")->capture_default_str();
  app.add_option("--server", o.server, "Server or load balancer URL")->capture_default_str();
  app.add_option("--project", o.project, "Project id (enabled mode)");
  app.add_option("--token", o.token, "Keystone token sent as X-Auth-Token");
  app.add_option("--expect-mrenclave", o.expect_mrenclave, "Pinned server measurement (hex)");
  app.add_option("--expect-mrsigner", o.expect_mrsigner, "Pinned server signer (hex)");
  app.add_option("--authority", o.authority_files, "Trusted quoting authority key files");
  app.add_option("--enclave-platform", o.enclave_platform, "Local platform file (enabled mode)");
  app.add_option("--enclave-manifest", o.enclave_manifest, "Local enclave manifest file");
  app.add_option("--enclave-signer", o.enclave_signer, "Local enclave signer key");
  app.add_option("--enclave-svn", o.enclave_svn, "Local enclave ISV_SVN");
  app.add_option("--session", o.session_in, "Reuse a session file written by attest");
  app.add_option("--session-out", o.session_out, "Write the attested session to this file");

  int policy = 3;
  std::vector<std::string> children;
  auto add_acl = [&](CLI::App* cmd) {
    cmd->add_option("--policy", policy, "1, 2 or 3")->capture_default_str();
    cmd->add_option("--child", children, "Child enclave measurement (hex), repeatable");
  };

  auto* attest = app.add_subcommand("attest", "Attest the server and print the session");

  std::string kek_hex;
  bool overwrite = false;
  auto* provision = app.add_subcommand("provision-kek", "Provision the KEK (admin mode)");
  provision->add_option("--kek", kek_hex, "64 hex characters")->required();
  provision->add_flag("--overwrite", overwrite, "Replace an existing KEK");

  auto* set_policy = app.add_subcommand("set-policy", "Set the ACL of the session's project");
  add_acl(set_policy);

  std::string name = "secret";
  std::string content_type = "text/plain";
  std::string data;
  std::string in_file;
  bool with_acl = false;
  auto* store = app.add_subcommand("store", "Store a secret and print its ref");
  store->add_option("--name", name);
  store->add_option("--content-type", content_type);
  auto* data_opt = store->add_option("--data", data, "Secret bytes given inline");
  store->add_option("--in", in_file, "Read the secret from a file")->excludes(data_opt);
  store->add_flag("--acl", with_acl, "Set --policy/--child before storing");
  add_acl(store);

  std::string ref;
  std::string out_file;
  auto* get = app.add_subcommand("get", "Retrieve a secret");
  get->add_option("ref", ref, "Secret ref")->required();
  get->add_option("--out", out_file, "Write the secret to this file instead of stdout JSON");

  int users = 1;
  int concurrency = 1;
  int requests = 1;
  std::string workload = "v1-store";
  std::string report_out;
  std::string csv_out;
  auto* bench = app.add_subcommand("bench", "Run the load benchmark against --server");
  bench->add_option("--users", users)->capture_default_str();
  bench->add_option("--concurrency", concurrency)->capture_default_str();
  bench->add_option("--requests", requests, "Requests per user")->capture_default_str();
  bench->add_option("--workload", workload, "v1-store, v2-ra-store or v2-ma-roundtrip")
      ->capture_default_str();
  bench->add_option("--out", report_out, "Write the report JSON here too");
  bench->add_option("--csv", csv_out, "Per-request latency CSV");

  CLI11_PARSE(app, argc, argv);

  auto profile = BuildProfile(o);
  if (!profile.ok()) return Report(profile.status());

  if (*bench) {
    cluster::BenchOptions b;
    b.target_url = o.server;
    b.users = users;
    b.concurrency = concurrency;
    b.requests_per_user = requests;
    auto w = cluster::WorkloadFromName(workload);
    if (!w.ok()) return Report(w.status());
    b.workload = *w;
    b.profile = *profile;
    b.csv_path = csv_out;
    auto report = cluster::RunBench(b);
    if (!report.ok()) return Report(report.status());
    json j = report->ToJson();
    if (!report_out.empty()) {
      if (Status st = WriteFileAtomic(report_out, j.dump(2)); !st.ok()) return Report(st);
    }
    Emit(j);
    return report->degraded ? 1 : 0;
  }

  client::HttpTransport transport(o.server);
  client::Client c(*profile, transport);
  const bool legacy = profile->mode == client::Mode::kLegacy;

  if (*attest) {
    auto s = c.Attest();
    if (!s.ok()) return Report(s.status());
    if (!o.session_out.empty()) {
      if (Status st = WriteFileAtomic(o.session_out, SessionJson(*s).dump(2)); !st.ok()) {
        return Report(st);
      }
    }
    return Emit(json{{"session_id", s->session_id},
                     {"mode", std::string(client::ModeName(s->mode))},
                     {"node", s->node}});
  }

  if (*provision) {
    auto s = Session(o, c);
    if (!s.ok()) return Report(s.status());
    if (Status st = c.ProvisionKek(*s, kek_hex, overwrite); !st.ok()) return Report(st);
    return Emit(json{{"status", "OK"}});
  }

  if (*set_policy) {
    auto acl = BuildAcl(policy, children);
    if (!acl.ok()) return Report(acl.status());
    auto s = Session(o, c);
    if (!s.ok()) return Report(s.status());
    if (Status st = c.SetPolicy(*s, *acl); !st.ok()) return Report(st);
    return Emit(json{{"status", "OK"}, {"policy", policy}});
  }

  if (*store) {
    Bytes plaintext;
    if (!in_file.empty()) {
      auto text = ReadFile(in_file);
      if (!text.ok()) return Report(text.status());
      plaintext = Bytes(text->begin(), text->end());
    } else {
      plaintext = Bytes(data.begin(), data.end());
    }
    StatusOr<std::string> stored = std::string();
    if (legacy) {
      stored = c.LegacyStore(name, plaintext, content_type);
    } else {
      std::optional<client::Acl> acl;
      if (with_acl) {
        auto built = BuildAcl(policy, children);
        if (!built.ok()) return Report(built.status());
        acl = *built;
      }
      auto s = Session(o, c);
      if (!s.ok()) return Report(s.status());
      stored = c.StoreSecret(*s, name, plaintext, content_type, acl);
    }
    if (!stored.ok()) return Report(stored.status());
    return Emit(json{{"secret_ref", *stored}});
  }

  if (*get) {
    StatusOr<Bytes> plain = Bytes();
    if (legacy) {
      plain = c.LegacyGet(ref);
    } else {
      auto s = Session(o, c);
      if (!s.ok()) return Report(s.status());
      plain = c.GetSecret(*s, ref);
    }
    if (!plain.ok()) return Report(plain.status());
    if (!out_file.empty()) {
      Status st = WriteFileAtomic(
          out_file, std::string_view(reinterpret_cast<const char*>(plain->data()), plain->size()));
      if (!st.ok()) return Report(st);
      return Emit(json{{"secret_ref", ref}, {"bytes", plain->size()}});
    }
    return Emit(json{{"secret_ref", ref}, {"payload", Base64Encode(*plain)}});
  }
  return 1;
}
