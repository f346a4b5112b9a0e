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

#include "barbie/cluster/cluster.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <thread>

#include <nlohmann/json.hpp>

#include "barbie/client/client.h"
#include "barbie/common/file_util.h"
#include "barbie/server/config.h"

namespace barbie::cluster {

using nlohmann::json;

namespace {

constexpr int kStartupTimeoutMs = 15000;
constexpr std::string_view kClientManifest = "barbie-client-enclave\nversion=1\n";
constexpr std::string_view kClientSigner = "barbie-client-signing-key";

// Reads one '\n'-terminated line from `fd` within `timeout_ms`.
StatusOr<std::string> ReadLine(int fd, int timeout_ms) {
  std::string line;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (true) {
    int left = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                    deadline - std::chrono::steady_clock::now())
                                    .count());
    if (left <= 0) return MakeError(ErrorCode::kUnavailable, "instance did not report a port");
    pollfd p{fd, POLLIN, 0};
    if (::poll(&p, 1, left) <= 0) continue;
    char c;
    ssize_t n = ::read(fd, &c, 1);
    if (n <= 0) return MakeError(ErrorCode::kUnavailable, "instance exited during startup");
    if (c == '\n') return line;
    line.push_back(c);
  }
}

}  // namespace

StatusOr<bool> WaitForHealth(const std::string& url, int timeout_ms) {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  client::HttpTransport transport(url, 1);
  while (std::chrono::steady_clock::now() < deadline) {
    auto r = transport.Send({"GET", "/health", {}, ""});
    if (r.ok() && r->status == 200) {
      json j = json::parse(r->body, nullptr, false);
      if (!j.is_discarded()) return j.value("kek_present", false);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  return MakeError(ErrorCode::kUnavailable, url + " did not become healthy");
}

StatusOr<std::unique_ptr<Cluster>> Cluster::Launch(ClusterSpec spec) {
  if (spec.n < 1) return MakeError(ErrorCode::kInvalidArgument, "n must be at least 1");
  if (spec.platform_files.size() != 1 && spec.platform_files.size() != size_t(spec.n)) {
    return MakeError(ErrorCode::kInvalidArgument, "give one platform file or one per instance");
  }
  std::unique_ptr<Cluster> cluster(new Cluster(std::move(spec)));
  const ClusterSpec& s = cluster->spec_;
  std::filesystem::create_directories(s.work_dir);

  for (int i = 0; i < s.n; ++i) {
    Instance inst;
    inst.id = "node" + std::to_string(i);
    inst.platform_file = s.platform_files[s.platform_files.size() == 1 ? 0 : i];
    server::InstanceConfig config;
    config.instance_id = inst.id;
    config.listen_address = "127.0.0.1:0";
    config.store_root = s.store_root;
    config.platform_file = inst.platform_file;
    config.kek_mode = s.kek_mode;
    config.sealed_kek_path = s.work_dir / inst.id / "sealed_kek.json";
    config.admin_token = s.admin_token;
    config.keystone_tokens = s.keystone_tokens;
    if (s.request_logs) config.request_log = s.work_dir / inst.id / "requests.jsonl";
    inst.config_path = s.work_dir / (inst.id + ".json");
    std::filesystem::create_directories(s.work_dir / inst.id);
    BARBIE_RETURN_IF_ERROR(WriteFileAtomic(inst.config_path, server::ConfigToJson(config)));
    cluster->instances_.push_back(inst);
    BARBIE_RETURN_IF_ERROR(cluster->SpawnInstance(i, 0));
  }
  for (int i = 0; i < s.n; ++i) {
    BARBIE_ASSIGN_OR_RETURN(bool kek_present,
                            WaitForHealth(cluster->instances_[i].url, kStartupTimeoutMs));
    if (!kek_present && s.kek_hex) {
      BARBIE_RETURN_IF_ERROR(cluster->Provision(i));
    } else if (!kek_present) {
      return MakeError(ErrorCode::kKekMissing,
                       cluster->instances_[i].id + " has no KEK; " +
                           (s.kek_mode == kms::KekMode::kSealDerived
                                ? "seal-derived mode needs every instance on one platform"
                                : "provision a KEK"));
    }
  }

  LbConfig lb;
  for (const auto& inst : cluster->instances_) lb.backends.push_back({inst.id, "127.0.0.1", inst.port});
  lb.routing = s.routing;
  lb.honor_sticky = s.honor_sticky;
  lb.seed = s.lb_seed;
  lb.listen_port = s.lb_port;
  BARBIE_ASSIGN_OR_RETURN(cluster->lb_, LoadBalancer::Create(lb));
  BARBIE_RETURN_IF_ERROR(cluster->lb_->Start());
  return cluster;
}

Status Cluster::SpawnInstance(size_t i, int port) {
  Instance& inst = instances_[i];
  int fds[2];
  if (::pipe(fds) != 0) return MakeError(ErrorCode::kIoError, "pipe failed");
  std::string listen = "127.0.0.1:" + std::to_string(port);
  pid_t pid = ::fork();
  if (pid < 0) return MakeError(ErrorCode::kIoError, "fork failed");
  if (pid == 0) {
    ::dup2(fds[1], STDOUT_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    ::setenv("BARBIE_LISTEN_ADDRESS", listen.c_str(), 1);
    std::string binary = spec_.server_binary.string();
    std::string config = inst.config_path.string();
    ::execl(binary.c_str(), binary.c_str(), "--config", config.c_str(), nullptr);
    ::_exit(127);
  }
  ::close(fds[1]);
  auto line = ReadLine(fds[0], kStartupTimeoutMs);
  ::close(fds[0]);
  if (!line.ok()) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, nullptr, 0);
    return line.status();
  }
  json j = json::parse(*line, nullptr, false);
  if (j.is_discarded() || !j.contains("port")) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, nullptr, 0);
    return MakeError(ErrorCode::kUnavailable, inst.id + " failed to start: " + *line);
  }
  inst.pid = pid;
  inst.port = j["port"].get<int>();
  inst.url = "http://127.0.0.1:" + std::to_string(inst.port);
  return OkStatus();
}

Status Cluster::Provision(size_t i) {
  const Instance& inst = instances_[i];
  BARBIE_ASSIGN_OR_RETURN(server::InstanceConfig config, server::LoadConfig(inst.config_path));
  BARBIE_ASSIGN_OR_RETURN(enclave::EnclaveHandle enclave, server::LoadInstanceEnclave(config));
  client::ClientProfile admin;
  admin.mode = client::Mode::kAdmin;
  admin.token = spec_.admin_token;
  admin.expected_server.mr_enclave = enclave.identity().mr_enclave;
  admin.expected_server.mr_signer = enclave.identity().mr_signer;
  admin.authority_keys = {enclave.platform().authority_public_key()};
  client::HttpTransport transport(inst.url);
  client::Client c(admin, transport);
  BARBIE_ASSIGN_OR_RETURN(client::ClientSession session, c.Attest());
  BARBIE_RETURN_IF_ERROR(c.ProvisionKek(session, *spec_.kek_hex));
  BARBIE_ASSIGN_OR_RETURN(bool present, WaitForHealth(inst.url, kStartupTimeoutMs));
  if (!present) return MakeError(ErrorCode::kProvisioningFailed, inst.id + " still has no KEK");
  return OkStatus();
}

StatusOr<client::ClientProfile> Cluster::Profile(client::Mode mode, std::string_view token,
                                                 std::string_view project) const {
  BARBIE_ASSIGN_OR_RETURN(server::InstanceConfig config,
                          server::LoadConfig(instances_.at(0).config_path));
  BARBIE_ASSIGN_OR_RETURN(enclave::EnclaveHandle enclave, server::LoadInstanceEnclave(config));
  client::ClientProfile p;
  p.mode = mode;
  p.token = std::string(token);
  p.project_id = std::string(project);
  p.expected_server.mr_enclave = enclave.identity().mr_enclave;
  p.expected_server.mr_signer = enclave.identity().mr_signer;
  for (const auto& inst : instances_) {
    BARBIE_ASSIGN_OR_RETURN(ByteArray<32> key, enclave::LoadAuthorityPublicKey(inst.platform_file));
    if (std::find(p.authority_keys.begin(), p.authority_keys.end(), key) == p.authority_keys.end()) {
      p.authority_keys.push_back(key);
    }
  }
  if (mode == client::Mode::kEnabled) {
    BARBIE_ASSIGN_OR_RETURN(
        p.local_enclave,
        enclave::LoadEnclave(AsBytes(kClientManifest), AsBytes(kClientSigner), 1,
                             enclave.shared_platform()));
  }
  return p;
}

void Cluster::StopInstance(size_t i) {
  Instance& inst = instances_.at(i);
  if (inst.pid <= 0) return;
  ::kill(inst.pid, SIGTERM);
  ::waitpid(inst.pid, nullptr, 0);
  inst.pid = -1;
  if (lb_) lb_->SetHealthy(i, false);
}

Status Cluster::RestartInstance(size_t i) {
  StopInstance(i);
  BARBIE_RETURN_IF_ERROR(SpawnInstance(i, instances_[i].port));
  BARBIE_RETURN_IF_ERROR(WaitForHealth(instances_[i].url, kStartupTimeoutMs).status());
  if (lb_) lb_->SetHealthy(i, true);
  return OkStatus();
}

void Cluster::Shutdown() {
  if (lb_) lb_->Stop();
  for (size_t i = 0; i < instances_.size(); ++i) StopInstance(i);
}

Cluster::~Cluster() { Shutdown(); }

}  // namespace barbie::cluster
