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

#ifndef BARBIE_CLUSTER_CLUSTER_H_
#define BARBIE_CLUSTER_CLUSTER_H_

#include <sys/types.h>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "barbie/client/client.h"
#include "barbie/cluster/load_balancer.h"
#include "barbie/kms/kek.h"

namespace barbie::cluster {

struct ClusterSpec {
  int n = 1;
  std::filesystem::path server_binary;  // barbie-server
  std::filesystem::path work_dir;       // configs, logs, sealed KEK files
  std::filesystem::path store_root;     // shared by every instance
  // One file shared by all instances, or exactly n (one machine each).
  std::vector<std::filesystem::path> platform_files;
  kms::KekMode kek_mode = kms::KekMode::kSealDerived;
  std::optional<std::string> kek_hex;  // provisioned to every instance when set
  std::string admin_token = "admin-token";
  std::map<std::string, std::string> keystone_tokens;
  Routing routing = Routing::kRoundRobin;
  bool honor_sticky = true;
  uint64_t lb_seed = 0;
  int lb_port = 0;
  bool request_logs = true;
};

struct Instance {
  std::string id;
  std::filesystem::path config_path;
  std::filesystem::path platform_file;
  std::string url;
  int port = 0;
  pid_t pid = -1;
};

// N barbie-server processes over one store behind an in-process load
// balancer. Launch fails unless every instance ends up with a KEK.
class Cluster {
 public:
  static StatusOr<std::unique_ptr<Cluster>> Launch(ClusterSpec spec);
  ~Cluster();
  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  const std::vector<Instance>& instances() const { return instances_; }
  LoadBalancer& lb() { return *lb_; }
  const ClusterSpec& spec() const { return spec_; }

  // SIGTERM then wait.
  void StopInstance(size_t i);
  // Restarts a stopped instance on its previous port. No provisioning.
  Status RestartInstance(size_t i);
  void Shutdown();

  // A client profile pinned to the instances' enclave identity and platform
  // authority. ENABLED profiles get a client enclave on instance 0's platform.
  StatusOr<client::ClientProfile> Profile(client::Mode mode, std::string_view token,
                                          std::string_view project = "") const;

 private:
  explicit Cluster(ClusterSpec spec) : spec_(std::move(spec)) {}
  Status SpawnInstance(size_t i, int port);
  Status Provision(size_t i);

  ClusterSpec spec_;
  std::vector<Instance> instances_;
  std::unique_ptr<LoadBalancer> lb_;
};

// Polls GET /health until it answers or `timeout_ms` passes.
StatusOr<bool> WaitForHealth(const std::string& url, int timeout_ms);

}  // namespace barbie::cluster

#endif  // BARBIE_CLUSTER_CLUSTER_H_
