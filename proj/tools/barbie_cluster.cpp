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

#include <signal.h>

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "barbie/cluster/bench.h"
#include "barbie/cluster/cluster.h"
#include "barbie/common/file_util.h"
#include "barbie/enclave/enclave_sim.h"

namespace {

using nlohmann::json;
using namespace barbie;
namespace fs = std::filesystem;

constexpr std::string_view kBenchToken = "token-bench";
constexpr std::string_view kBenchProject = "bench";

int Report(const Status& status) {
  std::cerr << json{{"error", std::string(ErrorCodeName(status.code()))},
                    {"message", status.message()}}
                   .dump()
            << "\n";
  return 1;
}

struct LaunchOptions {
  int n = 1;
  std::string store;
  std::string work_dir;
  std::string server_binary;
  std::vector<std::string> platforms;
  bool platform_per_instance = false;
  std::string kek_mode = "SEAL_DERIVED";
  std::string kek_hex;
  std::string admin_token = "admin-token";
  std::vector<std::string> tokens;  // token=project
  std::string routing = "ROUND_ROBIN";
  bool no_sticky = false;
  uint64_t lb_seed = 0;
  int lb_port = 0;
};

void AddLaunchOptions(CLI::App* cmd, LaunchOptions& o) {
  cmd->add_option("--n", o.n, "Number of instances")->capture_default_str();
  cmd->add_option("--store", o.store, "Shared store root");
  cmd->add_option("--work-dir", o.work_dir, "Configs, logs and sealed KEKs (default <store>/cluster)");
  cmd->add_option("--server-binary", o.server_binary, "barbie-server executable");
  cmd->add_option("--platform", o.platforms, "Platform file: one shared, or one per instance");
  cmd->add_flag("--platform-per-instance", o.platform_per_instance,
                "Generate a distinct platform for every instance");
  cmd->add_option("--kek-mode", o.kek_mode, "SEAL_DERIVED or ADMIN_PROVISIONED")
      ->capture_default_str();
  cmd->add_option("--kek", o.kek_hex, "Provision this KEK (64 hex) to every instance");
  cmd->add_option("--admin-token", o.admin_token)->capture_default_str();
  cmd->add_option("--token", o.tokens, "Keystone token mapping token=project, repeatable");
  cmd->add_option("--routing", o.routing, "ROUND_ROBIN, RANDOM or LEAST_OUTSTANDING")
      ->capture_default_str();
  cmd->add_flag("--no-sticky", o.no_sticky, "Ignore the sticky cookie");
  cmd->add_option("--lb-seed", o.lb_seed, "Seed for RANDOM routing");
  cmd->add_option("--lb-port", o.lb_port, "Load balancer port (0 picks one)");
}

StatusOr<cluster::ClusterSpec> BuildSpec(LaunchOptions o) {
  cluster::ClusterSpec spec;
  spec.n = o.n;
  if (o.store.empty()) {
    o.store = (fs::temp_directory_path() / ("barbie-cluster-" + std::to_string(::getpid()))).string();
  }
  spec.store_root = fs::absolute(o.store);
  spec.work_dir = o.work_dir.empty() ? spec.store_root / "cluster" : fs::absolute(o.work_dir);
  fs::create_directories(spec.work_dir);
  spec.server_binary = o.server_binary.empty()
                           ? fs::read_symlink("/proc/self/exe").parent_path() / "barbie-server"
                           : fs::path(o.server_binary);
  if (!o.platforms.empty()) {
    for (const auto& p : o.platforms) spec.platform_files.push_back(fs::absolute(p));
  } else {
    int count = o.platform_per_instance ? o.n : 1;
    for (int i = 0; i < count; ++i) {
      fs::path path = spec.work_dir / ("platform" + std::to_string(i) + ".json");
      if (!fs::exists(path)) {
        BARBIE_RETURN_IF_ERROR(enclave::SavePlatform(enclave::PlatformState::Generate(), path));
      }
      spec.platform_files.push_back(path);
    }
  }
  BARBIE_ASSIGN_OR_RETURN(spec.kek_mode, kms::KekModeFromName(o.kek_mode));
  if (!o.kek_hex.empty()) spec.kek_hex = o.kek_hex;
  spec.admin_token = o.admin_token;
  spec.keystone_tokens[std::string(kBenchToken)] = std::string(kBenchProject);
  for (const auto& t : o.tokens) {
    size_t eq = t.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == t.size()) {
      return MakeError(ErrorCode::kInvalidArgument, "--token wants token=project");
    }
    spec.keystone_tokens[t.substr(0, eq)] = t.substr(eq + 1);
  }
  BARBIE_ASSIGN_OR_RETURN(spec.routing, cluster::RoutingFromName(o.routing));
  spec.honor_sticky = !o.no_sticky;
  spec.lb_seed = o.lb_seed;
  spec.lb_port = o.lb_port;
  return spec;
}

json Describe(cluster::Cluster& c) {
  json instances = json::array();
  for (const auto& inst : c.instances()) {
    instances.push_back({{"id", inst.id}, {"url", inst.url}, {"pid", inst.pid},
                         {"platform_file", inst.platform_file.string()}});
  }
  return json{{"event", "up"},
              {"lb_url", c.lb().base_url()},
              {"store_root", c.spec().store_root.string()},
              {"routing", std::string(cluster::RoutingName(c.spec().routing))},
              {"honor_sticky", c.spec().honor_sticky},
              {"instances", instances}};
}

int Up(const LaunchOptions& o) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto spec = BuildSpec(o);
  if (!spec.ok()) return Report(spec.status());
  auto c = cluster::Cluster::Launch(*spec);
  if (!c.ok()) return Report(c.status());
  std::cout << Describe(**c).dump() << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  (*c)->Shutdown();
  return 0;
}

int Bench(const LaunchOptions& o, const cluster::BenchOptions& base, const std::string& out) {
  auto spec = BuildSpec(o);
  if (!spec.ok()) return Report(spec.status());
  auto c = cluster::Cluster::Launch(*spec);
  if (!c.ok()) return Report(c.status());
  cluster::BenchOptions b = base;
  b.target_url = (*c)->lb().base_url();
  client::Mode mode = b.workload == cluster::Workload::kV1Store      ? client::Mode::kLegacy
                      : b.workload == cluster::Workload::kV2RaStore ? client::Mode::kAware
                                                                     : client::Mode::kEnabled;
  auto profile = (*c)->Profile(mode, kBenchToken, kBenchProject);
  if (!profile.ok()) return Report(profile.status());
  b.profile = *profile;
  auto report = cluster::RunBench(b);
  if (!report.ok()) return Report(report.status());
  json j = report->ToJson();
  j["instances"] = o.n;
  j["routing"] = o.routing;
  if (!out.empty()) {
    if (Status st = WriteFileAtomic(out, j.dump(2)); !st.ok()) return Report(st);
  }
  std::cout << j.dump() << std::endl;
  return report->degraded ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barbie cluster launcher and benchmark"};
  app.require_subcommand(1);

  LaunchOptions launch;
  auto* up = app.add_subcommand("up", "Launch instances behind a load balancer and wait");
  AddLaunchOptions(up, launch);

  cluster::BenchOptions bench_opts;
  std::string workload = "v2-ra-store";
  std::string out;
  std::string csv;
  auto* bench = app.add_subcommand("bench", "Launch a cluster and benchmark it");
  AddLaunchOptions(bench, launch);
  bench->add_option("--users", bench_opts.users)->capture_default_str();
  bench->add_option("--concurrency", bench_opts.concurrency)->capture_default_str();
  bench->add_option("--requests", bench_opts.requests_per_user, "Requests per user")
      ->capture_default_str();
  bench->add_option("--workload", workload, "v1-store, v2-ra-store or v2-ma-roundtrip")
      ->capture_default_str();
  bench->add_option("--out", out, "Report JSON");
  bench->add_option("--csv", csv, "Per-request latency CSV");

  CLI11_PARSE(app, argc, argv);
  if (*up) return Up(launch);
  auto w = cluster::WorkloadFromName(workload);
  if (!w.ok()) return Report(w.status());
  bench_opts.workload = *w;
  bench_opts.csv_path = csv;
  return Bench(launch, bench_opts, out);
}
