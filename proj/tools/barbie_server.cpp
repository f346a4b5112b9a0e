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

#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "barbie/enclave/enclave_sim.h"
#include "barbie/server/config.h"
#include "barbie/server/server.h"

namespace {

using nlohmann::json;
using namespace barbie;

int Fail(const Status& status) {
  std::cerr << json{{"error", std::string(ErrorCodeName(status.code()))},
                    {"message", status.message()}}
                   .dump()
            << "\n";
  return 1;
}

int Serve(const std::string& config_path) {
  auto config = server::LoadConfig(config_path);
  if (!config.ok()) return Fail(config.status());

  // SIGTERM and SIGINT are taken synchronously by a watcher thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto srv = server::Server::Create(*config);
  if (!srv.ok()) return Fail(srv.status());
  if (Status st = (*srv)->Bind(); !st.ok()) return Fail(st);

  kms::TrustedCore& core = (*srv)->core();
  json line{{"event", "listening"},
            {"instance_id", config->instance_id},
            {"port", (*srv)->port()},
            {"kek_present", core.kek_present()}};
  if (!core.kek_present()) line["kek_missing_reason"] = core.kek_missing_reason();
  std::cout << line.dump() << std::endl;

  server::Server* raw = srv->get();
  std::thread watcher([raw, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    raw->Stop();
  });
  raw->Run();
  // Run() also returns when the listener fails; wake the watcher.
  kill(getpid(), SIGTERM);
  watcher.join();
  return 0;
}

int PrintIdentity(const std::string& config_path) {
  auto config = server::LoadConfig(config_path);
  if (!config.ok()) return Fail(config.status());
  auto enclave = server::LoadInstanceEnclave(*config);
  if (!enclave.ok()) return Fail(enclave.status());
  std::cout << json{{"mr_enclave", HexEncode(enclave->identity().mr_enclave)},
                    {"mr_signer", HexEncode(enclave->identity().mr_signer)},
                    {"isv_svn", enclave->identity().isv_svn}}
                   .dump()
            << "\n";
  return 0;
}

int InitPlatform(const std::string& out, const std::string& authority_out,
                 std::optional<uint64_t> seed) {
  SeededRandom seeded(seed.value_or(0));
  enclave::PlatformState platform =
      seed ? enclave::PlatformState::Generate(seeded) : enclave::PlatformState::Generate();
  if (Status st = enclave::SavePlatform(platform, out); !st.ok()) return Fail(st);
  if (!authority_out.empty()) {
    if (Status st = enclave::SaveAuthorityPublicKey(platform, authority_out); !st.ok()) {
      return Fail(st);
    }
  }
  std::cout << json{{"platform_file", out},
                    {"authority_public_key", Base64Encode(platform.authority_public_key())}}
                   .dump()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barbie key management server"};
  std::string config_path;
  app.add_option("--config", config_path, "Instance config JSON");
  app.require_subcommand(0, 1);

  auto* identity = app.add_subcommand("identity", "Print the enclave measurement and signer");
  identity->add_option("--config", config_path, "Instance config JSON")->required();

  std::string platform_out;
  std::string authority_out;
  std::optional<uint64_t> seed;
  auto* init = app.add_subcommand("init-platform", "Create a simulated SGX platform file");
  init->add_option("--out", platform_out, "Platform file to write")->required();
  init->add_option("--authority-out", authority_out, "Also write the authority public key");
  init->add_option("--seed", seed, "Deterministic platform secrets");

  CLI11_PARSE(app, argc, argv);
  if (*identity) return PrintIdentity(config_path);
  if (*init) return InitPlatform(platform_out, authority_out, seed);
  if (config_path.empty()) {
    std::cerr << "--config is required\n";
    return 1;
  }
  return Serve(config_path);
}
