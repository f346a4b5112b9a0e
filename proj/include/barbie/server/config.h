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

#ifndef BARBIE_SERVER_CONFIG_H_
#define BARBIE_SERVER_CONFIG_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "barbie/enclave/enclave_sim.h"
#include "barbie/kms/kek.h"

namespace barbie::server {

// Manifest measured when enclave_manifest is empty.
inline constexpr std::string_view kDefaultManifest = "barbie-kms-enclave\nversion=1\n";
inline constexpr std::string_view kDefaultSignerKey = "barbie-release-signing-key";

struct InstanceConfig {
  std::string instance_id = "node0";
  std::string listen_address = "127.0.0.1:0";  // host:port; port 0 picks one
  std::filesystem::path store_root;
  std::filesystem::path platform_file;
  std::filesystem::path enclave_manifest;  // empty: kDefaultManifest
  std::string enclave_signer_key = std::string(kDefaultSignerKey);
  uint16_t enclave_isv_svn = 1;
  kms::KekMode kek_mode = kms::KekMode::kSealDerived;
  // Empty: <store_root>/instances/<instance_id>/sealed_kek.json
  std::filesystem::path sealed_kek_path;
  std::string admin_token;
  std::map<std::string, std::string> keystone_tokens;  // token -> project
  // Authorities whose quotes are accepted from client enclaves. The
  // instance's own platform authority is always trusted.
  std::vector<std::filesystem::path> trusted_authority_files;
  std::string v1_backend = "enclave";  // or "simple_crypto"
  std::string simple_crypto_key;       // 64 hex chars, simple_crypto only
  bool per_project_keks = false;
  int64_t session_ttl_seconds = 3600;
  int64_t handshake_idle_seconds = 300;
  std::filesystem::path request_log;  // empty: no log; "-": stderr

  std::string host() const;
  int port() const;
  std::filesystem::path EffectiveSealedKekPath() const;
};

// Reads the JSON config, then applies BARBIE_LISTEN_ADDRESS and
// BARBIE_STORE_ROOT from the environment. Relative paths resolve against
// the config file's directory.
StatusOr<InstanceConfig> LoadConfig(const std::filesystem::path& path);
StatusOr<InstanceConfig> ConfigFromJson(std::string_view json,
                                        const std::filesystem::path& base_dir = {});
std::string ConfigToJson(const InstanceConfig& config);
void ApplyEnvironmentOverrides(InstanceConfig& config);

StatusOr<enclave::EnclaveHandle> LoadInstanceEnclave(const InstanceConfig& config);

}  // namespace barbie::server

#endif  // BARBIE_SERVER_CONFIG_H_
