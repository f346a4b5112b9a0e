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

#include "barbie/server/config.h"

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "barbie/common/file_util.h"

namespace barbie::server {

using nlohmann::json;

namespace {

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  if (p.empty() || p.is_absolute() || base.empty() || value == "-") return p;
  return base / p;
}

}  // namespace

std::string InstanceConfig::host() const {
  auto colon = listen_address.rfind(':');
  return colon == std::string::npos ? listen_address : listen_address.substr(0, colon);
}

int InstanceConfig::port() const {
  auto colon = listen_address.rfind(':');
  if (colon == std::string::npos) return 0;
  return std::atoi(listen_address.c_str() + colon + 1);
}

std::filesystem::path InstanceConfig::EffectiveSealedKekPath() const {
  if (!sealed_kek_path.empty()) return sealed_kek_path;
  return store_root / "instances" / instance_id / "sealed_kek.json";
}

StatusOr<InstanceConfig> ConfigFromJson(std::string_view text,
                                        const std::filesystem::path& base_dir) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return MakeError(ErrorCode::kInvalidArgument, "config is not a JSON object");
  }
  InstanceConfig c;
  try {
    c.instance_id = j.value("instance_id", c.instance_id);
    c.listen_address = j.value("listen_address", c.listen_address);
    c.store_root = Resolve(base_dir, j.value("store_root", std::string()));
    c.platform_file = Resolve(base_dir, j.value("platform_file", std::string()));
    c.enclave_manifest = Resolve(base_dir, j.value("enclave_manifest", std::string()));
    c.enclave_signer_key = j.value("enclave_signer_key", c.enclave_signer_key);
    c.enclave_isv_svn = j.value("enclave_isv_svn", c.enclave_isv_svn);
    if (j.contains("kek_mode")) {
      BARBIE_ASSIGN_OR_RETURN(c.kek_mode, kms::KekModeFromName(j["kek_mode"].get<std::string>()));
    }
    c.sealed_kek_path = Resolve(base_dir, j.value("sealed_kek_path", std::string()));
    c.admin_token = j.value("admin_token", std::string());
    if (j.contains("keystone_tokens")) {
      c.keystone_tokens = j["keystone_tokens"].get<std::map<std::string, std::string>>();
    }
    for (const auto& f : j.value("trusted_authority_files", std::vector<std::string>())) {
      c.trusted_authority_files.push_back(Resolve(base_dir, f));
    }
    c.v1_backend = j.value("v1_backend", c.v1_backend);
    c.simple_crypto_key = j.value("simple_crypto_key", std::string());
    c.per_project_keks = j.value("per_project_keks", false);
    c.session_ttl_seconds = j.value("session_ttl_seconds", c.session_ttl_seconds);
    c.handshake_idle_seconds = j.value("handshake_idle_seconds", c.handshake_idle_seconds);
    c.request_log = Resolve(base_dir, j.value("request_log", std::string()));
  } catch (const json::exception& e) {
    return MakeError(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  if (c.instance_id.empty() || c.instance_id.find_first_of(";,= \t") != std::string::npos) {
    return MakeError(ErrorCode::kInvalidArgument, "instance_id must be a cookie-safe token");
  }
  if (c.store_root.empty()) return MakeError(ErrorCode::kInvalidArgument, "store_root is required");
  if (c.platform_file.empty()) {
    return MakeError(ErrorCode::kInvalidArgument, "platform_file is required");
  }
  if (c.v1_backend != "enclave" && c.v1_backend != "simple_crypto") {
    return MakeError(ErrorCode::kInvalidArgument, "v1_backend must be enclave or simple_crypto");
  }
  if (c.v1_backend == "simple_crypto" && c.simple_crypto_key.size() != 64) {
    return MakeError(ErrorCode::kInvalidArgument, "simple_crypto_key must be 64 hex chars");
  }
  return c;
}

std::string ConfigToJson(const InstanceConfig& c) {
  json j;
  j["instance_id"] = c.instance_id;
  j["listen_address"] = c.listen_address;
  j["store_root"] = c.store_root.string();
  j["platform_file"] = c.platform_file.string();
  if (!c.enclave_manifest.empty()) j["enclave_manifest"] = c.enclave_manifest.string();
  j["enclave_signer_key"] = c.enclave_signer_key;
  j["enclave_isv_svn"] = c.enclave_isv_svn;
  j["kek_mode"] = std::string(kms::KekModeName(c.kek_mode));
  if (!c.sealed_kek_path.empty()) j["sealed_kek_path"] = c.sealed_kek_path.string();
  j["admin_token"] = c.admin_token;
  j["keystone_tokens"] = c.keystone_tokens;
  std::vector<std::string> authorities;
  for (const auto& f : c.trusted_authority_files) authorities.push_back(f.string());
  j["trusted_authority_files"] = authorities;
  j["v1_backend"] = c.v1_backend;
  if (!c.simple_crypto_key.empty()) j["simple_crypto_key"] = c.simple_crypto_key;
  j["per_project_keks"] = c.per_project_keks;
  j["session_ttl_seconds"] = c.session_ttl_seconds;
  j["handshake_idle_seconds"] = c.handshake_idle_seconds;
  if (!c.request_log.empty()) j["request_log"] = c.request_log.string();
  return j.dump(2);
}

void ApplyEnvironmentOverrides(InstanceConfig& config) {
  if (const char* listen = std::getenv("BARBIE_LISTEN_ADDRESS"); listen && *listen) {
    config.listen_address = listen;
  }
  if (const char* root = std::getenv("BARBIE_STORE_ROOT"); root && *root) {
    config.store_root = root;
  }
}

StatusOr<InstanceConfig> LoadConfig(const std::filesystem::path& path) {
  BARBIE_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  BARBIE_ASSIGN_OR_RETURN(InstanceConfig config, ConfigFromJson(text, path.parent_path()));
  ApplyEnvironmentOverrides(config);
  return config;
}

StatusOr<enclave::EnclaveHandle> LoadInstanceEnclave(const InstanceConfig& config) {
  BARBIE_ASSIGN_OR_RETURN(enclave::PlatformState platform,
                          enclave::LoadPlatform(config.platform_file));
  std::string manifest(kDefaultManifest);
  if (!config.enclave_manifest.empty()) {
    BARBIE_ASSIGN_OR_RETURN(manifest, ReadFile(config.enclave_manifest));
  }
  return enclave::LoadEnclave(AsBytes(manifest), AsBytes(config.enclave_signer_key),
                              config.enclave_isv_svn,
                              std::make_shared<const enclave::PlatformState>(platform));
}

}  // namespace barbie::server
