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

#ifndef BARBIE_TESTS_SUPPORT_DEPLOYMENT_H_
#define BARBIE_TESTS_SUPPORT_DEPLOYMENT_H_

#include <filesystem>
#include <memory>
#include <string>

#include "barbie/client/client.h"
#include "barbie/server/server.h"

namespace barbie::testing {

inline constexpr std::string_view kAdminToken = "admin-token";
inline constexpr std::string_view kAlphaToken = "token-alpha";
inline constexpr std::string_view kBetaToken = "token-beta";

// A scratch directory with one platform file and one shared store, from
// which in-process instances and matching client profiles are made.
class Deployment {
 public:
  explicit Deployment(std::string_view name, uint64_t platform_seed = 1);
  ~Deployment();

  // A second machine: its own platform file, same store.
  std::filesystem::path NewPlatformFile(std::string_view name, uint64_t seed);

  server::InstanceConfig Config(std::string_view instance_id,
                                kms::KekMode mode = kms::KekMode::kSealDerived) const;
  std::unique_ptr<server::Server> Launch(const server::InstanceConfig& config,
                                         RandomSource& rng = DefaultRandom()) const;

  const enclave::PlatformState& platform() const { return *platform_; }
  enclave::EnclaveIdentity ServerIdentity() const;
  enclave::EnclaveHandle LocalEnclave(std::string_view manifest, std::string_view signer,
                                      uint16_t isv_svn) const;
  client::ClientProfile Profile(client::Mode mode, std::string_view token,
                                std::string_view project = "") const;

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path store_root() const { return root_ / "store"; }
  const std::filesystem::path& platform_file() const { return platform_file_; }

 private:
  std::filesystem::path root_;
  std::filesystem::path platform_file_;
  std::shared_ptr<const enclave::PlatformState> platform_;
};

}  // namespace barbie::testing

#endif  // BARBIE_TESTS_SUPPORT_DEPLOYMENT_H_
