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

#ifndef BARBIE_SERVER_SERVER_H_
#define BARBIE_SERVER_SERVER_H_

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "barbie/kms/trusted_core.h"
#include "barbie/server/config.h"

namespace barbie::server {

inline constexpr std::string_view kStickyCookie = "barbie_node";
inline constexpr std::string_view kAuthHeader = "X-Auth-Token";

// HTTP status for an error code. The JSON error body carries the code name.
int HttpStatusFor(ErrorCode code);

// One exchanged request/response pair, as seen by the server.
struct Exchange {
  std::string method;
  std::string path;
  std::string request_body;
  int status = 0;
  std::string response_body;
  std::string set_cookie;
};
using ExchangeObserver = std::function<void(const Exchange&)>;

// One SGX-Barbican instance: v1 and v2 REST endpoints over a TrustedCore.
class Server {
 public:
  static StatusOr<std::unique_ptr<Server>> Create(InstanceConfig config,
                                                  RandomSource& rng = DefaultRandom());
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the listen address; port() is valid afterwards.
  Status Bind();
  // Serves until Stop(). Requires Bind().
  void Run();
  // Bind() plus Run() on a background thread.
  Status Start();
  void Stop();

  int port() const;
  std::string base_url() const;
  const InstanceConfig& config() const;
  kms::TrustedCore& core();
  // Observes every exchange after the response is produced. Set before Start().
  void SetObserver(ExchangeObserver observer);

 private:
  class Impl;
  explicit Server(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace barbie::server

#endif  // BARBIE_SERVER_SERVER_H_
