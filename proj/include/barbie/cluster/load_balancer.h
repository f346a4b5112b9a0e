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

#ifndef BARBIE_CLUSTER_LOAD_BALANCER_H_
#define BARBIE_CLUSTER_LOAD_BALANCER_H_

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "barbie/common/status.h"

namespace barbie::cluster {

enum class Routing { kRoundRobin, kRandom, kLeastOutstanding };

std::string_view RoutingName(Routing routing);
StatusOr<Routing> RoutingFromName(std::string_view name);

struct Backend {
  std::string id;  // the instance_id carried in the sticky cookie
  std::string host = "127.0.0.1";
  int port = 0;
};

struct LbConfig {
  std::vector<Backend> backends;
  Routing routing = Routing::kRoundRobin;
  std::string sticky_cookie_name = "barbie_node";
  bool honor_sticky = true;
  std::string listen_host = "127.0.0.1";
  int listen_port = 0;
  int health_interval_ms = 500;  // 0 disables periodic checks
  uint64_t seed = 0;             // RANDOM routing; 0 seeds from the OS
};

// Value of cookie `name` in a Cookie request header, if present.
std::optional<std::string> FindCookie(std::string_view header, std::string_view name);

// HTTP reverse proxy. A request carrying the sticky cookie goes to that
// backend when it is healthy; all others follow the routing policy over
// healthy backends. No healthy backend gives 503.
class LoadBalancer {
 public:
  static StatusOr<std::unique_ptr<LoadBalancer>> Create(LbConfig config);
  ~LoadBalancer();

  Status Start();
  void Stop();
  int port() const;
  std::string base_url() const;

  // The backend index the next request with this Cookie header would use.
  // Advances round-robin state.
  std::optional<size_t> Route(std::string_view cookie_header);
  void SetHealthy(size_t backend, bool healthy);
  bool healthy(size_t backend) const;
  // Requests forwarded to each backend so far.
  std::vector<uint64_t> forwarded() const;
  const LbConfig& config() const;

 private:
  class Impl;
  explicit LoadBalancer(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace barbie::cluster

#endif  // BARBIE_CLUSTER_LOAD_BALANCER_H_
