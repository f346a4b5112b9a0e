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

#include "barbie/cluster/load_balancer.h"

#include <httplib.h>

#include <condition_variable>
#include <mutex>
#include <random>
#include <thread>

namespace barbie::cluster {

std::string_view RoutingName(Routing routing) {
  switch (routing) {
    case Routing::kRoundRobin:
      return "ROUND_ROBIN";
    case Routing::kRandom:
      return "RANDOM";
    case Routing::kLeastOutstanding:
      return "LEAST_OUTSTANDING";
  }
  return "UNKNOWN";
}

StatusOr<Routing> RoutingFromName(std::string_view name) {
  for (Routing r : {Routing::kRoundRobin, Routing::kRandom, Routing::kLeastOutstanding}) {
    if (RoutingName(r) == name) return r;
  }
  return MakeError(ErrorCode::kInvalidArgument, "unknown routing " + std::string(name));
}

std::optional<std::string> FindCookie(std::string_view header, std::string_view name) {
  size_t pos = 0;
  while (pos < header.size()) {
    size_t end = header.find(';', pos);
    if (end == std::string_view::npos) end = header.size();
    std::string_view item = header.substr(pos, end - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    size_t eq = item.find('=');
    if (eq != std::string_view::npos && item.substr(0, eq) == name) {
      return std::string(item.substr(eq + 1));
    }
    pos = end + 1;
  }
  return std::nullopt;
}

class LoadBalancer::Impl {
 public:
  explicit Impl(LbConfig config)
      : config_(std::move(config)),
        state_(config_.backends.size()),
        rng_(config_.seed ? config_.seed : std::random_device{}()) {
    http_.set_keep_alive_max_count(1000);
    // Stop() waits out idle keep-alive connections; keep that short.
    http_.set_keep_alive_timeout(1);
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      Forward(req, res);
    };
    http_.Get(".*", forward);
    http_.Post(".*", forward);
  }

  ~Impl() { Stop(); }

  Status Start() {
    port_ = config_.listen_port
                ? (http_.bind_to_port(config_.listen_host, config_.listen_port)
                       ? config_.listen_port
                       : -1)
                : http_.bind_to_any_port(config_.listen_host);
    if (port_ < 0) return MakeError(ErrorCode::kIoError, "load balancer cannot bind");
    server_thread_ = std::thread([this] { http_.listen_after_bind(); });
    http_.wait_until_ready();
    if (config_.health_interval_ms > 0) {
      CheckHealth();
      health_thread_ = std::thread([this] { HealthLoop(); });
    }
    return OkStatus();
  }

  void Stop() {
    {
      std::lock_guard lock(stop_mu_);
      if (stopped_) return;
      stopped_ = true;
    }
    stop_cv_.notify_all();
    http_.stop();
    if (server_thread_.joinable()) server_thread_.join();
    if (health_thread_.joinable()) health_thread_.join();
    // Close pooled backend connections so backends can stop promptly too.
    for (auto& s : state_) {
      std::lock_guard lock(s.pool_mu);
      s.idle.clear();
    }
  }

  int port() const { return port_; }
  const LbConfig& config() const { return config_; }

  std::optional<size_t> Route(std::string_view cookie_header) {
    if (config_.honor_sticky) {
      if (auto node = FindCookie(cookie_header, config_.sticky_cookie_name)) {
        for (size_t i = 0; i < config_.backends.size(); ++i) {
          if (config_.backends[i].id == *node && state_[i].healthy) return i;
        }
      }
    }
    std::vector<size_t> up;
    for (size_t i = 0; i < state_.size(); ++i) {
      if (state_[i].healthy) up.push_back(i);
    }
    if (up.empty()) return std::nullopt;
    switch (config_.routing) {
      case Routing::kRoundRobin: {
        size_t n = config_.backends.size();
        for (size_t tries = 0; tries < n; ++tries) {
          size_t i = next_.fetch_add(1) % n;
          if (state_[i].healthy) return i;
        }
        return up.front();
      }
      case Routing::kRandom: {
        std::lock_guard lock(rng_mu_);
        return up[std::uniform_int_distribution<size_t>(0, up.size() - 1)(rng_)];
      }
      case Routing::kLeastOutstanding: {
        size_t best = up.front();
        for (size_t i : up) {
          if (state_[i].in_flight.load() < state_[best].in_flight.load()) best = i;
        }
        return best;
      }
    }
    return up.front();
  }

  void SetHealthy(size_t i, bool healthy) { state_.at(i).healthy = healthy; }
  bool healthy(size_t i) const { return state_.at(i).healthy; }

  std::vector<uint64_t> forwarded() const {
    std::vector<uint64_t> out;
    for (const auto& s : state_) out.push_back(s.forwarded.load());
    return out;
  }

 private:
  struct BackendState {
    std::atomic<bool> healthy{true};
    std::atomic<int> in_flight{0};
    std::atomic<uint64_t> forwarded{0};
    std::mutex pool_mu;
    std::vector<std::unique_ptr<httplib::Client>> idle;
  };

  std::unique_ptr<httplib::Client> Acquire(size_t i) {
    BackendState& s = state_[i];
    {
      std::lock_guard lock(s.pool_mu);
      if (!s.idle.empty()) {
        auto c = std::move(s.idle.back());
        s.idle.pop_back();
        return c;
      }
    }
    const Backend& b = config_.backends[i];
    auto c = std::make_unique<httplib::Client>(b.host, b.port);
    c->set_keep_alive(true);
    c->set_connection_timeout(5, 0);
    c->set_read_timeout(60, 0);
    return c;
  }

  void Release(size_t i, std::unique_ptr<httplib::Client> c) {
    std::lock_guard lock(state_[i].pool_mu);
    state_[i].idle.push_back(std::move(c));
  }

  static std::string HeaderOr(const httplib::Headers& headers, const char* name,
                              const char* fallback) {
    auto it = headers.find(name);
    return it == headers.end() ? fallback : it->second;
  }

  static void ErrorBody(httplib::Response& res, int status, std::string_view code,
                        const std::string& message) {
    res.status = status;
    res.set_content("{\"error\":\"" + std::string(code) + "\",\"message\":\"" + message + "\"}",
                    "application/json");
  }

  void Forward(const httplib::Request& req, httplib::Response& res) {
    std::optional<size_t> target = Route(req.get_header_value("Cookie"));
    if (!target) return ErrorBody(res, 503, "unavailable", "no healthy backend");
    size_t i = *target;
    BackendState& s = state_[i];
    ++s.in_flight;
    ++s.forwarded;

    httplib::Headers headers;
    for (const char* name : {"Cookie", "X-Auth-Token"}) {
      if (req.has_header(name)) headers.emplace(name, req.get_header_value(name));
    }
    std::string path = req.target.empty() ? req.path : req.target;
    auto client = Acquire(i);
    httplib::Result result =
        req.method == "GET"
            ? client->Get(path, headers)
            : client->Post(path, headers, req.body,
                           HeaderOr(req.headers, "Content-Type", "application/json"));
    --s.in_flight;
    if (!result) {
      s.healthy = false;
      return ErrorBody(res, 502, "transport-error",
                       "backend " + config_.backends[i].id + " unreachable");
    }
    Release(i, std::move(client));
    res.status = result->status;
    if (result->has_header("Set-Cookie")) {
      res.set_header("Set-Cookie", result->get_header_value("Set-Cookie"));
    }
    res.set_header("X-Barbie-Backend", config_.backends[i].id);
    res.set_content(result->body, HeaderOr(result->headers, "Content-Type", "application/json"));
  }

  void CheckHealth() {
    for (size_t i = 0; i < config_.backends.size(); ++i) {
      const Backend& b = config_.backends[i];
      httplib::Client c(b.host, b.port);
      c.set_connection_timeout(1, 0);
      c.set_read_timeout(2, 0);
      auto r = c.Get("/health");
      state_[i].healthy = r && r->status == 200;
    }
  }

  void HealthLoop() {
    std::unique_lock lock(stop_mu_);
    while (!stop_cv_.wait_for(lock, std::chrono::milliseconds(config_.health_interval_ms),
                              [this] { return stopped_; })) {
      lock.unlock();
      CheckHealth();
      lock.lock();
    }
  }

  LbConfig config_;
  std::vector<BackendState> state_;
  std::atomic<size_t> next_{0};
  std::mutex rng_mu_;
  std::mt19937_64 rng_;

  httplib::Server http_;
  int port_ = -1;
  std::thread server_thread_;
  std::thread health_thread_;
  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
  bool stopped_ = false;
};

StatusOr<std::unique_ptr<LoadBalancer>> LoadBalancer::Create(LbConfig config) {
  if (config.backends.empty()) {
    return MakeError(ErrorCode::kInvalidArgument, "load balancer needs at least one backend");
  }
  return std::unique_ptr<LoadBalancer>(new LoadBalancer(std::make_unique<Impl>(std::move(config))));
}

LoadBalancer::LoadBalancer(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
LoadBalancer::~LoadBalancer() = default;
Status LoadBalancer::Start() { return impl_->Start(); }
void LoadBalancer::Stop() { impl_->Stop(); }
int LoadBalancer::port() const { return impl_->port(); }
std::string LoadBalancer::base_url() const {
  return "http://" + impl_->config().listen_host + ":" + std::to_string(impl_->port());
}
std::optional<size_t> LoadBalancer::Route(std::string_view cookie_header) {
  return impl_->Route(cookie_header);
}
void LoadBalancer::SetHealthy(size_t backend, bool healthy) { impl_->SetHealthy(backend, healthy); }
bool LoadBalancer::healthy(size_t backend) const { return impl_->healthy(backend); }
std::vector<uint64_t> LoadBalancer::forwarded() const { return impl_->forwarded(); }
const LbConfig& LoadBalancer::config() const { return impl_->config(); }

}  // namespace barbie::cluster
