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

#include "barbie/cluster/bench.h"

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <thread>

#include "barbie/common/file_util.h"
#include "barbie/kms/envelope.h"

namespace barbie::cluster {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string_view WorkloadName(Workload workload) {
  switch (workload) {
    case Workload::kV1Store:
      return "v1-store";
    case Workload::kV2RaStore:
      return "v2-ra-store";
    case Workload::kV2MaRoundtrip:
      return "v2-ma-roundtrip";
  }
  return "unknown";
}

StatusOr<Workload> WorkloadFromName(std::string_view name) {
  for (Workload w : {Workload::kV1Store, Workload::kV2RaStore, Workload::kV2MaRoundtrip}) {
    if (WorkloadName(w) == name) return w;
  }
  return MakeError(ErrorCode::kInvalidArgument, "unknown workload " + std::string(name));
}

json BenchReport::ToJson() const {
  return json{{"workload", workload},
              {"target", target},
              {"concurrency_level", concurrency_level},
              {"users", users},
              {"requests_per_user", requests_per_user},
              {"mean_processing_time_ms", mean_processing_time_ms},
              {"mean_connect_time_ms", mean_connect_time_ms},
              {"mean_time_per_request_ms", mean_time_per_request_ms},
              {"requests_per_second", requests_per_second},
              {"mean_time_across_connections_ms", mean_time_across_connections_ms},
              {"total_body_bytes", total_body_bytes},
              {"total_time_s", total_time_s},
              {"completed", completed},
              {"failed", failed},
              {"degraded", degraded}};
}

namespace {

double Ms(Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

struct Endpoint {
  std::string host;
  std::string port;
};

StatusOr<Endpoint> ParseUrl(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    return MakeError(ErrorCode::kInvalidArgument, "bench target must be http://host:port");
  }
  url.remove_prefix(kScheme.size());
  if (!url.empty() && url.back() == '/') url.remove_suffix(1);
  size_t colon = url.rfind(':');
  if (colon == std::string_view::npos || colon + 1 == url.size()) {
    return MakeError(ErrorCode::kInvalidArgument, "bench target needs a port");
  }
  return Endpoint{std::string(url.substr(0, colon)), std::string(url.substr(colon + 1))};
}

struct RawResponse {
  int status = 0;
  std::string body;
};

// One request on a fresh connection with Connection: close. Fills the
// connect and total timers of `sample`.
StatusOr<RawResponse> SendOnce(const Endpoint& ep, const std::string& request,
                               LatencySample& sample) {
  auto t0 = Clock::now();
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* addrs = nullptr;
  if (::getaddrinfo(ep.host.c_str(), ep.port.c_str(), &hints, &addrs) != 0) {
    return MakeError(ErrorCode::kTransportError, "cannot resolve " + ep.host);
  }
  int fd = -1;
  for (addrinfo* a = addrs; a; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(addrs);
  auto t1 = Clock::now();
  sample.connect_ms = Ms(t1 - t0);
  if (fd < 0) {
    sample.total_ms = sample.connect_ms;
    return MakeError(ErrorCode::kTransportError, "connect failed");
  }
  size_t sent = 0;
  while (sent < request.size()) {
    ssize_t n = ::send(fd, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) {
      ::close(fd);
      sample.total_ms = Ms(Clock::now() - t0);
      return MakeError(ErrorCode::kTransportError, "send failed");
    }
    sent += size_t(n);
  }
  std::string raw;
  char buf[8192];
  while (true) {
    ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n < 0) {
      ::close(fd);
      sample.total_ms = Ms(Clock::now() - t0);
      return MakeError(ErrorCode::kTransportError, "recv failed");
    }
    if (n == 0) break;
    raw.append(buf, size_t(n));
  }
  ::close(fd);
  sample.total_ms = Ms(Clock::now() - t0);
  sample.processing_ms = sample.total_ms - sample.connect_ms;

  size_t split = raw.find("\r\n\r\n");
  size_t sp = raw.find(' ');
  if (split == std::string::npos || sp == std::string::npos || sp + 4 > raw.size()) {
    return MakeError(ErrorCode::kTransportError, "malformed response");
  }
  RawResponse out;
  out.status = std::atoi(raw.c_str() + sp + 1);
  out.body = raw.substr(split + 4);
  return out;
}

std::string BuildRequest(const Endpoint& ep, std::string_view method, std::string_view path,
                         const std::string& token, const std::string& body) {
  std::string r = std::string(method) + " " + std::string(path) + " HTTP/1.1\r\n";
  r += "Host: " + ep.host + ":" + ep.port + "\r\n";
  r += "Connection: close\r\n";
  if (!token.empty()) r += "X-Auth-Token: " + token + "\r\n";
  if (method == "POST") {
    r += "Content-Type: application/json\r\n";
    r += "Content-Length: " + std::to_string(body.size()) + "\r\n";
  }
  r += "\r\n";
  r += body;
  return r;
}

// State prepared for one user stream before the clock starts.
struct UserStream {
  client::ClientSession session;
  std::string ref;  // V2_MA_ROUNDTRIP: the secret each request fetches
  Bytes plaintext;
};

StatusOr<UserStream> SetUp(const BenchOptions& options) {
  UserStream user;
  user.plaintext = DefaultRandom().Generate(options.payload_bytes);
  if (options.workload == Workload::kV1Store) return user;
  client::HttpTransport transport(options.target_url);
  client::Client c(options.profile, transport);
  BARBIE_ASSIGN_OR_RETURN(user.session, c.Attest());
  if (options.workload == Workload::kV2MaRoundtrip) {
    BARBIE_ASSIGN_OR_RETURN(user.ref, c.StoreSecret(user.session, "bench", user.plaintext));
  }
  return user;
}

// Builds one measured request and checks its response.
class RequestFactory {
 public:
  RequestFactory(const BenchOptions& options, const Endpoint& ep, const UserStream& user)
      : options_(options), ep_(ep), user_(user) {}

  StatusOr<std::string> Build(int seq) const {
    std::string name = "bench-" + std::to_string(seq);
    switch (options_.workload) {
      case Workload::kV1Store: {
        json body{{"payload", Base64Encode(user_.plaintext)},
                  {"name", name},
                  {"content_type", "application/octet-stream"}};
        return BuildRequest(ep_, "POST", "/v1/secrets", options_.profile.token, body.dump());
      }
      case Workload::kV2RaStore: {
        BARBIE_ASSIGN_OR_RETURN(Bytes sealed, kms::SealForStore(user_.session.sk, user_.plaintext));
        json body{{"session_id", user_.session.session_id},
                  {"sk_secret", Base64Encode(sealed)},
                  {"name", name},
                  {"content_type", "application/octet-stream"}};
        return BuildRequest(ep_, "POST", "/v2/secrets", options_.profile.token, body.dump());
      }
      case Workload::kV2MaRoundtrip:
        return BuildRequest(ep_, "GET",
                            "/v2/secrets/" + user_.ref + "?session_id=" + user_.session.session_id,
                            options_.profile.token, "");
    }
    return MakeError(ErrorCode::kInternal, "unknown workload");
  }

  bool Check(const RawResponse& r) const {
    if (r.status != 200) return false;
    json j = json::parse(r.body, nullptr, false);
    if (j.is_discarded()) return false;
    if (options_.workload != Workload::kV2MaRoundtrip) return j.contains("secret_ref");
    if (!j.contains("sk_secret") || !j["sk_secret"].is_string()) return false;
    auto sealed = Base64Decode(j["sk_secret"].get<std::string>());
    if (!sealed.ok()) return false;
    auto plain = kms::OpenRetrieved(user_.session.sk, *sealed, user_.ref);
    return plain.ok() && *plain == user_.plaintext;
  }

 private:
  const BenchOptions& options_;
  const Endpoint& ep_;
  const UserStream& user_;
};

}  // namespace

StatusOr<BenchReport> RunBench(const BenchOptions& options, std::vector<LatencySample>* samples) {
  if (options.users < 0 || options.concurrency < 1 || options.requests_per_user < 0) {
    return MakeError(ErrorCode::kInvalidArgument,
                     "users and requests must be non-negative, concurrency positive");
  }
  BenchReport report;
  report.workload = std::string(WorkloadName(options.workload));
  report.target = options.target_url;
  report.concurrency_level = options.concurrency;
  report.users = options.users;
  report.requests_per_user = options.requests_per_user;
  std::vector<LatencySample> all;
  if (options.users == 0 || options.requests_per_user == 0) {
    if (!options.csv_path.empty()) BARBIE_RETURN_IF_ERROR(WriteLatencyCsv(options.csv_path, all));
    if (samples) samples->clear();
    return report;
  }
  BARBIE_ASSIGN_OR_RETURN(Endpoint ep, ParseUrl(options.target_url));

  std::vector<UserStream> users;
  for (int u = 0; u < options.users; ++u) {
    BARBIE_ASSIGN_OR_RETURN(UserStream user, SetUp(options));
    users.push_back(std::move(user));
  }

  struct StreamResult {
    std::vector<LatencySample> samples;
    Clock::time_point end;
  };
  std::vector<StreamResult> results(size_t(options.users));
  std::vector<std::unique_ptr<std::atomic<int>>> next;
  for (int u = 0; u < options.users; ++u) next.push_back(std::make_unique<std::atomic<int>>(0));
  std::mutex mu;
  std::vector<std::thread> threads;

  auto start = Clock::now();
  for (int u = 0; u < options.users; ++u) {
    for (int w = 0; w < options.concurrency; ++w) {
      threads.emplace_back([&, u] {
        RequestFactory factory(options, ep, users[size_t(u)]);
        std::vector<LatencySample> mine;
        while (true) {
          int seq = next[size_t(u)]->fetch_add(1);
          if (seq >= options.requests_per_user) break;
          LatencySample s;
          s.user = u;
          s.seq = seq;
          auto request = factory.Build(seq);
          if (request.ok()) {
            auto response = SendOnce(ep, *request, s);
            if (response.ok()) {
              s.status = response->status;
              s.body_bytes = response->body.size();
              s.ok = factory.Check(*response);
            }
          }
          mine.push_back(s);
        }
        auto end = Clock::now();
        std::lock_guard lock(mu);
        auto& r = results[size_t(u)];
        r.samples.insert(r.samples.end(), mine.begin(), mine.end());
        r.end = std::max(r.end, end);
      });
    }
  }
  for (auto& t : threads) t.join();
  auto finish = Clock::now();

  double connect_sum = 0;
  double processing_sum = 0;
  double per_request_sum = 0;
  int streams_with_completions = 0;
  for (auto& r : results) {
    uint64_t done = 0;
    for (const auto& s : r.samples) {
      if (s.ok) {
        ++done;
        connect_sum += s.connect_ms;
        processing_sum += s.processing_ms;
        report.total_body_bytes += s.body_bytes;
      } else {
        ++report.failed;
      }
    }
    report.completed += done;
    if (done > 0) {
      double stream_ms = Ms(r.end - start);
      per_request_sum += options.concurrency * stream_ms / double(done);
      ++streams_with_completions;
    }
    all.insert(all.end(), r.samples.begin(), r.samples.end());
  }
  report.total_time_s = std::chrono::duration<double>(finish - start).count();
  report.degraded = report.failed > 0;
  if (report.completed > 0) {
    report.mean_connect_time_ms = connect_sum / double(report.completed);
    report.mean_processing_time_ms = processing_sum / double(report.completed);
    report.requests_per_second = double(report.completed) / report.total_time_s;
  }
  if (streams_with_completions > 0) {
    report.mean_time_per_request_ms = per_request_sum / streams_with_completions;
    report.mean_time_across_connections_ms =
        report.mean_time_per_request_ms / options.concurrency;
  }
  std::sort(all.begin(), all.end(), [](const LatencySample& a, const LatencySample& b) {
    return std::tie(a.user, a.seq) < std::tie(b.user, b.seq);
  });
  if (!options.csv_path.empty()) BARBIE_RETURN_IF_ERROR(WriteLatencyCsv(options.csv_path, all));
  if (samples) *samples = std::move(all);
  return report;
}

HandshakeTally RunHandshakes(const std::string& url, const client::ClientProfile& profile,
                             int attempts) {
  HandshakeTally tally;
  for (int i = 0; i < attempts; ++i) {
    client::HttpTransport transport(url);
    client::Client c(profile, transport);
    auto session = c.Attest();
    ++tally.attempts;
    if (session.ok()) {
      ++tally.completed;
    } else {
      ++tally.errors[std::string(ErrorCodeName(session.status().code()))];
    }
  }
  return tally;
}

Status WriteLatencyCsv(const std::filesystem::path& path,
                       const std::vector<LatencySample>& samples) {
  std::string out = "user,seq,status,ok,connect_ms,processing_ms,total_ms,body_bytes\n";
  char line[256];
  for (const auto& s : samples) {
    std::snprintf(line, sizeof line, "%d,%d,%d,%d,%.3f,%.3f,%.3f,%zu\n", s.user, s.seq, s.status,
                  s.ok ? 1 : 0, s.connect_ms, s.processing_ms, s.total_ms, s.body_bytes);
    out += line;
  }
  return WriteFileAtomic(path, out);
}

}  // namespace barbie::cluster
