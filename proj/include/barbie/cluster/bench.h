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

#ifndef BARBIE_CLUSTER_BENCH_H_
#define BARBIE_CLUSTER_BENCH_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "barbie/client/client.h"

namespace barbie::cluster {

enum class Workload { kV1Store, kV2RaStore, kV2MaRoundtrip };

// "v1-store", "v2-ra-store", "v2-ma-roundtrip".
std::string_view WorkloadName(Workload workload);
StatusOr<Workload> WorkloadFromName(std::string_view name);

struct BenchOptions {
  std::string target_url;  // a load balancer or a bare instance
  int users = 1;
  int concurrency = 1;  // simultaneous requests per user stream
  int requests_per_user = 1;
  Workload workload = Workload::kV1Store;
  // Mode and credentials for each user's setup. V2_RA_STORE needs AWARE,
  // V2_MA_ROUNDTRIP needs ENABLED. V1_STORE uses only the token.
  client::ClientProfile profile;
  size_t payload_bytes = 64;
  std::filesystem::path csv_path;  // empty: no CSV
};

struct LatencySample {
  int user = 0;
  int seq = 0;
  int status = 0;  // HTTP status; 0 when the connection failed
  bool ok = false;
  double connect_ms = 0;
  double processing_ms = 0;
  double total_ms = 0;
  size_t body_bytes = 0;
};

// Timers follow Apache ab. Each user stream is one ab run with the given
// concurrency: time per request is concurrency × stream time / completed
// requests in that stream, averaged over users, and the "across concurrent
// requests" figure divides that by the concurrency. Requests per second
// and total time cover all users together.
struct BenchReport {
  std::string workload;
  std::string target;
  int concurrency_level = 0;
  int users = 0;
  int requests_per_user = 0;
  double mean_processing_time_ms = 0;
  double mean_connect_time_ms = 0;
  double mean_time_per_request_ms = 0;
  double requests_per_second = 0;
  double mean_time_across_connections_ms = 0;
  uint64_t total_body_bytes = 0;
  double total_time_s = 0;
  uint64_t completed = 0;
  uint64_t failed = 0;
  bool degraded = false;

  nlohmann::json ToJson() const;
};

// Per-user setup (attestation, and for V2_MA_ROUNDTRIP one stored secret)
// runs before the clock starts. Each measured request opens its own
// connection without the sticky cookie.
StatusOr<BenchReport> RunBench(const BenchOptions& options,
                               std::vector<LatencySample>* samples = nullptr);

struct HandshakeTally {
  int attempts = 0;
  int completed = 0;
  std::map<std::string, int> errors;  // error name -> count

  double completion_rate() const { return attempts ? double(completed) / attempts : 0; }
};

// Runs `attempts` attestations, each from a fresh client with an empty
// cookie jar.
HandshakeTally RunHandshakes(const std::string& url, const client::ClientProfile& profile,
                             int attempts);

Status WriteLatencyCsv(const std::filesystem::path& path,
                       const std::vector<LatencySample>& samples);

}  // namespace barbie::cluster

#endif  // BARBIE_CLUSTER_BENCH_H_
