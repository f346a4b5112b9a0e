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

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "barbie/attestation/transcript.h"
#include "barbie/common/file_util.h"
#include "barbie/server/config.h"

namespace {

using nlohmann::json;
using namespace barbie;

int Report(const Status& status) {
  std::cerr << json{{"error", std::string(ErrorCodeName(status.code()))},
                    {"message", status.message()}}
                   .dump()
            << "\n";
  return 1;
}

StatusOr<json> Generate(uint64_t seed) {
  return attestation::GenerateTranscript(seed, server::kDefaultManifest,
                                         server::kDefaultSignerKey);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Golden remote attestation transcripts"};
  uint64_t seed = 1;
  std::string out;
  std::vector<std::string> verify;
  std::string corpus;
  int count = 20;
  auto* seed_opt = app.add_option("--seed", seed, "Randomness seed")->capture_default_str();
  app.add_option("--out", out, "Write the transcript here instead of stdout");
  auto* verify_opt = app.add_option("--verify", verify, "Transcript files to check")
                         ->excludes(seed_opt);
  app.add_option("--corpus", corpus, "Write seeds 1..count as seed_<n>.json into this directory")
      ->excludes(verify_opt);
  app.add_option("--count", count, "Corpus size")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  if (!verify.empty()) {
    int failures = 0;
    for (const auto& path : verify) {
      Status st = [&]() -> Status {
        BARBIE_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
        json t = json::parse(text, nullptr, false);
        if (t.is_discarded()) return MakeError(ErrorCode::kProtocolError, "not JSON");
        return attestation::VerifyTranscript(t);
      }();
      std::cout << json{{"file", path}, {"ok", st.ok()}, {"message", st.message()}}.dump()
                << "\n";
      if (!st.ok()) ++failures;
    }
    return failures == 0 ? 0 : 2;
  }

  if (!corpus.empty()) {
    std::filesystem::create_directories(corpus);
    for (int n = 1; n <= count; ++n) {
      auto t = Generate(uint64_t(n));
      if (!t.ok()) return Report(t.status());
      auto path = std::filesystem::path(corpus) / ("seed_" + std::to_string(n) + ".json");
      if (Status st = WriteFileAtomic(path, t->dump(2) + "\n"); !st.ok()) return Report(st);
    }
    std::cout << json{{"corpus", corpus}, {"count", count}}.dump() << "\n";
    return 0;
  }

  auto t = Generate(seed);
  if (!t.ok()) return Report(t.status());
  if (!out.empty()) {
    if (Status st = WriteFileAtomic(out, t->dump(2) + "\n"); !st.ok()) return Report(st);
    return 0;
  }
  std::cout << t->dump(2) << "\n";
  return 0;
}
