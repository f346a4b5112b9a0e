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

#ifndef BARBIE_CLIENT_TRANSPORT_H_
#define BARBIE_CLIENT_TRANSPORT_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "barbie/common/status.h"

namespace barbie::client {

struct HttpRequest {
  std::string method;  // "GET" or "POST"
  std::string path;    // including any query string
  std::map<std::string, std::string> headers;
  std::string body;
};

struct HttpResponse {
  int status = 0;
  std::map<std::string, std::string> headers;  // names lower-cased
  std::string body;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // Fails with kTransportError only when no HTTP response was obtained.
  virtual StatusOr<HttpResponse> Send(const HttpRequest& request) = 0;
};

// HTTP/1.1 to one base URL ("http://host:port").
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::string base_url, int timeout_seconds = 30);
  ~HttpTransport() override;
  StatusOr<HttpResponse> Send(const HttpRequest& request) override;
  const std::string& base_url() const { return base_url_; }

 private:
  struct Conn;
  std::string base_url_;
  int timeout_seconds_;
  std::mutex mu_;
  std::unique_ptr<Conn> conn_;
};

// Name/value cookies from Set-Cookie headers. Attributes are ignored.
class CookieJar {
 public:
  void Absorb(const HttpResponse& response);
  std::string Get(const std::string& name) const;
  void Set(const std::string& name, const std::string& value);
  void Clear();
  // "a=1; b=2", empty when the jar is empty.
  std::string HeaderValue() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> cookies_;
};

}  // namespace barbie::client

#endif  // BARBIE_CLIENT_TRANSPORT_H_
