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

#include "barbie/client/transport.h"

#include <httplib.h>

#include <algorithm>
#include <cctype>

namespace barbie::client {

struct HttpTransport::Conn {
  explicit Conn(const std::string& url) : http(url) {}
  httplib::Client http;
};

HttpTransport::HttpTransport(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

HttpTransport::~HttpTransport() = default;

StatusOr<HttpResponse> HttpTransport::Send(const HttpRequest& request) {
  // httplib::Client is not safe for concurrent use; serialize on it.
  std::lock_guard lock(mu_);
  if (!conn_) {
    conn_ = std::make_unique<Conn>(base_url_);
    if (!conn_->http.is_valid()) {
      conn_.reset();
      return MakeError(ErrorCode::kTransportError, "invalid server url " + base_url_);
    }
    conn_->http.set_connection_timeout(timeout_seconds_, 0);
    conn_->http.set_read_timeout(timeout_seconds_, 0);
    conn_->http.set_write_timeout(timeout_seconds_, 0);
    conn_->http.set_keep_alive(true);
  }
  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);
  httplib::Result result =
      request.method == "GET"
          ? conn_->http.Get(request.path, headers)
          : conn_->http.Post(request.path, headers, request.body, "application/json");
  if (!result) {
    std::string why = httplib::to_string(result.error());
    conn_.reset();
    return MakeError(ErrorCode::kTransportError, base_url_ + request.path + ": " + why);
  }
  HttpResponse response;
  response.status = result->status;
  response.body = result->body;
  for (const auto& [k, v] : result->headers) {
    std::string name = k;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    response.headers[name] = v;
  }
  return response;
}

void CookieJar::Absorb(const HttpResponse& response) {
  auto it = response.headers.find("set-cookie");
  if (it == response.headers.end()) return;
  std::string pair = it->second.substr(0, it->second.find(';'));
  auto eq = pair.find('=');
  if (eq == std::string::npos || eq == 0) return;
  Set(pair.substr(0, eq), pair.substr(eq + 1));
}

std::string CookieJar::Get(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = cookies_.find(name);
  return it == cookies_.end() ? std::string() : it->second;
}

void CookieJar::Set(const std::string& name, const std::string& value) {
  std::lock_guard lock(mu_);
  cookies_[name] = value;
}

void CookieJar::Clear() {
  std::lock_guard lock(mu_);
  cookies_.clear();
}

std::string CookieJar::HeaderValue() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& [k, v] : cookies_) {
    if (!out.empty()) out += "; ";
    out += k + "=" + v;
  }
  return out;
}

}  // namespace barbie::client
