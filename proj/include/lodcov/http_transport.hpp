#pragma once

// Transport backed by cpp-httplib. Define CPPHTTPLIB_OPENSSL_SUPPORT (and link
// OpenSSL) before including this header to reach https:// endpoints.

#include <httplib.h>

#include <string>
#include <utility>

#include "lodcov/remote.hpp"

namespace lodcov {

// Splits `scheme://authority/path?query` into ("scheme://authority", "/path?query").
inline std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("not an absolute URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport : public Transport {
 public:
  HttpResponse send(const HttpRequest& request) override {
    auto [origin, target] = split_url(request.url);
    httplib::Client client(origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_follow_location(true);

    httplib::Headers headers;
    std::string content_type = "text/plain";
    for (const auto& [k, v] : request.headers) {
      if (k == "Content-Type")
        content_type = v;
      else
        headers.emplace(k, v);
    }
    httplib::Result res = request.method == "POST"
                              ? client.Post(target, headers, request.body, content_type)
                              : client.Get(target, headers);
    if (!res) {
      const auto err = res.error();
      const auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                            ? TransportError::Kind::timeout
                            : TransportError::Kind::connection;
      throw TransportError(kind, request.url + ": " + httplib::to_string(err));
    }
    return {res->status, res->body};
  }
};

}  // namespace lodcov
