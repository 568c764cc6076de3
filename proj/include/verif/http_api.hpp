#pragma once

// JSON-over-HTTP front end for the gateway.

#include <memory>
#include <string>

#include "verif/gateway.hpp"

namespace httplib {
class Server;
}

namespace verif {

/// Normalizes a request path to its route ("/api/v1/reports/{id}"), or "other".
std::string endpoint_key(const std::string& method, const std::string& path);

/// Decodes standard base64 (padding optional, whitespace ignored). Throws ValidationError.
std::string base64_decode(std::string_view encoded);

class HttpService {
 public:
  explicit HttpService(std::shared_ptr<Gateway> gateway);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds without serving. Port 0 picks a free port; returns the bound port or throws.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void serve();
  void stop();
  bool running() const;

  Gateway& gateway() { return *gateway_; }

 private:
  void install_routes();

  std::shared_ptr<Gateway> gateway_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace verif
