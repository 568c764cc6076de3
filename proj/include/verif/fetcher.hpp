#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "verif/error.hpp"
#include "verif/url.hpp"

namespace verif {

/// A failed page fetch. Each variant is distinguishable so scraper failures can be counted by cause.
class ScraperError : public Error {
 public:
  enum class Kind { invalid_url, network, status, timeout, too_large, too_many_redirects };

  ScraperError(Kind kind, std::string message, int status = 0)
      : Error(std::move(message)), kind_(kind), status_(status) {}

  Kind kind() const { return kind_; }
  /// HTTP status for Kind::status, 0 otherwise.
  int status() const { return status_; }

 private:
  Kind kind_;
  int status_;
};

std::string_view to_string(ScraperError::Kind kind);

struct FetchOptions {
  std::chrono::milliseconds timeout{15000};
  std::size_t max_bytes = 8u * 1024u * 1024u;
  int max_redirects = 10;
  std::string user_agent = "verif-scraper/1.0";
};

struct FetchResult {
  std::string body;
  Url final_url;
  int status = 0;
  std::string content_type;
  std::size_t byte_count = 0;
};

class PageFetcher {
 public:
  virtual ~PageFetcher() = default;
  virtual FetchResult fetch(const Url& url, const FetchOptions& options) const = 0;
};

/// Fetches over HTTP(S), following redirects manually so the final URL is known.
class HttpFetcher final : public PageFetcher {
 public:
  FetchResult fetch(const Url& url, const FetchOptions& options) const override;
};

/// Convenience wrapper: validates the URL text and fetches with HttpFetcher.
FetchResult fetch(std::string_view url, const FetchOptions& options = {});

}  // namespace verif
