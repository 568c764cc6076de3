#include "verif/fetcher.hpp"

#include <httplib.h>

namespace verif {
namespace {

using Clock = std::chrono::steady_clock;

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

void set_timeouts(httplib::Client& client, std::chrono::milliseconds remaining) {
  const auto ms = std::max<long long>(remaining.count(), 1);
  const auto sec = static_cast<time_t>(ms / 1000);
  const auto usec = static_cast<time_t>((ms % 1000) * 1000);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
}

}  // namespace

std::string_view to_string(ScraperError::Kind kind) {
  switch (kind) {
    case ScraperError::Kind::invalid_url: return "invalid_url";
    case ScraperError::Kind::network: return "network";
    case ScraperError::Kind::status: return "status";
    case ScraperError::Kind::timeout: return "timeout";
    case ScraperError::Kind::too_large: return "too_large";
    case ScraperError::Kind::too_many_redirects: return "too_many_redirects";
  }
  return "network";
}

FetchResult HttpFetcher::fetch(const Url& start, const FetchOptions& options) const {
  if (start.scheme != "http" && start.scheme != "https")
    throw ScraperError(ScraperError::Kind::invalid_url, "unsupported scheme: " + start.scheme);

  const auto deadline = Clock::now() + options.timeout;
  Url current = start;

  for (int hop = 0; hop <= options.max_redirects; ++hop) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) throw ScraperError(ScraperError::Kind::timeout, "timed out fetching " + start.str());

    httplib::Client client(current.origin());
    client.set_follow_location(false);
    client.set_keep_alive(false);
    set_timeouts(client, remaining);

    const auto request_start = Clock::now();
    std::string body;
    bool too_large = false;
    bool timed_out = false;
    const httplib::Headers headers = {{"User-Agent", options.user_agent}, {"Accept", "text/html,*/*;q=0.8"}};
    auto result = client.Get(current.request_target(), headers, [&](const char* data, std::size_t len) {
      if (body.size() + len > options.max_bytes) {
        too_large = true;
        return false;
      }
      if (Clock::now() > deadline) {
        timed_out = true;
        return false;
      }
      body.append(data, len);
      return true;
    });

    if (!result) {
      if (too_large)
        throw ScraperError(ScraperError::Kind::too_large,
                           "response exceeds " + std::to_string(options.max_bytes) + " bytes: " + current.str());
      const auto err = result.error();
      // A socket read timeout surfaces as a plain read error; it is recognisable by having used up the budget.
      const bool waited_out = err == httplib::Error::Read &&
                              Clock::now() - request_start >= remaining - std::chrono::milliseconds(20);
      if (timed_out || waited_out || err == httplib::Error::ConnectionTimeout || Clock::now() >= deadline)
        throw ScraperError(ScraperError::Kind::timeout, "timed out fetching " + current.str());
      throw ScraperError(ScraperError::Kind::network,
                         "network error fetching " + current.str() + ": " + httplib::to_string(err));
    }

    const int status = result->status;
    if (is_redirect(status)) {
      const auto location = result->get_header_value("Location");
      auto next = current.resolve(location);
      if (location.empty() || !next) throw ScraperError(ScraperError::Kind::status, "redirect without location", status);
      current = std::move(*next);
      continue;
    }
    if (status < 200 || status >= 300)
      throw ScraperError(ScraperError::Kind::status,
                         "HTTP " + std::to_string(status) + " fetching " + current.str(), status);

    FetchResult out;
    out.byte_count = body.size();
    out.body = std::move(body);
    out.final_url = current;
    out.status = status;
    out.content_type = result->get_header_value("Content-Type");
    return out;
  }
  throw ScraperError(ScraperError::Kind::too_many_redirects, "too many redirects fetching " + start.str());
}

FetchResult fetch(std::string_view url, const FetchOptions& options) {
  const auto parsed = Url::parse_http(url);
  if (!parsed) throw ScraperError(ScraperError::Kind::invalid_url, "not an absolute http(s) URL: " + std::string(url));
  return HttpFetcher{}.fetch(*parsed, options);
}

}  // namespace verif
