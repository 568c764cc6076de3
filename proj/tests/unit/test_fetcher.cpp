#include <doctest.h>

#include <chrono>
#include <thread>

#include "support/fixture_server.hpp"
#include "verif/fetcher.hpp"

using namespace verif;
using testing_support::FixtureServer;

namespace {

struct Site {
  FixtureServer fx;
  Site() {
    auto& s = fx.server();
    s.Get("/a", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/b", 302); });
    s.Get("/b", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/c", 301); });
    s.Get("/c", [](const httplib::Request&, httplib::Response& res) { res.set_content("<p>final</p>", "text/html"); });
    s.Get("/loop", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/loop", 302); });
    s.Get("/missing", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    s.Get("/big", [](const httplib::Request&, httplib::Response& res) { res.set_content(std::string(5000, 'x'), "text/plain"); });
    s.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(1500));
      res.set_content("late", "text/plain");
    });
    s.Get("/agent", [](const httplib::Request& req, httplib::Response& res) {
      res.set_content(req.get_header_value("User-Agent"), "text/plain");
    });
    fx.start();
  }
};

}  // namespace

TEST_CASE("redirect chain returns the last body and final URL") {
  Site site;
  const auto r = fetch(site.fx.base() + "/a");
  CHECK(r.status == 200);
  CHECK(r.body == "<p>final</p>");
  CHECK(r.final_url.path == "/c");
  CHECK(r.byte_count == r.body.size());
  CHECK(r.content_type.find("text/html") == 0);
}

TEST_CASE("failures are distinguishable") {
  Site site;
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const ScraperError& e) {
      return std::optional(e.kind());
    }
    return std::optional<ScraperError::Kind>{};
  };

  CHECK(kind_of([&] { fetch("not a url"); }) == ScraperError::Kind::invalid_url);

  try {
    fetch(site.fx.base() + "/missing");
    FAIL("expected a status error");
  } catch (const ScraperError& e) {
    CHECK(e.kind() == ScraperError::Kind::status);
    CHECK(e.status() == 404);
  }

  FetchOptions small;
  small.max_bytes = 1000;
  CHECK(kind_of([&] { fetch(site.fx.base() + "/big", small); }) == ScraperError::Kind::too_large);

  FetchOptions few;
  few.max_redirects = 3;
  CHECK(kind_of([&] { fetch(site.fx.base() + "/loop", few); }) == ScraperError::Kind::too_many_redirects);

  FetchOptions quick;
  quick.timeout = std::chrono::milliseconds(300);
  CHECK(kind_of([&] { fetch(site.fx.base() + "/slow", quick); }) == ScraperError::Kind::timeout);

  // Nothing listens on the port of a server that has been stopped.
  FixtureServer dead;
  dead.start();
  const auto url = dead.base() + "/";
  dead.stop();
  CHECK(kind_of([&] { fetch(url); }) == ScraperError::Kind::network);
}

TEST_CASE("sends the configured user agent") {
  Site site;
  FetchOptions o;
  o.user_agent = "probe/2";
  CHECK(fetch(site.fx.base() + "/agent", o).body == "probe/2");
}
