#include "verif/http_api.hpp"

#include <filesystem>
#include <regex>

#include <httplib.h>
#include <openssl/evp.h>

#include "verif/error.hpp"
#include "verif/fetcher.hpp"
#include "verif/text.hpp"

namespace verif {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Operational endpoints are not counted, so a fresh service reports all-zero counters
// no matter how often it has been polled.
bool counted(const std::string& endpoint) {
  return endpoint != "GET /api/v1/metrics" && endpoint != "GET /healthz";
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw ValidationError("request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid JSON body: ") + e.what());
  }
}

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) throw ValidationError(std::string("missing string field: ") + key);
  return j.at(key).get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) throw ValidationError(std::string("field must be a string: ") + key);
  return j.at(key).get<std::string>();
}

/// Runs a handler and maps library errors onto HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    reply(res, 400, {{"error", e.what()}});
  } catch (const NotFoundError& e) {
    reply(res, 404, {{"error", e.what()}});
  } catch (const SignalError& e) {
    const int status = e.kind() == SignalError::Kind::unsupported_language ? 422 : 502;
    reply(res, status, {{"error", e.what()}, {"kind", to_string(e.kind())}, {"signal", to_string(e.signal())}});
  } catch (const StanceError& e) {
    reply(res, 502, {{"error", e.what()}});
  } catch (const ScraperError& e) {
    reply(res, 502, {{"error", e.what()}, {"kind", to_string(e.kind())}});
  } catch (const std::exception& e) {
    reply(res, 500, {{"error", e.what()}});
  }
}

/// Resolves a fixture path inside the configured fixture root, refusing escapes.
std::string confined_fixture(const ServiceConfig& c, const std::string& requested) {
  if (c.video_fixtures.empty()) throw ValidationError("fixture_path is disabled: no stance.video_fixtures configured");
  std::error_code ec;
  fs::path root = fs::is_directory(c.video_fixtures, ec) ? fs::path(c.video_fixtures) : fs::path(c.video_fixtures).parent_path();
  root = fs::weakly_canonical(root, ec);
  fs::path p = requested;
  if (p.is_relative()) p = root / p;
  p = fs::weakly_canonical(p, ec);
  const auto rel = p.lexically_relative(root);
  if (rel.empty() || *rel.begin() == "..") throw ValidationError("fixture_path must stay inside the fixture directory");
  if (!fs::is_regular_file(p, ec)) throw NotFoundError("no such fixture: " + requested);
  return p.string();
}

}  // namespace

std::string endpoint_key(const std::string& method, const std::string& path) {
  static const std::vector<std::pair<std::regex, std::string>> routes = {
      {std::regex("^/api/v1/reports/[^/]+$"), "/api/v1/reports/{id}"},
      {std::regex("^/api/v1/signals/[^/]+$"), "/api/v1/signals/{kind}"},
  };
  static const std::vector<std::string> fixed = {"/api/v1/analyze",        "/api/v1/claims",   "/api/v1/claims/search",
                                                 "/api/v1/domains/check",  "/api/v1/entities", "/api/v1/stance",
                                                 "/api/v1/metrics",        "/healthz"};
  for (const auto& f : fixed)
    if (path == f) return method + " " + f;
  for (const auto& [re, name] : routes)
    if (std::regex_match(path, re)) return method + " " + name;
  return "other";
}

std::string base64_decode(std::string_view encoded) {
  std::string clean;
  for (char c : encoded)
    if (!std::isspace(static_cast<unsigned char>(c))) clean += c;
  while (clean.size() % 4 != 0) clean += '=';
  if (clean.empty()) return {};
  std::string out(clean.size() / 4 * 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(clean.data()), static_cast<int>(clean.size()));
  if (n < 0) throw ValidationError("invalid base64 payload");
  std::size_t pad = 0;
  for (auto it = clean.rbegin(); it != clean.rend() && *it == '=' && pad < 2; ++it) ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

HttpService::HttpService(std::shared_ptr<Gateway> gateway)
    : gateway_(std::move(gateway)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpService::serve() { server_->listen_after_bind(); }

void HttpService::stop() {
  if (server_) server_->stop();
}

bool HttpService::running() const { return server_->is_running(); }

void HttpService::install_routes() {
  auto& srv = *server_;
  Gateway* gw = gateway_.get();

  srv.set_logger([gw](const httplib::Request& req, const httplib::Response& res) {
    const auto key = endpoint_key(req.method, req.path);
    if (counted(key)) gw->metrics().record_response(key, res.status);
  });

  srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, {{"status", "ok"}}); });

  srv.Get("/api/v1/metrics", [gw](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, to_json(gw->metrics().snapshot()));
  });

  srv.Post("/api/v1/analyze", [gw](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      const auto kind = submission_kind_from_string(require_string(body, "kind"));
      if (!kind) throw ValidationError("kind must be url, raw_html, plain_text or media_upload");
      Submission sub;
      sub.kind = *kind;
      sub.value = require_string(body, "value");
      if (sub.kind == SubmissionKind::media_upload) sub.value = base64_decode(sub.value);
      sub.declared_language = optional_string(body, "language");
      const auto outcome = gw->analyze(sub);
      if (outcome.scraper_error) {
        reply(res, 502, {{"report_id", outcome.report_id}, {"error", *outcome.scraper_error}});
      } else {
        reply(res, 202, {{"report_id", outcome.report_id}});
      }
    });
  });

  srv.Get("/api/v1/reports/:id", [gw](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, to_json(gw->get_report(req.path_params.at("id")))); });
  });

  srv.Post("/api/v1/claims", [gw](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto id = gw->services().claims->ingest(debunk_record_from_json(parse_body(req)));
      reply(res, 201, {{"id", id}});
    });
  });

  srv.Post("/api/v1/claims/search", [gw](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      const auto& s = gw->services();
      std::vector<ClaimMatch> matches;
      if (const auto hash = optional_string(body, "image_hash")) {
        const int max_distance = body.value("max_distance", s.config.max_image_distance);
        matches = s.claims->search_image(hash_from_hex(*hash), max_distance);
      } else {
        const auto text = require_string(body, "text");
        const double threshold = body.value("threshold", s.config.claim_threshold);
        const auto mode = body.value("mode", std::string("title"));
        if (mode == "title") matches = s.claims->search_text(text, threshold);
        else if (mode == "semantic") matches = s.claims->search_semantic(text, threshold);
        else throw ValidationError("mode must be title or semantic");
      }
      json out = json::array();
      for (const auto& m : matches) out.push_back(to_json(m));
      reply(res, 200, {{"matches", out}});
    });
  });

  srv.Post("/api/v1/domains/check", [gw](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      if (!body.contains("urls") || !body.at("urls").is_array()) throw ValidationError("urls must be an array");
      std::vector<std::string> urls;
      for (const auto& u : body.at("urls")) {
        if (!u.is_string()) throw ValidationError("urls must be strings");
        urls.push_back(u.get<std::string>());
      }
      reply(res, 200, to_json(gw->services().domains->check_batch(urls)));
    });
  });

  srv.Post("/api/v1/signals/:kind", [gw](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto kind = signal_kind_from_string(req.path_params.at("kind"));
      if (!kind) throw NotFoundError("unknown signal: " + req.path_params.at("kind"));
      const auto body = parse_body(req);
      const auto language = optional_string(body, "language");
      const auto content = from_plain_text(require_string(body, "text"), language);
      auto out = signal_payload(gw->services(), *kind, content, language.value_or("en"));
      json sentences = json::array();
      for (const auto& sp : content.sentences) sentences.push_back({{"start", sp.start}, {"end", sp.end}});
      out["text"] = content.text;
      out["sentences"] = sentences;
      reply(res, 200, out);
    });
  });

  srv.Post("/api/v1/entities", [gw](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, entities_payload(gw->services(), require_string(parse_body(req), "text"))); });
  });

  srv.Post("/api/v1/stance", [gw](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      const auto& s = gw->services();
      if (const auto fixture = optional_string(body, "fixture_path")) {
        const FixtureVideoClient client(confined_fixture(s.config, *fixture));
        const auto thread = client.fetch(Url{"https", "www.youtube.com", std::nullopt, "/watch", "v=fixture", ""});
        reply(res, 200, to_json(classify_thread(thread, *s.stance)));
        return;
      }
      const auto url = Url::parse_http(require_string(body, "video_url"));
      if (!url) throw ValidationError("video_url must be an absolute http(s) URL");
      if (!s.videos) throw StanceError(StanceError::Kind::fetch, "no video client configured");
      reply(res, 200, stance_payload(s, *url, *s.videos));
    });
  });
}

}  // namespace verif
