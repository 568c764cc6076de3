#include <doctest.h>

#include <chrono>
#include <set>

#include "support/fixture_server.hpp"
#include "support/paths.hpp"
#include "verif/error.hpp"
#include "verif/segmenter.hpp"
#include "verif/signal_providers.hpp"

using namespace verif;
using testing_support::source_path;

namespace {

const std::string kLexicons = source_path("data/lexicons");

SignalRequest request_for(SignalKind kind, const std::string& text, const std::string& language = "en") {
  return {kind, text, segment(text), language};
}

const std::string kArticle =
    "Health officials said the vaccine rollout at the hospital will expand next week. "
    "Can we really trust the so-called experts on this? "
    "I absolutely hate this terrible policy. "
    "The ministry published its figures on Tuesday.";

}  // namespace

TEST_CASE("every lexicon loads and its labels belong to the registry") {
  const auto& reg = LabelRegistry::defaults();
  for (auto kind : kSignalKinds) {
    const auto p = make_baseline_provider(kind, kLexicons);
    REQUIRE(p);
    CHECK(p->kind() == kind);
    const auto r = p->analyze(request_for(kind, kArticle));
    for (const auto& a : r.annotations) CHECK(reg.contains(kind, a.label));
    for (const auto& [label, _] : r.doc_scores) CHECK(reg.contains(kind, label));
  }
  CHECK_THROWS(make_baseline_provider(SignalKind::genre, "/nonexistent/lexicons"));
}

TEST_CASE("subjectivity baseline flags an opinionated sentence") {
  const auto p = make_baseline_provider(SignalKind::subjectivity, kLexicons);
  const auto r = p->analyze(request_for(SignalKind::subjectivity, "I absolutely hate this terrible policy."));
  REQUIRE(r.annotations.size() == 1);
  CHECK(r.annotations[0].label == "subjective");
  CHECK(r.annotations[0].confidence > 0.5);
  const auto neutral = p->analyze(request_for(SignalKind::subjectivity, "The ministry published its figures on Tuesday."));
  for (const auto& a : neutral.annotations) CHECK(a.confidence <= 0.5);
}

TEST_CASE("framing baseline scores health text and marks the health sentence") {
  const auto p = make_baseline_provider(SignalKind::framing, kLexicons);
  const auto r = p->analyze(request_for(SignalKind::framing, kArticle));
  REQUIRE(r.doc_scores.count("Health and Safety"));
  double best = 0.0;
  std::string best_label;
  for (const auto& [label, s] : r.doc_scores) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    if (s > best) best = s, best_label = label;
  }
  CHECK(best_label == "Health and Safety");
  REQUIRE(r.importance.count(0));
  CHECK(r.importance.at(0) > 0.0);
}

TEST_CASE("persuasion baseline finds doubt and repetition") {
  const auto p = make_baseline_provider(SignalKind::persuasion, kLexicons);
  const auto r = p->analyze(request_for(SignalKind::persuasion, kArticle));
  bool doubt = false;
  for (const auto& a : r.annotations)
    if (a.label == "Doubt" && a.sentence_index == 1) doubt = true;
  CHECK(doubt);

  const auto rep = p->analyze(request_for(SignalKind::persuasion,
                                          "Freedom matters. Freedom is everything. We fight for freedom. Lunch was fine."));
  std::set<std::size_t> repeated;
  for (const auto& a : rep.annotations)
    if (a.label == "Repetition") repeated.insert(a.sentence_index);
  CHECK(repeated == std::set<std::size_t>{0, 1, 2});
}

TEST_CASE("genre and mgt baselines stay in range") {
  const auto genre = make_baseline_provider(SignalKind::genre, kLexicons);
  const auto g = genre->analyze(request_for(SignalKind::genre, kArticle));
  CHECK(g.doc_scores.size() == 3);
  for (const auto& [_, s] : g.doc_scores) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
  const auto mgt = make_baseline_provider(SignalKind::mgt, kLexicons);
  const auto m = mgt->analyze(request_for(SignalKind::mgt, kArticle));
  CHECK(m.annotations.size() == 4);
  for (const auto& a : m.annotations) {
    CHECK(a.confidence >= 0.0);
    CHECK(a.confidence <= 1.0);
  }
}

TEST_CASE("baselines are deterministic") {
  for (auto kind : kSignalKinds) {
    const auto a = make_baseline_provider(kind, kLexicons);
    const auto b = make_baseline_provider(kind, kLexicons);
    const auto req = request_for(kind, kArticle);
    CHECK(a->analyze(req) == b->analyze(req));
    CHECK(a->analyze(req) == a->analyze(req));
  }
}

TEST_CASE("baselines reject unsupported languages") {
  for (auto kind : kSignalKinds) {
    const auto p = make_baseline_provider(kind, kLexicons);
    CHECK(p->supports("en-GB"));
    CHECK(p->supports(""));
    CHECK_FALSE(p->supports("fr"));
    try {
      p->analyze(request_for(kind, "Bonjour tout le monde.", "fr"));
      FAIL("expected unsupported_language");
    } catch (const SignalError& e) {
      CHECK(e.kind() == SignalError::Kind::unsupported_language);
    }
  }
  CHECK_THROWS_AS(SubjectivityBaseline(nlohmann::json::array()), ValidationError);
}

TEST_CASE("remote provider speaks the wire format") {
  testing_support::FixtureServer srv;
  std::string seen_body;
  srv.server().Post("/ok", [&](const httplib::Request& req, httplib::Response& res) {
    seen_body = req.body;
    res.set_content(R"({"doc_scores":{"objective":0.7},"annotations":[{"label":"objective","sentence_index":0,"confidence":0.4}]})",
                    "application/json");
  });
  srv.server().Post("/lang", [](const httplib::Request&, httplib::Response& res) {
    res.status = 422;
    res.set_content(R"({"error":"unsupported_language"})", "application/json");
  });
  srv.server().Post("/down", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("busy", "text/plain");
  });
  srv.server().Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{not json", "application/json");
  });
  srv.server().Post("/shape", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"annotations":{"label":"x"}})", "application/json");
  });
  srv.server().Post("/slow", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(800));
    res.set_content("{}", "application/json");
  });
  srv.start();

  auto provider = [&](const std::string& path, int ms = 2000) {
    return RemoteSignalProvider(SignalKind::genre, *Url::parse_http(srv.base() + path), std::chrono::milliseconds(ms));
  };
  auto error_kind = [&](const RemoteSignalProvider& p) {
    try {
      p.analyze(request_for(SignalKind::genre, "Hello there."));
    } catch (const SignalError& e) {
      return std::optional(e.kind());
    }
    return std::optional<SignalError::Kind>{};
  };

  const auto r = provider("/ok").analyze(request_for(SignalKind::genre, "Hello there."));
  CHECK(r.doc_scores.at("objective") == 0.7);
  REQUIRE(r.annotations.size() == 1);
  const auto sent = nlohmann::json::parse(seen_body);
  CHECK(sent.at("kind") == "genre");
  CHECK(sent.at("text") == "Hello there.");

  CHECK(error_kind(provider("/lang")) == SignalError::Kind::unsupported_language);
  CHECK(error_kind(provider("/down")) == SignalError::Kind::unavailable);
  CHECK(error_kind(provider("/garbage")) == SignalError::Kind::protocol);
  CHECK(error_kind(provider("/shape")) == SignalError::Kind::protocol);
  CHECK(error_kind(provider("/slow", 200)) == SignalError::Kind::timeout);

  const auto base = srv.base();
  srv.stop();
  const RemoteSignalProvider gone(SignalKind::genre, *Url::parse_http(base + "/ok"), std::chrono::milliseconds(500));
  CHECK(error_kind(gone) == SignalError::Kind::unavailable);
}
