#include <doctest.h>

#include <fstream>

#include "support/paths.hpp"
#include "verif/error.hpp"
#include "verif/service_config.hpp"
#include "verif/signal_providers.hpp"

using namespace verif;
using nlohmann::json;
using testing_support::source_path;

TEST_CASE("section names are fixed and ordered") {
  const auto& names = section_names();
  REQUIRE(names.size() == 12);
  CHECK(names.front() == "claim_matches");
  CHECK(names.back() == "stance");
  CHECK(signal_section(SignalKind::mgt) == "signals.mgt");
}

TEST_CASE("shipped config loads with paths relative to the file") {
  const auto c = ServiceConfig::load(source_path("config/verifd.json"));
  CHECK(c.port == 8080);
  CHECK(c.claim_threshold == 40.0);
  CHECK(c.max_image_distance == 10);
  CHECK(std::filesystem::exists(c.claims_seed));
  CHECK(std::filesystem::path(c.claims_seed).is_absolute());
  CHECK(std::filesystem::is_directory(c.lexicon_dir));
  CHECK(std::filesystem::is_directory(c.video_fixtures));
  CHECK(c.signal_providers.size() == 5);
  CHECK(c.deadline_for("media") == std::chrono::milliseconds(30000));
  CHECK(c.deadline_for("entities") == std::chrono::milliseconds(20000));
  CHECK(c.frame_threshold == 0.8);
}

TEST_CASE("empty config takes defaults") {
  const auto c = ServiceConfig::from_json(json::object(), "/tmp");
  CHECK(c.host == "127.0.0.1");
  CHECK(c.claims_seed.empty());
  CHECK(c.default_deadline == std::chrono::milliseconds(20000));
  CHECK(c.fetch.max_redirects == 10);
}

TEST_CASE("gauge bands can be overridden") {
  const json doc = {{"signals", {{"subjectivity_bands", {{"bands", {{{"below", 50}, {"label", "low"}}}}, {"top_label", "high"}}}}}};
  const auto c = ServiceConfig::from_json(doc, "/tmp");
  CHECK(c.subjectivity_bands.classify(49.9) == "low");
  CHECK(c.subjectivity_bands.classify(50) == "high");
}

TEST_CASE("invalid configs are rejected") {
  const std::vector<json> bad = {
      json::array(),
      {{"listen", "localhost"}},
      {{"listen", {{"port", "eighty"}}}},
      {{"claims", {{"seed", 12}}}},
      {{"signals", {{"providers", {{"sarcasm", "baseline"}}}}}},
      {{"signals", {{"providers", {{"genre", 1}}}}}},
      {{"deadlines_ms", {{"default", 0}}}},
      {{"deadlines_ms", {{"media", 2.5}}}},
      {{"deadlines_ms", {{"not_a_section", 100}}}},
      {{"signals", {{"mgt_bands", {{"bands", {{{"below", 0.5}, {"label", "a"}}, {{"below", 0.4}, {"label", "b"}}}},
                                   {"top_label", "c"}}}}}},
      {{"signals", {{"mgt_bands", {{"bands", json::array()}}}}}},
  };
  for (const auto& doc : bad) CHECK_THROWS_AS(ServiceConfig::from_json(doc, "/tmp"), ValidationError);
  CHECK_THROWS_AS(ServiceConfig::load("/nonexistent/verifd.json"), ValidationError);

  testing_support::TempDir dir;
  std::ofstream(dir.file("broken.json")) << "{ nope";
  CHECK_THROWS_AS(ServiceConfig::load(dir.file("broken.json")), ValidationError);
}

TEST_CASE("services build from the shipped data") {
  const auto c = ServiceConfig::with_data_dir(source_path("data"));
  const auto s = Services::build(c);
  CHECK(s->claims->size() == 30);
  CHECK(s->signal_providers.size() == 5);
  for (const auto& [kind, p] : s->signal_providers) CHECK(dynamic_cast<const BaselineProvider*>(p.get()));
  CHECK(s->labels->labels(SignalKind::framing).size() == 8);
  CHECK(s->entities->kb_lookup("Q2").entity_type == EntityType::location);
  CHECK(s->stance);
  CHECK_FALSE(s->videos);
  CHECK(s->fetcher);
}

TEST_CASE("remote providers are built from URLs, and bad settings fail the build") {
  auto c = ServiceConfig::with_data_dir(source_path("data"));
  c.signal_providers[SignalKind::genre] = "http://127.0.0.1:9/genre";
  c.stance_provider = "http://127.0.0.1:9/stance";
  c.video_fixtures = source_path("fixtures/stance");
  const auto s = Services::build(c);
  CHECK(dynamic_cast<const RemoteSignalProvider*>(s->signal_providers.at(SignalKind::genre).get()));
  CHECK(dynamic_cast<const RemoteStanceProvider*>(s->stance.get()));
  CHECK(dynamic_cast<const FixtureVideoClient*>(s->videos.get()));

  c.signal_providers[SignalKind::genre] = "gpt";
  CHECK_THROWS_AS(Services::build(c), ValidationError);
  c.signal_providers[SignalKind::genre] = "baseline";
  c.stance_provider = "telepathy";
  CHECK_THROWS_AS(Services::build(c), ValidationError);
}
