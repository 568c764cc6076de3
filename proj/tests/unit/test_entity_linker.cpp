#include <doctest.h>

#include <algorithm>
#include <random>

#include "support/mocks.hpp"
#include "support/paths.hpp"
#include "verif/content_extractor.hpp"
#include "verif/entity_linker.hpp"
#include "verif/error.hpp"
#include "verif/text.hpp"

using namespace verif;
using testing_support::source_path;

namespace {

std::shared_ptr<const Gazetteer> shipped() {
  static const auto g = std::make_shared<const Gazetteer>(
      Gazetteer::load(source_path("data/gazetteer.jsonl"), TypeMapping::load(source_path("data/entity_types.json"))));
  return g;
}

std::vector<std::string> ids(const std::vector<EntityMention>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.entity_id);
  return out;
}

}  // namespace

TEST_CASE("type mapping") {
  const auto& m = TypeMapping::defaults();
  CHECK(m.map("dbo:Person") == EntityType::person);
  CHECK(m.map("dbo:City") == EntityType::location);
  CHECK(m.map("dbo:Company") == EntityType::organization);
  CHECK(m.map("Location") == EntityType::location);
  CHECK(m.map("dbo:Spaceship") == EntityType::other);
  CHECK(m.map("") == EntityType::other);
  const auto custom = TypeMapping::from_json({{"x:Human", "Person"}});
  CHECK(custom.map("x:Human") == EntityType::person);
  CHECK_THROWS_AS(TypeMapping::from_json({{"x:Human", "Alien"}}), ValidationError);
}

TEST_CASE("gazetteer validation") {
  CHECK_THROWS_AS(Gazetteer({{{}, "Q1", EntityType::person, "", ""}}), ValidationError);
  CHECK_THROWS_AS(Gazetteer({{{"A"}, "Q1", EntityType::person, "", ""}, {{"B"}, "Q1", EntityType::person, "", ""}}),
                  ValidationError);
  CHECK(shipped()->size() == 12);
  REQUIRE(shipped()->find("Q1"));
  CHECK(shipped()->find("Q1")->entity_type == EntityType::person);
  CHECK(shipped()->find("Q6")->entity_type == EntityType::other);
  CHECK_FALSE(shipped()->find("Q999"));
}

TEST_CASE("detect examples") {
  const auto& g = *shipped();
  CHECK(g.detect("").empty());

  const auto nyc = g.detect("She moved to New York City last year.");
  REQUIRE(nyc.size() == 1);
  CHECK(nyc[0].entity_id == "Q3");
  CHECK(nyc[0].surface == "New York City");
  CHECK(nyc[0].start == 13);
  CHECK(nyc[0].end == 26);
  CHECK(ids(g.detect("Upstate New York is large.")) == std::vector<std::string>{"Q4"});

  const auto lower = g.detect("protests in kyiv continued");
  REQUIRE(lower.size() == 1);
  CHECK(lower[0].entity_id == "Q2");
  CHECK(lower[0].surface == "kyiv");

  CHECK(ids(g.detect("The WHO said so.")) == std::vector<std::string>{"Q5"});
  CHECK(g.detect("Who said so? who knows.").empty());
  CHECK(g.detect("Kyivan cuisine and Berliners").empty());

  const auto cafe = g.detect("Caf\u00e9 pr\u00e8s de Kyiv");
  REQUIRE(cafe.size() == 1);
  CHECK(cafe[0].start == 13);
  CHECK(cafe[0].end == 17);
}

TEST_CASE("case-sensitive match wins over a longer insensitive one at the same position") {
  const Gazetteer g({{{"Apple"}, "A1", EntityType::organization, "", ""},
                     {{"apple pie"}, "A2", EntityType::other, "", ""}});
  CHECK(ids(g.detect("Apple pie")) == std::vector<std::string>{"A1"});
  CHECK(ids(g.detect("apple pie")) == std::vector<std::string>{"A2"});
}

TEST_CASE("ambiguous surface forms keep the first loaded entry") {
  const Gazetteer g({{{"Paris"}, "P1", EntityType::location, "", ""}, {{"Paris"}, "P2", EntityType::person, "", ""}});
  CHECK(ids(g.detect("Paris")) == std::vector<std::string>{"P1"});
}

TEST_CASE("property: mentions are sorted, non-overlapping, in bounds and match their surface") {
  const std::vector<std::string> words = {"Maria", "Keller", "Dr.", "New", "York", "City", "kyiv", "WHO", "who", "the",
                                          "EU",    "Berlin", ",",   "European", "Union", "said", "COVID-19", "ukraine"};
  std::mt19937 rng(5);
  for (int round = 0; round < 300; ++round) {
    std::string text;
    const int n = rng() % 25;
    for (int i = 0; i < n; ++i) text += words[rng() % words.size()] + (rng() % 4 ? " " : "  ");
    const auto ms = shipped()->detect(text);
    const auto cps = text::decode_utf8(text);
    std::size_t last_end = 0;
    for (const auto& m : ms) {
      CHECK(m.start >= last_end);
      CHECK(m.start < m.end);
      CHECK(m.end <= cps.size());
      CHECK(text::encode_utf8(cps.substr(m.start, m.end - m.start)) == m.surface);
      last_end = m.end;
    }
  }
}

TEST_CASE("cloud from the entities fixture: one person, three mentions") {
  const auto html = testing_support::read_file(source_path("fixtures/html/entities_article.html"));
  const auto content = extract(html);
  const EntityLinker linker(shipped());
  const auto mentions = linker.detect(content.text);
  CHECK(mentions.size() == 4);
  const auto cloud = linker.build_cloud(mentions);
  REQUIRE(cloud.size() == 1);
  CHECK(cloud[0].entity_id == "Q1");
  CHECK(cloud[0].display_name == "Maria Keller");
  CHECK(cloud[0].entity_type == EntityType::person);
  CHECK(cloud[0].mention_count == 3);
  CHECK_FALSE(cloud[0].abstract.empty());
  CHECK(linker.build_cloud({}).empty());
}

TEST_CASE("cloud ties sort by display name") {
  const EntityLinker linker(shipped());
  const auto cloud = linker.build_cloud(linker.detect("Kyiv. Berlin. Reuters. Reuters."));
  REQUIRE(cloud.size() == 3);
  CHECK(cloud[0].display_name == "Reuters");
  CHECK(cloud[1].display_name == "Berlin");
  CHECK(cloud[2].display_name == "Kyiv");
}

TEST_CASE("property: cloud counts and permutation invariance") {
  const EntityLinker linker(shipped());
  const auto ms = linker.detect(
      "Maria Keller met Jonas Weber in Berlin. Keller and the WHO discussed COVID-19 in Kyiv. "
      "The EU and Reuters covered the Global Vaccine Summit in New York City. Berlin again.");
  const auto cloud = linker.build_cloud(ms);
  std::size_t total = 0;
  for (const auto& c : cloud) {
    CHECK(c.mention_count >= 1);
    CHECK(c.entity_type != EntityType::other);
    total += c.mention_count;
  }
  CHECK(total <= ms.size());
  std::size_t other = 0;
  for (const auto& m : ms)
    if (shipped()->find(m.entity_id)->entity_type == EntityType::other) ++other;
  CHECK(total + other == ms.size());

  std::mt19937 rng(9);
  auto shuffled = ms;
  for (int i = 0; i < 30; ++i) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(linker.build_cloud(shuffled) == cloud);
  }
}

TEST_CASE("kb_lookup: local, missing, remote cached, remote failure") {
  const EntityLinker offline(shipped());
  CHECK(offline.kb_lookup("Q8").abstract == "Berlin is the capital of Germany.");
  CHECK_THROWS_AS(offline.kb_lookup("Q404"), NotFoundError);

  auto remote = std::make_shared<mocks::MapKbClient>();
  remote->records["Q500"] = {"A remote person.", "https://kb.example.org/entity/Q500", EntityType::person};
  const EntityLinker online(shipped(), remote);
  CHECK(online.kb_lookup("Q500").abstract == "A remote person.");
  CHECK(online.kb_lookup("Q500").entity_type == EntityType::person);
  CHECK(remote->calls == 1);
  CHECK_THROWS_AS(online.kb_lookup("Q501"), NotFoundError);
  online.kb_lookup("Q1");
  CHECK(remote->calls == 2);

  const auto cloud = online.build_cloud({{"Q500", "x", 0, 1}, {"Q501", "y", 2, 3}});
  REQUIRE(cloud.size() == 1);
  CHECK(cloud[0].entity_id == "Q500");
  CHECK(remote->calls == 3);

  auto broken = std::make_shared<mocks::MapKbClient>();
  broken->fail = true;
  const EntityLinker failing(shipped(), broken);
  CHECK_THROWS_AS(failing.kb_lookup("Q500"), NotFoundError);
  CHECK(failing.build_cloud({{"Q500", "x", 0, 1}}).empty());
}

TEST_CASE("missing gazetteer abstracts are filled from the remote") {
  auto g = std::make_shared<const Gazetteer>(
      std::vector<GazetteerEntry>{{{"Ada Lovelace"}, "Q7259", EntityType::person, "", ""}});
  auto remote = std::make_shared<mocks::MapKbClient>();
  remote->records["Q7259"] = {"Mathematician.", "https://kb.example.org/entity/Q7259", EntityType::other};
  const EntityLinker linker(g, remote);
  const auto cloud = linker.build_cloud(linker.detect("Ada Lovelace wrote notes."));
  REQUIRE(cloud.size() == 1);
  CHECK(cloud[0].abstract == "Mathematician.");
  CHECK(cloud[0].entity_type == EntityType::person);
  CHECK(cloud[0].kb_link == "https://kb.example.org/entity/Q7259");
}
