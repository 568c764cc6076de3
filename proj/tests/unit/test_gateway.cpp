#include <doctest.h>

#include <random>
#include <set>

#include "support/services.hpp"
#include "verif/error.hpp"
#include "verif/gateway.hpp"

using namespace verif;
using namespace std::chrono_literals;
using testing_support::kArticleUrl;
using testing_support::offline_services;

namespace {

AnalysisReport run(Gateway& gw, SubmissionKind kind, const std::string& value) {
  const auto outcome = gw.analyze({kind, value, std::nullopt});
  REQUIRE(gw.wait(outcome.report_id, 10s));
  return gw.get_report(outcome.report_id);
}

std::set<std::string> with_status(const AnalysisReport& r, SectionStatus status) {
  std::set<std::string> out;
  for (const auto& [name, s] : r.sections)
    if (s.status == status) out.insert(name);
  return out;
}

std::set<std::string> all_sections_but(std::initializer_list<std::string> excluded) {
  std::set<std::string> out(section_names().begin(), section_names().end());
  for (const auto& e : excluded) out.erase(e);
  return out;
}

}  // namespace

TEST_CASE("tool recommendations") {
  const auto image = recommend_tools("image");
  REQUIRE(image.size() == 7);
  CHECK(image.front() == "image magnifier");
  CHECK(image.back() == "provenance (C2PA)");
  const auto video = recommend_tools("video");
  REQUIRE(video.size() == 5);
  CHECK(video.back() == "deepfake");
  CHECK(recommend_tools("audio").empty());
  CHECK(recommend_tools(MediaRef{"u", MediaType::video, std::nullopt, 0, 0}).tools == video);
}

TEST_CASE("plain text: every article section ok, no submitted domain, stance skipped") {
  Gateway gw(offline_services());
  const auto r = run(gw, SubmissionKind::plain_text,
                     "Vaccines contain microchips that track people through 5G networks, says Maria Keller in Berlin.");
  CHECK(r.complete);
  CHECK(r.sections.size() == section_names().size());
  CHECK(with_status(r, SectionStatus::ok) == all_sections_but({"domain_submitted", "stance"}));
  CHECK(with_status(r, SectionStatus::skipped) == std::set<std::string>{"domain_submitted", "stance"});
  const auto& claims = r.sections.at("claim_matches").payload.at("matches");
  REQUIRE_FALSE(claims.empty());
  CHECK(claims[0].at("record_id") == "dbk-001");
  CHECK(r.sections.at("media").payload.at("items").empty());
  CHECK(r.sections.at("signals.subjectivity").payload.contains("gauge"));
}

TEST_CASE("article URL runs every non-stance section and keeps media order") {
  Gateway gw(offline_services());
  const auto r = run(gw, SubmissionKind::url, kArticleUrl);
  CHECK_FALSE(r.scraper_error);
  CHECK(with_status(r, SectionStatus::ok) == all_sections_but({"stance"}));
  CHECK(r.sections.at("domain_submitted").payload.at("resolved_key") == "news.example");

  const auto& items = r.sections.at("media").payload.at("items");
  REQUIRE(items.size() == 2);
  CHECK(items[0].at("url") == "https://news.example/images/img00.png");
  CHECK(items[1].at("url") == "https://news.example/images/img02.png");
  CHECK(items[0].at("document_position").get<int>() < items[1].at("document_position").get<int>());
  CHECK(items[0].at("matches").at(0).at("record_id") == "dbk-001");
  CHECK(items[1].at("matches").at(0).at("record_id") == "dbk-004");
  CHECK(items[0].at("tools").size() == 7);

  const auto& links = r.sections.at("domain_links").payload;
  CHECK(links.dump().find("dailyfakes.example") != std::string::npos);
  bool keller = false;
  for (const auto& c : r.sections.at("entities").payload.at("cloud"))
    if (c.at("entity_id") == "Q1") keller = true;
  CHECK(keller);
}

TEST_CASE("scraper failure: report still created, submitted domain checked, rest skipped") {
  Gateway gw(offline_services());
  const auto outcome = gw.analyze({SubmissionKind::url, "https://dailyfakes.example/missing", std::nullopt});
  REQUIRE(outcome.scraper_error);
  REQUIRE(gw.wait(outcome.report_id, 5s));
  const auto r = gw.get_report(outcome.report_id);
  CHECK(r.scraper_error);
  CHECK(with_status(r, SectionStatus::ok) == std::set<std::string>{"domain_submitted"});
  CHECK(with_status(r, SectionStatus::skipped) == all_sections_but({"domain_submitted"}));
  CHECK(r.sections.at("domain_submitted").payload.at("flag") == "Warning");
  CHECK(gw.metrics().snapshot().scraper_error == 1);
}

TEST_CASE("video URL runs only stance and the submitted domain") {
  Gateway gw(offline_services());
  const auto r = run(gw, SubmissionKind::url, "https://www.youtube.com/watch?v=abc123");
  CHECK(with_status(r, SectionStatus::ok) == std::set<std::string>{"domain_submitted", "stance"});
  const auto& comments = r.sections.at("stance").payload.at("comments");
  CHECK(comments.size() == 10);
  for (const auto& c : comments) {
    CHECK(c.at("label") != "query");
    for (const auto& rep : c.at("replies")) CHECK(rep.at("label") != "question");
  }
}

TEST_CASE("media upload hashes the bytes and searches image claims") {
  Gateway gw(offline_services());
  const auto bytes = testing_support::read_file(testing_support::source_path("fixtures/images/img01.png"));
  const auto r = run(gw, SubmissionKind::media_upload, bytes);
  CHECK(with_status(r, SectionStatus::ok) == std::set<std::string>{"media"});
  const auto& item = r.sections.at("media").payload.at("items").at(0);
  CHECK(item.at("media_type") == "image");
  CHECK(item.at("matches").at(0).at("record_id") == "dbk-002");
  CHECK(item.at("matches").at(0).at("distance") == 0);
  CHECK(r.submission_value == std::to_string(bytes.size()) + " bytes");

  const auto bad = run(gw, SubmissionKind::media_upload, "definitely not an image");
  CHECK(bad.sections.at("media").status == SectionStatus::ok);
  CHECK(bad.sections.at("media").payload.at("items").at(0).contains("error"));
}

TEST_CASE("direct media URL is hashed through the fetcher") {
  Gateway gw(offline_services());
  const auto r = run(gw, SubmissionKind::url, "https://news.example/images/img02.png");
  CHECK(with_status(r, SectionStatus::ok) == std::set<std::string>{"domain_submitted", "media"});
  CHECK(r.sections.at("media").payload.at("items").at(0).at("matches").at(0).at("record_id") == "dbk-004");
}

TEST_CASE("invalid submissions are rejected synchronously") {
  Gateway gw(offline_services());
  CHECK_THROWS_AS(gw.analyze({SubmissionKind::plain_text, "", std::nullopt}), ValidationError);
  CHECK_THROWS_AS(gw.analyze({SubmissionKind::url, "ftp://x.example/a", std::nullopt}), ValidationError);
  CHECK_THROWS_AS(gw.get_report("no-such-report"), NotFoundError);
  CHECK_FALSE(gw.wait("no-such-report", 10ms));
}

TEST_CASE("property: exactly the failing signal providers' sections error") {
  const std::string text = "Officials said the vaccine plan is a total disaster. Is it really safe?";
  for (unsigned mask = 0; mask < 32; ++mask) {
    auto services = offline_services();
    std::set<std::string> expected;
    for (std::size_t i = 0; i < kSignalKinds.size(); ++i) {
      if (!(mask & (1u << i))) continue;
      services->signal_providers[kSignalKinds[i]] = std::make_shared<mocks::FailingSignalProvider>(kSignalKinds[i]);
      expected.insert(signal_section(kSignalKinds[i]));
    }
    Gateway gw(services);
    const auto r = run(gw, SubmissionKind::plain_text, text);
    CHECK(with_status(r, SectionStatus::error) == expected);
    auto ok = all_sections_but({"domain_submitted", "stance"});
    for (const auto& e : expected) ok.erase(e);
    CHECK(with_status(r, SectionStatus::ok) == ok);
    const auto snap = gw.metrics().snapshot();
    for (const auto& e : expected) CHECK(snap.section_errors.at(e) == 1);
  }
}

TEST_CASE("stalled providers are cut off at their deadline, in parallel") {
  auto gate = std::make_shared<mocks::Gate>();
  auto services = offline_services(400ms);
  for (auto kind : kSignalKinds) services->signal_providers[kind] = std::make_shared<mocks::StallingSignalProvider>(gate);
  {
    Gateway gw(services);
    const auto t0 = std::chrono::steady_clock::now();
    const auto outcome = gw.analyze({SubmissionKind::plain_text, "Some text to classify. And more.", std::nullopt});

    std::this_thread::sleep_for(100ms);
    const auto partial = gw.get_report(outcome.report_id);
    CHECK_FALSE(partial.complete);
    CHECK(partial.sections.at("signals.genre").status == SectionStatus::running);
    CHECK(partial.sections.size() == section_names().size());

    REQUIRE(gw.wait(outcome.report_id, 5s));
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    CHECK(elapsed < 400ms + 500ms);
    const auto r = gw.get_report(outcome.report_id);
    for (auto kind : kSignalKinds) {
      const auto& s = r.sections.at(signal_section(kind));
      CHECK(s.status == SectionStatus::error);
      CHECK(s.error == "deadline of 400 ms exceeded");
    }
    CHECK(r.sections.at("entities").status == SectionStatus::ok);
  }
  gate->release();
}

TEST_CASE("reports round-trip through JSON and the log") {
  testing_support::TempDir dir;
  auto services = offline_services();
  services->config.report_log = dir.file("reports.jsonl");
  std::string id;
  AnalysisReport original;
  {
    Gateway gw(services);
    original = run(gw, SubmissionKind::plain_text, "Berlin hospitals reported record numbers.");
    id = original.report_id;
    const auto back = analysis_report_from_json(to_json(original));
    CHECK(to_json(back) == to_json(original));
  }
  Gateway reloaded(services);
  const auto r = reloaded.get_report(id);
  CHECK(to_json(r) == to_json(original));
  CHECK_THROWS_AS(analysis_report_from_json({{"report_id", "x"}}), ValidationError);
}

TEST_CASE("metrics counters are monotone and start at zero") {
  Gateway gw(offline_services());
  auto prev = gw.metrics().snapshot();
  CHECK(prev.total_requests() == 0);
  CHECK(prev.scraper_error == 0);
  CHECK(prev.server_error_fraction() == 0.0);
  std::mt19937 rng(1);
  const std::vector<int> statuses = {200, 202, 400, 404, 502};
  for (int i = 0; i < 50; ++i) {
    const int status = statuses[rng() % statuses.size()];
    gw.metrics().record_response("POST /api/v1/analyze", status);
    if (status == 502) gw.metrics().record_scraper_error();
    const auto cur = gw.metrics().snapshot();
    CHECK(cur.total_requests() == prev.total_requests() + 1);
    CHECK(cur.scraper_error >= prev.scraper_error);
    for (const auto& [code, n] : prev.responses) CHECK(cur.responses.at(code) >= n);
    std::uint64_t by_endpoint = 0;
    for (const auto& [_, n] : cur.responses_by_endpoint.at("POST /api/v1/analyze")) by_endpoint += n;
    CHECK(by_endpoint == cur.requests.at("POST /api/v1/analyze"));
    prev = cur;
  }
}
