#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "support/mocks.hpp"
#include "verif/error.hpp"
#include "verif/segmenter.hpp"
#include "verif/signals.hpp"

using namespace verif;

namespace {

DocumentSignalResult framing_scores(std::map<std::string, double> scores) {
  DocumentSignalResult r;
  r.kind = SignalKind::framing;
  r.doc_scores = std::move(scores);
  return r;
}

DocumentSignalResult per_sentence(SignalKind kind, const std::vector<double>& confidences,
                                  std::vector<std::size_t> lengths = {}, const std::string& label = "") {
  DocumentSignalResult r;
  r.kind = kind;
  const auto& reg = LabelRegistry::defaults();
  const std::string l = label.empty() ? reg.labels(kind).front() : label;
  for (std::size_t i = 0; i < confidences.size(); ++i) r.annotations.push_back({kind, l, i, confidences[i]});
  r.sentence_lengths = lengths.empty() ? std::vector<std::size_t>(confidences.size(), 10) : std::move(lengths);
  return r;
}

ProviderResponse respond(std::vector<RawAnnotation> annotations, std::map<std::string, double> scores = {},
                         std::map<std::size_t, double> importance = {}) {
  return {std::move(scores), std::move(annotations), std::move(importance)};
}

}  // namespace

TEST_CASE("registry defaults") {
  const auto& r = LabelRegistry::defaults();
  CHECK(r.labels(SignalKind::framing).size() == 8);
  CHECK(r.labels(SignalKind::genre) == std::vector<std::string>{"objective", "opinionated", "satirical"});
  CHECK(r.labels(SignalKind::persuasion).size() == 23);
  CHECK(r.labels(SignalKind::subjectivity) == std::vector<std::string>{"subjective"});
  CHECK(r.labels(SignalKind::mgt) == std::vector<std::string>{"machine_generated"});
  CHECK(LabelRegistry::persuasion_groups().size() == 6);
  std::set<std::string> groups;
  for (const auto& label : r.labels(SignalKind::persuasion)) {
    const auto g = r.persuasion_group(label);
    REQUIRE(g);
    groups.insert(*g);
  }
  CHECK(groups.size() == 6);
  CHECK(r.persuasion_group("Doubt") == "attack on reputation");
  CHECK_FALSE(r.persuasion_group("Not_A_Technique"));
}

TEST_CASE("registry from JSON keeps missing kinds and validates groups") {
  const auto r = LabelRegistry::from_json({{"framing", {"A", "B"}}});
  CHECK(r.labels(SignalKind::framing) == std::vector<std::string>{"A", "B"});
  CHECK(r.labels(SignalKind::genre).size() == 3);
  LabelRegistry copy = LabelRegistry::defaults();
  CHECK_THROWS_AS(copy.set_persuasion_group("Doubt", "no such group"), ValidationError);
}

TEST_CASE("top_frames is strict, descending, ties lexical") {
  const auto r = framing_scores({{"Health and Safety", 0.9}, {"Economy and Resources", 0.85}, {"Crime and Punishment", 0.8},
                                 {"Politics", 0.4}});
  const auto top = top_frames(r, 0.8);
  REQUIRE(top.size() == 2);
  CHECK(top[0].first == "Health and Safety");
  CHECK(top[1].first == "Economy and Resources");
  CHECK(top_frames(framing_scores({{"A", 0.8}, {"B", 0.5}})).empty());
  const auto tied = top_frames(framing_scores({{"Zeta", 0.9}, {"Alpha", 0.9}}));
  REQUIRE(tied.size() == 2);
  CHECK(tied[0].first == "Alpha");
}

TEST_CASE("filter_highlights by importance and by label") {
  DocumentSignalResult f;
  f.kind = SignalKind::framing;
  f.importance = {{0, 1.0}, {1, 0.4}, {2, 0.0}};
  f.sentence_lengths = {5, 5, 5, 5};
  CHECK(filter_highlights(f, 0.0) == std::set<std::size_t>{0, 1});
  CHECK(filter_highlights(f, 1.0) == std::set<std::size_t>{0});
  CHECK(filter_highlights(f, 0.5) == std::set<std::size_t>{0});

  DocumentSignalResult p;
  p.kind = SignalKind::persuasion;
  p.annotations = {{SignalKind::persuasion, "Loaded_Language", 1, 0.7}, {SignalKind::persuasion, "Doubt", 2, 0.9}};
  p.sentence_lengths = {5, 5, 5};
  CHECK(filter_highlights(p, 0.8, std::string_view("Doubt")) == std::set<std::size_t>{2});
  CHECK(filter_highlights(p, 0.8, std::string_view("Loaded_Language")).empty());
  CHECK(filter_highlights(p, 0.0) == std::set<std::size_t>{1, 2});
}

TEST_CASE("property: filter_highlights is monotone in the slider") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int round = 0; round < 100; ++round) {
    DocumentSignalResult r;
    r.kind = round % 2 ? SignalKind::framing : SignalKind::persuasion;
    const std::size_t n = 1 + rng() % 15;
    r.sentence_lengths.assign(n, 10);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 3) r.importance[i] = u(rng);
      if (rng() % 2) r.annotations.push_back({r.kind, rng() % 2 ? "Doubt" : "Slogans", i, u(rng)});
    }
    std::vector<double> sliders(20);
    for (auto& s : sliders) s = u(rng);
    sliders.push_back(0.0);
    sliders.push_back(1.0);
    std::sort(sliders.begin(), sliders.end());
    std::set<std::size_t> prev = filter_highlights(r, sliders.front());
    for (std::size_t k = 1; k < sliders.size(); ++k) {
      const auto cur = filter_highlights(r, sliders[k]);
      CHECK(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
      prev = cur;
    }
  }
}

TEST_CASE("subjectivity gauge arithmetic and bands") {
  const auto half = subjectivity_gauge(per_sentence(SignalKind::subjectivity, {0.9, 0.1, 0.7, 0.2, 0.5, 0.0, 0.8, 0.4, 0.6, 0.3}));
  CHECK(half.percentage == 50.0);
  CHECK(half.level == "somewhat subjective");
  CHECK(half.per_sentence.at(4) == "subjective");
  CHECK(half.per_sentence.at(3) == "objective");
  const auto none = subjectivity_gauge(per_sentence(SignalKind::subjectivity, std::vector<double>(10, 0.1)));
  CHECK(none.percentage == 0.0);
  CHECK(none.level == "objective");
  const auto all = subjectivity_gauge(per_sentence(SignalKind::subjectivity, std::vector<double>(10, 0.9)));
  CHECK(all.percentage == 100.0);
  CHECK(all.level == "highly subjective");
  DocumentSignalResult empty;
  empty.kind = SignalKind::subjectivity;
  CHECK(subjectivity_gauge(empty).percentage == 0.0);
  CHECK(subjectivity_gauge(empty).level == "objective");
}

TEST_CASE("MGT bands and length weighting") {
  const auto& bands = GaugeBands::mgt_defaults();
  CHECK(bands.classify(0.0) == "highly likely human");
  CHECK(bands.classify(0.25) == "likely human");
  CHECK(bands.classify(0.5) == "likely machine generated");
  CHECK(bands.classify(0.75) == "highly likely machine generated");
  CHECK(bands.classify(1.0) == "highly likely machine generated");

  const auto two = mgt_gauge(per_sentence(SignalKind::mgt, {0.3, 0.9}, {20, 20}));
  CHECK(two.percentage == 50.0);
  CHECK(two.per_sentence.at(0) == "likely human");
  CHECK(two.per_sentence.at(1) == "highly likely machine generated");

  const auto weighted = mgt_gauge(per_sentence(SignalKind::mgt, {0.9, 0.1, 0.1}, {60, 20, 20}));
  CHECK(weighted.percentage == doctest::Approx(60.0));
  REQUIRE(weighted.sentence_percentage);
  CHECK(*weighted.sentence_percentage == doctest::Approx(100.0 / 3));
  CHECK(weighted.level == "likely machine generated");

  CHECK(mgt_gauge(per_sentence(SignalKind::mgt, {0, 0, 0})).percentage == 0.0);
  CHECK(mgt_gauge(per_sentence(SignalKind::mgt, {1, 1})).percentage == 100.0);
}

TEST_CASE("property: gauge level is a pure function of the percentage") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  const auto& sb = GaugeBands::subjectivity_defaults();
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<double> c(n);
    std::vector<std::size_t> len(n);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = u(rng);
      len[i] = 1 + rng() % 80;
    }
    const auto s = subjectivity_gauge(per_sentence(SignalKind::subjectivity, c, len));
    CHECK(s.percentage >= 0.0);
    CHECK(s.percentage <= 100.0);
    CHECK(s.level == sb.classify(s.percentage));
    const auto m = mgt_gauge(per_sentence(SignalKind::mgt, c, len));
    CHECK(m.percentage >= 0.0);
    CHECK(m.percentage <= 100.0);
    CHECK(m.level == GaugeBands::mgt_defaults().classify(m.percentage / 100.0));
  }
}

TEST_CASE("classify validates provider output against the registry") {
  const std::string text = "One sentence here. Another one.";
  const auto spans = segment(text);
  REQUIRE(spans.size() == 2);

  mocks::RecordingSignalProvider good(respond({{"Doubt", 1, 1.4}, {"Slogans", 0, -0.2}}));
  const auto r = classify(SignalKind::persuasion, text, spans, good, LabelRegistry::defaults(), "de");
  REQUIRE(r.annotations.size() == 2);
  CHECK(r.annotations[0].sentence_index == 0);
  CHECK(r.annotations[0].confidence == 0.0);
  CHECK(r.annotations[1].confidence == 1.0);
  CHECK(r.sentence_count() == 2);
  REQUIRE(good.requests().size() == 1);
  CHECK(good.requests()[0].language == "de");
  CHECK(good.requests()[0].sentences == spans);

  auto kind_of = [&](const ProviderResponse& resp, SignalKind kind = SignalKind::persuasion) {
    mocks::RecordingSignalProvider p(resp);
    try {
      classify(kind, text, spans, p);
    } catch (const SignalError& e) {
      return std::optional(e.kind());
    }
    return std::optional<SignalError::Kind>{};
  };
  CHECK(kind_of(respond({{"Made_Up_Label", 0, 0.5}})) == SignalError::Kind::bad_label);
  CHECK(kind_of(respond({}, {{"Not a frame", 0.5}}), SignalKind::framing) == SignalError::Kind::bad_label);
  CHECK(kind_of(respond({{"Doubt", 2, 0.5}})) == SignalError::Kind::protocol);
  CHECK(kind_of(respond({{"Doubt", 0, std::nan("")}})) == SignalError::Kind::protocol);
  CHECK(kind_of(respond({}, {}, {{5, 1.0}}), SignalKind::framing) == SignalError::Kind::protocol);

  mocks::FailingSignalProvider down(SignalKind::genre);
  CHECK_THROWS_AS(classify(SignalKind::genre, text, spans, down), SignalError);

  struct Throws final : SignalProvider {
    ProviderResponse analyze(const SignalRequest&) const override { throw std::runtime_error("socket closed"); }
  } throws;
  try {
    classify(SignalKind::mgt, text, spans, throws);
    FAIL("expected SignalError");
  } catch (const SignalError& e) {
    CHECK(e.kind() == SignalError::Kind::unavailable);
    CHECK(e.signal() == SignalKind::mgt);
  }
  CHECK_THROWS_AS(classify(SignalKind::mgt, text, {{0, 99, 0}}, good), ValidationError);
}

TEST_CASE("classify normalizes importance and short-circuits empty text") {
  const std::string text = "A b c. D e f. G h i.";
  const auto spans = segment(text);
  mocks::RecordingSignalProvider p(respond({}, {{"Politics and International Relations", 0.7}}, {{0, 0.2}, {2, 0.5}}));
  const auto r = classify(SignalKind::framing, text, spans, p);
  CHECK(r.importance.at(2) == 1.0);
  CHECK(r.importance.at(0) == doctest::Approx(0.4));

  mocks::RecordingSignalProvider never;
  const auto e = classify(SignalKind::framing, "   ", {}, never);
  CHECK(e.annotations.empty());
  CHECK(e.doc_scores.empty());
  CHECK(never.requests().empty());
}

TEST_CASE("property: classify never emits labels outside the registry") {
  std::mt19937 rng(77);
  const std::string text = "One. Two. Three. Four.";
  const auto spans = segment(text);
  const std::vector<std::string> pool = {"Doubt", "Slogans", "bogus", "Loaded_Language", "", "doubt"};
  const auto& reg = LabelRegistry::defaults();
  for (int round = 0; round < 200; ++round) {
    std::vector<RawAnnotation> anns;
    const int n = rng() % 5;
    for (int i = 0; i < n; ++i) anns.push_back({pool[rng() % pool.size()], rng() % 4, 0.5});
    mocks::RecordingSignalProvider p(respond(anns));
    try {
      const auto r = classify(SignalKind::persuasion, text, spans, p);
      for (const auto& a : r.annotations) CHECK(reg.contains(SignalKind::persuasion, a.label));
    } catch (const SignalError& e) {
      CHECK(e.kind() == SignalError::Kind::bad_label);
    }
  }
}

TEST_CASE("wire format round trip and protocol errors") {
  const ProviderResponse resp{{{"objective", 0.25}}, {{"Doubt", 1, 0.5}}, {{0, 1.0}, {3, 0.5}}};
  const auto j = to_json(resp);
  CHECK(j.at("importance").contains("3"));
  CHECK(provider_response_from_json(j, SignalKind::genre) == resp);
  CHECK(provider_response_from_json(nlohmann::json::object(), SignalKind::genre) == ProviderResponse{});
  for (const auto& bad : {nlohmann::json::array(), nlohmann::json{{"annotations", "x"}},
                          nlohmann::json{{"annotations", {{{"label", "a"}}}}},
                          nlohmann::json{{"importance", {{"notanumber", 0.3}}}},
                          nlohmann::json{{"doc_scores", {{"a", "high"}}}}}) {
    try {
      provider_response_from_json(bad, SignalKind::framing);
      FAIL("expected protocol error for " << bad.dump());
    } catch (const SignalError& e) {
      CHECK(e.kind() == SignalError::Kind::protocol);
    }
  }
  SignalRequest req{SignalKind::mgt, "Hi. There.", {{0, 3, 0}, {4, 10, 1}}, "en-GB"};
  const auto rj = to_json(req);
  CHECK(rj.at("kind") == "mgt");
  CHECK(rj.at("sentences").size() == 2);
  const auto back = signal_request_from_json(rj);
  CHECK(back.text == req.text);
  CHECK(back.sentences == req.sentences);
  CHECK(back.language == "en-GB");
}
