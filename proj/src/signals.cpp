#include "verif/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "verif/text.hpp"

namespace verif {
namespace {

const std::vector<std::pair<std::string, std::string>>& default_persuasion() {
  static const std::vector<std::pair<std::string, std::string>> techniques = {
      {"Name_Calling-Labeling", "attack on reputation"},
      {"Guilt_by_Association", "attack on reputation"},
      {"Doubt", "attack on reputation"},
      {"Appeal_to_Hypocrisy", "attack on reputation"},
      {"Questioning_the_Reputation", "attack on reputation"},
      {"Flag_Waving", "justification"},
      {"Appeal_to_Authority", "justification"},
      {"Appeal_to_Popularity", "justification"},
      {"Appeal_to_Values", "justification"},
      {"Appeal_to_Fear-Prejudice", "justification"},
      {"Straw_Man", "distraction"},
      {"Red_Herring", "distraction"},
      {"Whataboutism", "distraction"},
      {"Causal_Oversimplification", "simplification"},
      {"False_Dilemma-No_Choice", "simplification"},
      {"Consequential_Oversimplification", "simplification"},
      {"Slogans", "call"},
      {"Conversation_Killer", "call"},
      {"Appeal_to_Time", "call"},
      {"Loaded_Language", "manipulative wording"},
      {"Obfuscation-Vagueness-Confusion", "manipulative wording"},
      {"Exaggeration-Minimisation", "manipulative wording"},
      {"Repetition", "manipulative wording"},
  };
  return techniques;
}

LabelRegistry build_defaults() {
  LabelRegistry r;
  r.set_labels(SignalKind::framing, {"Economy and Resources", "Religious, Ethical and Cultural",
                                     "Fairness, Equality and Rights", "Law and Justice System", "Crime and Punishment",
                                     "Security, Defense and Well-being", "Health and Safety",
                                     "Politics and International Relations"});
  r.set_labels(SignalKind::genre, {"objective", "opinionated", "satirical"});
  std::vector<std::string> persuasion;
  for (const auto& [label, group] : default_persuasion()) {
    persuasion.push_back(label);
    r.set_persuasion_group(label, group);
  }
  r.set_labels(SignalKind::persuasion, std::move(persuasion));
  r.set_labels(SignalKind::subjectivity, {"subjective"});
  r.set_labels(SignalKind::mgt, {"machine_generated"});
  return r;
}

[[noreturn]] void protocol(SignalKind kind, const std::string& what) {
  throw SignalError(SignalError::Kind::protocol, kind, std::string(to_string(kind)) + " provider: " + what);
}

double number_field(const nlohmann::json& j, SignalKind kind, const char* what) {
  if (!j.is_number()) protocol(kind, std::string(what) + " must be a number");
  return j.get<double>();
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::framing: return "framing";
    case SignalKind::genre: return "genre";
    case SignalKind::persuasion: return "persuasion";
    case SignalKind::subjectivity: return "subjectivity";
    case SignalKind::mgt: return "mgt";
  }
  return "framing";
}

std::optional<SignalKind> signal_kind_from_string(std::string_view name) {
  for (auto k : kSignalKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::string_view to_string(SignalError::Kind kind) {
  switch (kind) {
    case SignalError::Kind::timeout: return "timeout";
    case SignalError::Kind::protocol: return "protocol";
    case SignalError::Kind::bad_label: return "bad_label";
    case SignalError::Kind::unsupported_language: return "unsupported_language";
    case SignalError::Kind::unavailable: return "unavailable";
  }
  return "unavailable";
}

// --- registry ---------------------------------------------------------------

const LabelRegistry& LabelRegistry::defaults() {
  static const LabelRegistry registry = build_defaults();
  return registry;
}

LabelRegistry LabelRegistry::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("label registry must be a JSON object");
  LabelRegistry r = defaults();
  for (auto kind : kSignalKinds) {
    const std::string key(to_string(kind));
    if (!doc.contains(key)) continue;
    const auto& entry = doc.at(key);
    std::vector<std::string> labels;
    if (kind == SignalKind::persuasion && entry.is_object()) {
      r.groups_.clear();
      // Object keys iterate sorted, so a file-supplied technique list ends up in lexical order.
      for (const auto& [label, group] : entry.items()) {
        if (!group.is_string()) throw ValidationError("persuasion group must be a string: " + label);
        labels.push_back(label);
        r.set_persuasion_group(label, group.get<std::string>());
      }
    } else if (entry.is_array()) {
      for (const auto& l : entry) {
        if (!l.is_string()) throw ValidationError("labels must be strings");
        labels.push_back(l.get<std::string>());
      }
    } else {
      throw ValidationError("bad label list for " + key);
    }
    if (labels.empty()) throw ValidationError("label list for " + key + " is empty");
    r.set_labels(kind, std::move(labels));
  }
  return r;
}

const std::vector<std::string>& LabelRegistry::labels(SignalKind kind) const {
  static const std::vector<std::string> empty;
  const auto it = labels_.find(kind);
  return it == labels_.end() ? empty : it->second;
}

bool LabelRegistry::contains(SignalKind kind, std::string_view label) const {
  const auto& l = labels(kind);
  return std::find(l.begin(), l.end(), label) != l.end();
}

std::optional<std::string> LabelRegistry::persuasion_group(std::string_view technique) const {
  const auto it = groups_.find(technique);
  if (it == groups_.end()) return std::nullopt;
  return it->second;
}

void LabelRegistry::set_labels(SignalKind kind, std::vector<std::string> labels) { labels_[kind] = std::move(labels); }

void LabelRegistry::set_persuasion_group(const std::string& technique, const std::string& group) {
  const auto& groups = persuasion_groups();
  if (std::find(groups.begin(), groups.end(), group) == groups.end())
    throw ValidationError("unknown persuasion group: " + group);
  groups_[technique] = group;
}

const std::vector<std::string>& LabelRegistry::persuasion_groups() {
  static const std::vector<std::string> groups = {"justification", "simplification",       "distraction",
                                                  "call",          "manipulative wording", "attack on reputation"};
  return groups;
}

// --- wire format ------------------------------------------------------------

nlohmann::json to_json(const SignalRequest& r) {
  nlohmann::json sentences = nlohmann::json::array();
  for (const auto& s : r.sentences) sentences.push_back({{"start", s.start}, {"end", s.end}});
  return {{"kind", to_string(r.kind)}, {"text", r.text}, {"sentences", sentences}, {"language", r.language}};
}

nlohmann::json to_json(const ProviderResponse& r) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [label, conf] : r.doc_scores) doc[label] = conf;
  nlohmann::json annotations = nlohmann::json::array();
  for (const auto& a : r.annotations)
    annotations.push_back({{"label", a.label}, {"sentence_index", a.sentence_index}, {"confidence", a.confidence}});
  nlohmann::json importance = nlohmann::json::object();
  for (const auto& [idx, score] : r.importance) importance[std::to_string(idx)] = score;
  return {{"doc_scores", doc}, {"annotations", annotations}, {"importance", importance}};
}

ProviderResponse provider_response_from_json(const nlohmann::json& j, SignalKind kind) {
  if (!j.is_object()) protocol(kind, "response must be a JSON object");
  ProviderResponse r;
  if (j.contains("doc_scores")) {
    const auto& d = j.at("doc_scores");
    if (!d.is_object()) protocol(kind, "doc_scores must be an object");
    for (const auto& [label, conf] : d.items()) r.doc_scores[label] = number_field(conf, kind, "doc_scores value");
  }
  if (j.contains("annotations")) {
    const auto& a = j.at("annotations");
    if (!a.is_array()) protocol(kind, "annotations must be an array");
    for (const auto& item : a) {
      if (!item.is_object() || !item.contains("label") || !item.at("label").is_string() ||
          !item.contains("sentence_index") || !item.at("sentence_index").is_number_integer() ||
          !item.contains("confidence"))
        protocol(kind, "malformed annotation");
      const auto idx = item.at("sentence_index").get<long long>();
      if (idx < 0) protocol(kind, "negative sentence_index");
      r.annotations.push_back({item.at("label").get<std::string>(), static_cast<std::size_t>(idx),
                               number_field(item.at("confidence"), kind, "confidence")});
    }
  }
  if (j.contains("importance")) {
    const auto& imp = j.at("importance");
    if (!imp.is_object()) protocol(kind, "importance must be an object keyed by sentence index");
    for (const auto& [key, score] : imp.items()) {
      if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos)
        protocol(kind, "importance key is not a sentence index: " + key);
      r.importance[std::stoul(key)] = number_field(score, kind, "importance value");
    }
  }
  return r;
}

SignalRequest signal_request_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("signal request must be a JSON object");
  SignalRequest r;
  const auto kind = signal_kind_from_string(j.value("kind", ""));
  if (!kind) throw ValidationError("unknown signal kind");
  r.kind = *kind;
  r.text = j.value("text", "");
  r.language = j.value("language", "en");
  if (j.contains("sentences")) {
    std::size_t i = 0;
    for (const auto& s : j.at("sentences"))
      r.sentences.push_back({s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>(), i++});
  }
  return r;
}

nlohmann::json to_json(const DocumentSignalResult& r) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [label, conf] : r.doc_scores) doc[label] = conf;
  nlohmann::json annotations = nlohmann::json::array();
  for (const auto& a : r.annotations)
    annotations.push_back({{"label", a.label}, {"sentence_index", a.sentence_index}, {"confidence", a.confidence}});
  nlohmann::json importance = nlohmann::json::object();
  for (const auto& [idx, score] : r.importance) importance[std::to_string(idx)] = score;
  return {{"kind", to_string(r.kind)},
          {"doc_scores", doc},
          {"annotations", annotations},
          {"importance", importance},
          {"sentence_count", r.sentence_count()}};
}

// --- classify ---------------------------------------------------------------

DocumentSignalResult classify(SignalKind kind, std::string_view text, const std::vector<SentenceSpan>& sentences,
                              const SignalProvider& provider, const LabelRegistry& registry,
                              std::string_view language) {
  DocumentSignalResult result;
  result.kind = kind;
  if (text::normalize_whitespace(text).empty()) return result;

  const auto length = text::codepoint_length(text);
  if (!spans_valid(sentences, length)) throw ValidationError("sentence spans are not valid for the text");
  for (const auto& s : sentences) result.sentence_lengths.push_back(s.length());

  SignalRequest request{kind, std::string(text), sentences, std::string(language.empty() ? "en" : language)};
  ProviderResponse response;
  try {
    response = provider.analyze(request);
  } catch (const SignalError&) {
    throw;
  } catch (const std::exception& e) {
    throw SignalError(SignalError::Kind::unavailable, kind, std::string(to_string(kind)) + " provider: " + e.what());
  }

  auto check_label = [&](const std::string& label) {
    if (!registry.contains(kind, label))
      throw SignalError(SignalError::Kind::bad_label, kind,
                        std::string(to_string(kind)) + " provider returned unknown label: " + label);
  };
  auto check_number = [&](double v) {
    if (!std::isfinite(v)) protocol(kind, "non-finite score");
    return clamp01(v);
  };

  for (const auto& [label, conf] : response.doc_scores) {
    check_label(label);
    result.doc_scores[label] = check_number(conf);
  }
  for (const auto& a : response.annotations) {
    check_label(a.label);
    if (a.sentence_index >= sentences.size()) protocol(kind, "annotation sentence_index out of range");
    result.annotations.push_back({kind, a.label, a.sentence_index, check_number(a.confidence)});
  }
  std::sort(result.annotations.begin(), result.annotations.end(), [](const auto& a, const auto& b) {
    if (a.sentence_index != b.sentence_index) return a.sentence_index < b.sentence_index;
    return a.label < b.label;
  });

  double max_importance = 0.0;
  for (const auto& [idx, score] : response.importance) {
    if (idx >= sentences.size()) protocol(kind, "importance sentence index out of range");
    if (!std::isfinite(score)) protocol(kind, "non-finite importance");
    const double v = std::max(score, 0.0);
    result.importance[idx] = v;
    max_importance = std::max(max_importance, v);
  }
  if (max_importance > 0.0) {
    for (auto& [idx, score] : result.importance) score = score / max_importance;
    // Division can land a hair off 1 for the maximum itself.
    for (auto& [idx, score] : result.importance)
      if (response.importance.at(idx) == max_importance) score = 1.0;
  }
  return result;
}

// --- views ------------------------------------------------------------------

std::vector<std::pair<std::string, double>> top_frames(const DocumentSignalResult& result, double threshold) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [label, conf] : result.doc_scores)
    if (conf > threshold) out.emplace_back(label, conf);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::set<std::size_t> filter_highlights(const DocumentSignalResult& result, double slider,
                                        std::optional<std::string_view> selected_label) {
  std::set<std::size_t> out;
  if (result.kind == SignalKind::framing || result.kind == SignalKind::genre) {
    for (const auto& [idx, score] : result.importance)
      if (score > 0.0 && score >= slider) out.insert(idx);
    return out;
  }
  for (const auto& a : result.annotations) {
    if (selected_label && a.label != *selected_label) continue;
    if (a.confidence > 0.0 && a.confidence >= slider) out.insert(a.sentence_index);
  }
  return out;
}

const std::string& GaugeBands::classify(double value) const {
  for (const auto& b : bands)
    if (value < b.upper) return b.label;
  return top_label;
}

const GaugeBands& GaugeBands::subjectivity_defaults() {
  static const GaugeBands bands{{{33.34, "objective"}, {66.67, "somewhat subjective"}}, "highly subjective"};
  return bands;
}

const GaugeBands& GaugeBands::mgt_defaults() {
  static const GaugeBands bands{
      {{0.25, "highly likely human"}, {0.5, "likely human"}, {0.75, "likely machine generated"}},
      "highly likely machine generated"};
  return bands;
}

nlohmann::json to_json(const GaugeResult& g) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [idx, cat] : g.per_sentence) per[std::to_string(idx)] = cat;
  nlohmann::json j = {{"percentage", g.percentage}, {"level", g.level}, {"per_sentence", per}};
  if (g.sentence_percentage) j["sentence_percentage"] = *g.sentence_percentage;
  return j;
}

GaugeResult subjectivity_gauge(const DocumentSignalResult& result, double sentence_threshold,
                               const GaugeBands& bands) {
  GaugeResult g;
  const auto n = result.sentence_count();
  std::vector<double> conf(n, 0.0);
  for (const auto& a : result.annotations)
    if (a.label == "subjective" && a.sentence_index < n) conf[a.sentence_index] = std::max(conf[a.sentence_index], a.confidence);
  std::size_t subjective = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool s = conf[i] >= sentence_threshold;
    subjective += s;
    g.per_sentence[i] = s ? "subjective" : "objective";
  }
  g.percentage = n == 0 ? 0.0 : 100.0 * static_cast<double>(subjective) / static_cast<double>(n);
  g.level = bands.classify(g.percentage);
  return g;
}

GaugeResult mgt_gauge(const DocumentSignalResult& result, const GaugeBands& bands) {
  GaugeResult g;
  const auto n = result.sentence_count();
  std::vector<double> p(n, 0.0);
  for (const auto& a : result.annotations)
    if (a.sentence_index < n) p[a.sentence_index] = std::max(p[a.sentence_index], a.confidence);
  double total = 0.0;
  double machine = 0.0;
  std::size_t machine_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double len = static_cast<double>(result.sentence_lengths[i]);
    total += len;
    if (p[i] >= 0.5) {
      machine += len;
      ++machine_count;
    }
    g.per_sentence[i] = bands.classify(p[i]);
  }
  g.percentage = total > 0.0 ? 100.0 * machine / total : 0.0;
  g.sentence_percentage = n == 0 ? 0.0 : 100.0 * static_cast<double>(machine_count) / static_cast<double>(n);
  g.level = bands.classify(g.percentage / 100.0);
  return g;
}

}  // namespace verif
