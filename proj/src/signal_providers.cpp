#include "verif/signal_providers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_map>

#include <httplib.h>

#include "verif/text.hpp"

namespace verif {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string primary_subtag(std::string_view tag) {
  const auto cut = tag.find_first_of("-_");
  return text::to_lower_utf8(tag.substr(0, cut));
}

double number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ValidationError(std::string("lexicon field must be a number: ") + key);
  return j.at(key).get<double>();
}

struct Document {
  std::u32string text;
  std::vector<std::vector<std::u32string>> sentences;  // lowercased tokens per sentence
};

Document tokenize_document(const SignalRequest& request) {
  Document doc;
  doc.text = text::decode_utf8(request.text);
  for (const auto& s : request.sentences) {
    const auto end = std::min(s.end, doc.text.size());
    const auto start = std::min(s.start, end);
    std::vector<std::u32string> tokens;
    for (auto& w : text::word_tokens(std::u32string_view(doc.text).substr(start, end - start)))
      tokens.push_back(text::to_lower(w.text));
    doc.sentences.push_back(std::move(tokens));
  }
  return doc;
}

std::size_t count_all(const std::vector<std::u32string>& tokens, const std::vector<LexiconPhrase>& phrases,
                      double* weighted = nullptr) {
  std::size_t n = 0;
  double w = 0.0;
  for (const auto& p : phrases) {
    std::size_t hits = 0;
    if (!p.tokens.empty() && p.tokens.size() <= tokens.size()) {
      for (std::size_t i = 0; i + p.tokens.size() <= tokens.size(); ++i)
        if (std::equal(p.tokens.begin(), p.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) ++hits;
    }
    n += hits;
    w += static_cast<double>(hits) * p.weight;
  }
  if (weighted) *weighted = w;
  return n;
}

/// Min-max normalization over all sentences; zeros are dropped from the map.
std::map<std::size_t, double> min_max(const std::vector<double>& values) {
  std::map<std::size_t, double> out;
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi <= 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = hi > lo ? (values[i] - lo) / (hi - lo) : 1.0;
    if (v > 0.0) out[i] = v;
  }
  return out;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lexicon: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace

// --- shared baseline plumbing ------------------------------------------------

BaselineProvider::BaselineProvider(SignalKind kind, const nlohmann::json& lexicon) : kind_(kind) {
  if (!lexicon.is_object()) throw ValidationError("lexicon must be a JSON object");
  for (const auto& l : lexicon.value("languages", nlohmann::json::array({"en"})))
    languages_.push_back(primary_subtag(l.get<std::string>()));
}

bool BaselineProvider::supports(std::string_view language) const {
  const auto tag = primary_subtag(language.empty() ? "en" : language);
  return std::find(languages_.begin(), languages_.end(), tag) != languages_.end();
}

void BaselineProvider::require_language(const SignalRequest& request) const {
  if (!supports(request.language))
    throw SignalError(SignalError::Kind::unsupported_language, kind_,
                      std::string(to_string(kind_)) + " baseline does not support language " + request.language);
}

std::vector<LexiconPhrase> BaselineProvider::phrases(const nlohmann::json& list) {
  std::vector<LexiconPhrase> out;
  if (list.is_null()) return out;
  if (!list.is_array()) throw ValidationError("lexicon phrase list must be an array");
  for (const auto& item : list) {
    LexiconPhrase p;
    std::string phrase;
    if (item.is_string()) {
      phrase = item.get<std::string>();
    } else if (item.is_object()) {
      phrase = item.at("phrase").get<std::string>();
      p.weight = item.value("weight", 1.0);
    } else {
      throw ValidationError("lexicon entries must be strings or {phrase, weight}");
    }
    for (auto& w : text::word_tokens(text::decode_utf8(phrase))) p.tokens.push_back(text::to_lower(w.text));
    if (!p.tokens.empty()) out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::u32string> BaselineProvider::sentence_tokens(const std::u32string& text, const SentenceSpan& span) {
  std::vector<std::u32string> tokens;
  const auto end = std::min(span.end, text.size());
  const auto start = std::min(span.start, end);
  for (auto& w : text::word_tokens(std::u32string_view(text).substr(start, end - start)))
    tokens.push_back(text::to_lower(w.text));
  return tokens;
}

std::size_t BaselineProvider::count(const std::vector<std::u32string>& tokens, const LexiconPhrase& phrase) {
  return count_all(tokens, {phrase});
}

// --- subjectivity -------------------------------------------------------------

SubjectivityBaseline::SubjectivityBaseline(const nlohmann::json& lex)
    : BaselineProvider(SignalKind::subjectivity, lex),
      cues_(phrases(lex.value("cues", nlohmann::json::array()))),
      slope_(number(lex.value("logistic", nlohmann::json::object()), "slope", 12.0)),
      midpoint_(number(lex.value("logistic", nlohmann::json::object()), "midpoint", 0.1)),
      emit_floor_(number(lex, "min_cues", 1.0)) {}

double SubjectivityBaseline::probability(double ratio) const { return sigmoid(slope_ * (ratio - midpoint_)); }

ProviderResponse SubjectivityBaseline::analyze(const SignalRequest& request) const {
  require_language(request);
  ProviderResponse out;
  const auto doc = tokenize_document(request);
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    const auto& tokens = doc.sentences[i];
    if (tokens.empty()) continue;
    double weighted = 0.0;
    const auto hits = count_all(tokens, cues_, &weighted);
    if (static_cast<double>(hits) < emit_floor_) continue;
    const double ratio = weighted / static_cast<double>(tokens.size());
    out.annotations.push_back({"subjective", i, probability(ratio)});
  }
  return out;
}

// --- framing ------------------------------------------------------------------

FramingBaseline::FramingBaseline(const nlohmann::json& lex)
    : BaselineProvider(SignalKind::framing, lex), saturation_(number(lex, "saturation", 1.0)) {
  const auto frames = lex.value("frames", nlohmann::json::object());
  for (const auto& [label, list] : frames.items())
    frames_[label] = phrases(list);
  if (saturation_ <= 0.0) throw ValidationError("framing saturation must be positive");
}

ProviderResponse FramingBaseline::analyze(const SignalRequest& request) const {
  require_language(request);
  ProviderResponse out;
  const auto doc = tokenize_document(request);
  std::vector<double> density(doc.sentences.size(), 0.0);
  for (const auto& [label, list] : frames_) {
    double doc_hits = 0.0;
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
      const auto& tokens = doc.sentences[i];
      if (tokens.empty()) continue;
      double weighted = 0.0;
      count_all(tokens, list, &weighted);
      doc_hits += weighted;
      density[i] += weighted / static_cast<double>(tokens.size());
      if (weighted > 0.0) out.annotations.push_back({label, i, weighted / (weighted + saturation_)});
    }
    if (doc_hits > 0.0) out.doc_scores[label] = doc_hits / (doc_hits + saturation_);
  }
  out.importance = min_max(density);
  return out;
}

// --- genre --------------------------------------------------------------------

GenreBaseline::GenreBaseline(const nlohmann::json& lex)
    : BaselineProvider(SignalKind::genre, lex),
      first_person_(phrases(lex.value("first_person", nlohmann::json::array()))),
      opinion_cues_(phrases(lex.value("opinion_cues", nlohmann::json::array()))),
      satire_cues_(phrases(lex.value("satire_cues", nlohmann::json::array()))),
      rules_(lex.value("rules", nlohmann::json::object())) {}

ProviderResponse GenreBaseline::analyze(const SignalRequest& request) const {
  require_language(request);
  ProviderResponse out;
  const auto doc = tokenize_document(request);
  const auto n = doc.sentences.size();
  if (n == 0) return out;

  std::size_t tokens_total = 0;
  double first_person = 0.0;
  double opinion = 0.0;
  double satire = 0.0;
  std::size_t exclamations = 0;
  std::size_t quotes = 0;
  std::vector<double> cue_density(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tokens = doc.sentences[i];
    const auto& span = request.sentences[i];
    tokens_total += tokens.size();
    double fp = 0.0, op = 0.0, sa = 0.0;
    count_all(tokens, first_person_, &fp);
    count_all(tokens, opinion_cues_, &op);
    count_all(tokens, satire_cues_, &sa);
    first_person += fp;
    opinion += op;
    satire += sa;
    const auto end = std::min(span.end, doc.text.size());
    bool exclaimed = false;
    for (std::size_t k = std::min(span.start, end); k < end; ++k) {
      const char32_t c = doc.text[k];
      if (c == U'!') exclaimed = true;
      if (c == U'"' || c == U'“' || c == U'”' || c == U'«' || c == U'»') ++quotes;
    }
    exclamations += exclaimed;
    if (!tokens.empty()) cue_density[i] = (fp + op + sa + (exclaimed ? 1.0 : 0.0)) / static_cast<double>(tokens.size());
  }

  const double nd = static_cast<double>(n);
  const double tokens_d = std::max<double>(1.0, static_cast<double>(tokens_total));
  const double fp_rate = first_person / tokens_d;
  const double op_rate = opinion / tokens_d;
  const double excl_rate = static_cast<double>(exclamations) / nd;
  const double quote_rate = static_cast<double>(quotes) / 2.0 / nd;  // quote pairs per sentence

  const auto& r = rules_;
  const double opinionated = std::clamp(number(r, "first_person_weight", 6.0) * fp_rate +
                                            number(r, "opinion_weight", 8.0) * op_rate +
                                            number(r, "exclamation_weight", 0.6) * excl_rate,
                                        0.0, 1.0);
  const double satirical = satire / (satire + number(r, "satire_saturation", 2.0));
  const double objective = std::clamp(1.0 - std::max(opinionated, satirical) +
                                          number(r, "quote_bonus", 0.15) * std::min(quote_rate, 1.0),
                                      0.0, 1.0);
  out.doc_scores = {{"objective", objective}, {"opinionated", opinionated}, {"satirical", satirical}};
  out.importance = min_max(cue_density);
  return out;
}

// --- persuasion ---------------------------------------------------------------

PersuasionBaseline::PersuasionBaseline(const nlohmann::json& lex)
    : BaselineProvider(SignalKind::persuasion, lex), repetition_min_(number(lex, "repetition_min", 3.0)) {
  const auto techniques = lex.value("techniques", nlohmann::json::object());
  for (const auto& [label, spec] : techniques.items())
    techniques_[label] = phrases(spec.is_object() ? spec.value("patterns", nlohmann::json::array()) : spec);
}

ProviderResponse PersuasionBaseline::analyze(const SignalRequest& request) const {
  require_language(request);
  ProviderResponse out;
  const auto doc = tokenize_document(request);
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    const auto& tokens = doc.sentences[i];
    for (const auto& [label, patterns] : techniques_) {
      double strongest = 0.0;
      std::size_t matched = 0;
      for (const auto& p : patterns) {
        if (count(tokens, p) == 0) continue;
        ++matched;
        strongest = std::max(strongest, p.weight);
      }
      if (matched == 0) continue;
      // Each extra distinct pattern adds a little support.
      out.annotations.push_back({label, i, std::min(1.0, strongest + 0.1 * static_cast<double>(matched - 1))});
    }
  }

  // Repetition has no lexicon: long content words recurring across the document.
  std::unordered_map<std::u32string, std::size_t> freq;
  for (const auto& tokens : doc.sentences)
    for (const auto& t : tokens)
      if (t.size() >= 5) ++freq[t];
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    std::size_t best = 0;
    for (const auto& t : doc.sentences[i]) {
      const auto it = freq.find(t);
      if (it != freq.end()) best = std::max(best, it->second);
    }
    if (static_cast<double>(best) >= repetition_min_)
      out.annotations.push_back(
          {"Repetition", i, std::min(0.9, 0.5 + 0.1 * (static_cast<double>(best) - repetition_min_))});
  }
  return out;
}

// --- machine-generated text ---------------------------------------------------

MgtBaseline::MgtBaseline(const nlohmann::json& lex)
    : BaselineProvider(SignalKind::mgt, lex),
      bias_(number(lex, "bias", -3.0)),
      uniformity_weight_(number(lex, "uniformity_weight", 3.0)),
      ttr_weight_(number(lex, "ttr_weight", 4.0)),
      deviation_weight_(number(lex, "deviation_weight", 1.5)),
      window_(static_cast<std::size_t>(number(lex, "window", 1.0))) {}

ProviderResponse MgtBaseline::analyze(const SignalRequest& request) const {
  require_language(request);
  ProviderResponse out;
  const auto doc = tokenize_document(request);
  const auto n = doc.sentences.size();
  if (n == 0) return out;

  std::vector<double> lengths;
  for (const auto& s : doc.sentences) lengths.push_back(static_cast<double>(s.size()));
  const double mean = std::accumulate(lengths.begin(), lengths.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double l : lengths) var += (l - mean) * (l - mean);
  var /= static_cast<double>(n);
  // A single sentence says nothing about burstiness; treat it as average.
  const double cv = n < 2 || mean <= 0.0 ? 0.5 : std::sqrt(var) / mean;
  const double uniformity = 1.0 - std::min(cv, 1.0);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= window_ ? i - window_ : 0;
    const std::size_t hi = std::min(n - 1, i + window_);
    std::set<std::u32string> types;
    std::size_t count = 0;
    for (std::size_t k = lo; k <= hi; ++k) {
      for (const auto& t : doc.sentences[k]) types.insert(t);
      count += doc.sentences[k].size();
    }
    const double ttr = count == 0 ? 1.0 : static_cast<double>(types.size()) / static_cast<double>(count);
    const double deviation = mean > 0.0 ? std::abs(lengths[i] - mean) / mean : 0.0;
    const double z = bias_ + uniformity_weight_ * uniformity + ttr_weight_ * (1.0 - ttr) -
                     deviation_weight_ * std::min(deviation, 2.0);
    out.annotations.push_back({"machine_generated", i, sigmoid(z)});
  }
  return out;
}

std::unique_ptr<BaselineProvider> make_baseline_provider(SignalKind kind, const std::string& lexicon_dir) {
  const auto lex = read_json_file(lexicon_dir + "/" + std::string(to_string(kind)) + ".json");
  switch (kind) {
    case SignalKind::framing: return std::make_unique<FramingBaseline>(lex);
    case SignalKind::genre: return std::make_unique<GenreBaseline>(lex);
    case SignalKind::persuasion: return std::make_unique<PersuasionBaseline>(lex);
    case SignalKind::subjectivity: return std::make_unique<SubjectivityBaseline>(lex);
    case SignalKind::mgt: return std::make_unique<MgtBaseline>(lex);
  }
  throw ValidationError("unknown signal kind");
}

// --- remote -------------------------------------------------------------------

RemoteSignalProvider::RemoteSignalProvider(SignalKind kind, Url endpoint, std::chrono::milliseconds timeout)
    : kind_(kind), endpoint_(std::move(endpoint)), timeout_(timeout) {}

ProviderResponse RemoteSignalProvider::analyze(const SignalRequest& request) const {
  const auto name = std::string(to_string(kind_));
  httplib::Client client(endpoint_.origin());
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(endpoint_.request_target(), to_json(request).dump(), "application/json");
  if (!res) {
    const bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                           std::chrono::steady_clock::now() - started >= timeout_;
    throw SignalError(timed_out ? SignalError::Kind::timeout : SignalError::Kind::unavailable, kind_,
                      name + " provider request failed: " + httplib::to_string(res.error()));
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    if (res->status < 200 || res->status >= 300)
      throw SignalError(SignalError::Kind::unavailable, kind_, name + " provider returned HTTP " + std::to_string(res->status));
    throw SignalError(SignalError::Kind::protocol, kind_, name + " provider returned invalid JSON");
  }
  if (res->status < 200 || res->status >= 300) {
    if (body.is_object() && body.value("error", "") == "unsupported_language")
      throw SignalError(SignalError::Kind::unsupported_language, kind_,
                        name + " provider does not support language " + request.language);
    throw SignalError(SignalError::Kind::unavailable, kind_, name + " provider returned HTTP " + std::to_string(res->status));
  }
  return provider_response_from_json(body, kind_);
}

}  // namespace verif
