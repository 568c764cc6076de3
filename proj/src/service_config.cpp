#include "verif/service_config.hpp"

#include <algorithm>
#include <fstream>

#include "verif/error.hpp"
#include "verif/signal_providers.hpp"

namespace verif {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const json& section(const json& doc, const char* name) {
  static const json empty = json::object();
  if (!doc.contains(name)) return empty;
  const auto& s = doc.at(name);
  if (!s.is_object()) throw ValidationError(std::string("config section must be an object: ") + name);
  return s;
}

std::string path_field(const json& s, const char* key, const fs::path& base, const std::string& fallback = {}) {
  if (!s.contains(key) || s.at(key).is_null()) return fallback;
  if (!s.at(key).is_string()) throw ValidationError(std::string("config path must be a string: ") + key);
  const fs::path p = s.at(key).get<std::string>();
  if (p.empty()) return {};
  return (p.is_absolute() ? p : base / p).lexically_normal().string();
}

template <typename T>
T field(const json& s, const char* key, T fallback) {
  if (!s.contains(key) || s.at(key).is_null()) return fallback;
  try {
    return s.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config field has the wrong type: ") + key);
  }
}

GaugeBands bands_field(const json& s, const char* key, const GaugeBands& fallback) {
  if (!s.contains(key)) return fallback;
  const auto& b = s.at(key);
  GaugeBands out;
  try {
    for (const auto& band : b.at("bands")) out.bands.push_back({band.at("below").get<double>(), band.at("label").get<std::string>()});
    out.top_label = b.at("top_label").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad gauge bands in ") + key + ": " + e.what());
  }
  for (std::size_t i = 1; i < out.bands.size(); ++i)
    if (!(out.bands[i - 1].upper < out.bands[i].upper)) throw ValidationError(std::string("gauge bands must increase: ") + key);
  return out;
}

std::shared_ptr<const SignalProvider> make_signal_provider(const ServiceConfig& c, SignalKind kind) {
  const auto it = c.signal_providers.find(kind);
  const std::string setting = it == c.signal_providers.end() ? "baseline" : it->second;
  if (setting == "baseline") return make_baseline_provider(kind, c.lexicon_dir);
  const auto url = Url::parse_http(setting);
  if (!url) throw ValidationError("signal provider must be \"baseline\" or an http(s) URL: " + setting);
  return std::make_shared<RemoteSignalProvider>(kind, *url, c.deadline_for(signal_section(kind)));
}

}  // namespace

const std::vector<std::string>& section_names() {
  static const std::vector<std::string> names = {
      "claim_matches",       "semantic_matches", "domain_submitted",      "domain_links",
      "media",               "signals.framing",  "signals.genre",         "signals.persuasion",
      "signals.subjectivity", "signals.mgt",     "entities",              "stance"};
  return names;
}

std::string signal_section(SignalKind kind) { return "signals." + std::string(to_string(kind)); }

ServiceConfig ServiceConfig::from_json(const json& doc, const fs::path& base) {
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  ServiceConfig c;

  const auto& listen = section(doc, "listen");
  c.host = field<std::string>(listen, "host", c.host);
  c.port = field<int>(listen, "port", c.port);

  const auto& claims = section(doc, "claims");
  c.claims_seed = path_field(claims, "seed", base);
  c.claims_log = path_field(claims, "log", base);
  c.claim_threshold = field<double>(claims, "threshold", c.claim_threshold);
  c.max_image_distance = field<int>(claims, "max_image_distance", c.max_image_distance);

  const auto& sources = section(doc, "sources");
  c.warnings_list = path_field(sources, "warnings", base);
  c.mentions_list = path_field(sources, "mentions", base);
  c.fact_checkers_list = path_field(sources, "fact_checkers", base);
  c.social_hosts = field<std::vector<std::string>>(sources, "social_hosts", c.social_hosts);

  const auto& signals = section(doc, "signals");
  c.labels = path_field(signals, "labels", base);
  c.lexicon_dir = path_field(signals, "lexicon_dir", base);
  for (const auto& [name, value] : section(signals, "providers").items()) {
    const auto kind = signal_kind_from_string(name);
    if (!kind) throw ValidationError("unknown signal in providers: " + name);
    if (!value.is_string()) throw ValidationError("provider setting must be a string: " + name);
    c.signal_providers[*kind] = value.get<std::string>();
  }
  c.frame_threshold = field<double>(signals, "frame_threshold", c.frame_threshold);
  c.subjectivity_sentence_threshold =
      field<double>(signals, "subjectivity_sentence_threshold", c.subjectivity_sentence_threshold);
  c.subjectivity_bands = bands_field(signals, "subjectivity_bands", c.subjectivity_bands);
  c.mgt_bands = bands_field(signals, "mgt_bands", c.mgt_bands);

  const auto& stance = section(doc, "stance");
  c.stance_provider = field<std::string>(stance, "provider", c.stance_provider);
  c.stance_lexicon = path_field(stance, "lexicon", base);
  c.video_fixtures = path_field(stance, "video_fixtures", base);
  c.video_api_base = field<std::string>(stance, "video_api_base", c.video_api_base);
  c.video_api_key_env = field<std::string>(stance, "video_api_key_env", c.video_api_key_env);

  const auto& entities = section(doc, "entities");
  c.gazetteer = path_field(entities, "gazetteer", base);
  c.entity_types = path_field(entities, "type_mapping", base);
  c.kb_url_template = field<std::string>(entities, "kb_url_template", c.kb_url_template);

  for (const auto& [name, value] : section(doc, "deadlines_ms").items()) {
    if (!value.is_number_integer() || value.get<long long>() <= 0)
      throw ValidationError("deadline must be a positive integer of milliseconds: " + name);
    const std::chrono::milliseconds ms{value.get<long long>()};
    const auto& names = section_names();
    if (name != "default" && std::find(names.begin(), names.end(), name) == names.end())
      throw ValidationError("unknown section in deadlines_ms: " + name);
    if (name == "default") c.default_deadline = ms;
    else c.section_deadlines[name] = ms;
  }

  const auto& fetch = section(doc, "fetch");
  c.fetch.timeout = std::chrono::milliseconds{field<long long>(fetch, "timeout_ms", c.fetch.timeout.count())};
  c.fetch.max_bytes = field<std::size_t>(fetch, "max_bytes", c.fetch.max_bytes);
  c.fetch.max_redirects = field<int>(fetch, "max_redirects", c.fetch.max_redirects);
  c.fetch.user_agent = field<std::string>(fetch, "user_agent", c.fetch.user_agent);

  const auto& extraction = section(doc, "extraction");
  c.density_threshold = field<double>(extraction, "density_threshold", c.density_threshold);
  c.media_max_items = field<std::size_t>(extraction, "media_max_items", c.media_max_items);

  c.report_log = path_field(section(doc, "reports"), "log", base);
  return c;
}

ServiceConfig ServiceConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return from_json(doc, fs::absolute(path).parent_path());
}

ServiceConfig ServiceConfig::with_data_dir(const fs::path& data) {
  ServiceConfig c;
  c.claims_seed = (data / "claims.jsonl").string();
  c.warnings_list = (data / "sources" / "warnings.jsonl").string();
  c.mentions_list = (data / "sources" / "mentions.jsonl").string();
  c.fact_checkers_list = (data / "sources" / "factcheckers.jsonl").string();
  c.labels = (data / "labels.json").string();
  c.lexicon_dir = (data / "lexicons").string();
  c.stance_lexicon = (data / "lexicons" / "stance.json").string();
  c.gazetteer = (data / "gazetteer.jsonl").string();
  c.entity_types = (data / "entity_types.json").string();
  return c;
}

std::chrono::milliseconds ServiceConfig::deadline_for(const std::string& name) const {
  const auto it = section_deadlines.find(name);
  return it == section_deadlines.end() ? default_deadline : it->second;
}

std::shared_ptr<Services> Services::build(const ServiceConfig& c) {
  auto s = std::make_shared<Services>();
  s->config = c;

  s->claims = std::make_shared<ClaimStore>();
  if (!c.claims_seed.empty()) s->claims->load_seed(c.claims_seed);
  if (!c.claims_log.empty()) s->claims->attach_log(c.claims_log);

  SourceLists lists;
  if (!c.warnings_list.empty() || !c.mentions_list.empty() || !c.fact_checkers_list.empty())
    lists = SourceLists::load(c.warnings_list, c.mentions_list, c.fact_checkers_list);
  s->domains = std::make_shared<DomainAnalyzer>(std::move(lists), c.social_hosts);

  if (c.labels.empty()) {
    s->labels = std::make_shared<const LabelRegistry>(LabelRegistry::defaults());
  } else {
    std::ifstream in(c.labels);
    if (!in) throw ValidationError("cannot open label registry: " + c.labels);
    try {
      s->labels = std::make_shared<const LabelRegistry>(LabelRegistry::from_json(json::parse(in)));
    } catch (const json::exception& e) {
      throw ValidationError(c.labels + ": " + e.what());
    }
  }

  for (auto kind : kSignalKinds) s->signal_providers[kind] = make_signal_provider(c, kind);

  const auto mapping = c.entity_types.empty() ? TypeMapping::defaults() : TypeMapping::load(c.entity_types);
  auto gazetteer = c.gazetteer.empty() ? std::make_shared<const Gazetteer>()
                                       : std::make_shared<const Gazetteer>(Gazetteer::load(c.gazetteer, mapping));
  std::shared_ptr<const KbClient> kb;
  if (!c.kb_url_template.empty())
    kb = std::make_shared<HttpKbClient>(c.kb_url_template, c.deadline_for("entities"), mapping);
  s->entities = std::make_shared<const EntityLinker>(std::move(gazetteer), std::move(kb));

  if (c.stance_provider == "baseline") {
    if (c.stance_lexicon.empty()) throw ValidationError("baseline stance provider needs stance.lexicon");
    s->stance = BaselineStanceProvider::load(c.stance_lexicon);
  } else {
    const auto url = Url::parse_http(c.stance_provider);
    if (!url) throw ValidationError("stance provider must be \"baseline\" or an http(s) URL");
    s->stance = std::make_shared<RemoteStanceProvider>(*url, c.deadline_for("stance"));
  }
  if (!c.video_api_base.empty())
    s->videos = std::make_shared<HttpVideoClient>(c.video_api_base, c.video_api_key_env, c.deadline_for("stance"));
  else if (!c.video_fixtures.empty())
    s->videos = std::make_shared<FixtureVideoClient>(c.video_fixtures);

  s->fetcher = std::make_shared<HttpFetcher>();
  return s;
}

}  // namespace verif
