#pragma once

// Service configuration file and the container of live components built from it.

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "verif/claim_store.hpp"
#include "verif/content_extractor.hpp"
#include "verif/domain_analyzer.hpp"
#include "verif/entity_linker.hpp"
#include "verif/fetcher.hpp"
#include "verif/signals.hpp"
#include "verif/stance_engine.hpp"

namespace verif {

/// Section names, in report order.
const std::vector<std::string>& section_names();
std::string signal_section(SignalKind kind);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;

  std::string claims_seed;
  std::string claims_log;
  double claim_threshold = ClaimStore::kDefaultThreshold;
  int max_image_distance = ClaimStore::kDefaultMaxDistance;

  std::string warnings_list;
  std::string mentions_list;
  std::string fact_checkers_list;
  std::vector<std::string> social_hosts = default_social_hosts();

  std::string labels;  // optional registry override
  std::string lexicon_dir;
  std::map<SignalKind, std::string> signal_providers;  // "baseline" or an http(s) endpoint

  std::string stance_provider = "baseline";
  std::string stance_lexicon;
  std::string video_fixtures;  // file or directory; used when no API base is set
  std::string video_api_base;
  std::string video_api_key_env = "YOUTUBE_API_KEY";

  std::string gazetteer;
  std::string entity_types;
  std::string kb_url_template;

  std::chrono::milliseconds default_deadline{20000};
  std::map<std::string, std::chrono::milliseconds> section_deadlines;
  FetchOptions fetch;
  double density_threshold = 0.25;
  std::size_t media_max_items = 20;

  double frame_threshold = 0.8;
  double subjectivity_sentence_threshold = 0.5;
  GaugeBands subjectivity_bands = GaugeBands::subjectivity_defaults();
  GaugeBands mgt_bands = GaugeBands::mgt_defaults();

  std::string report_log;

  /// Relative paths are resolved against `base_dir`. Throws ValidationError.
  static ServiceConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
  static ServiceConfig load(const std::string& path);
  /// Baseline everything, reading the shipped data directory.
  static ServiceConfig with_data_dir(const std::filesystem::path& data_dir);

  std::chrono::milliseconds deadline_for(const std::string& section) const;
};

/// Everything a request handler needs. Providers are shared so stalled section
/// workers can outlive the request that started them.
struct Services {
  ServiceConfig config;
  std::shared_ptr<ClaimStore> claims;
  std::shared_ptr<DomainAnalyzer> domains;
  std::shared_ptr<const LabelRegistry> labels;
  std::map<SignalKind, std::shared_ptr<const SignalProvider>> signal_providers;
  std::shared_ptr<const EntityLinker> entities;
  std::shared_ptr<const StanceProvider> stance;
  std::shared_ptr<const VideoClient> videos;  // null when not configured
  std::shared_ptr<const PageFetcher> fetcher;
  SubmissionRules rules = SubmissionRules::defaults();

  static std::shared_ptr<Services> build(const ServiceConfig& config);
};

}  // namespace verif
