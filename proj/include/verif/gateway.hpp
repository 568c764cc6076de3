#pragma once

// Orchestration: extraction, parallel section fan-out with per-section deadlines,
// report storage and operational metrics.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "verif/content_extractor.hpp"
#include "verif/service_config.hpp"

namespace verif {

struct ToolRecommendation {
  MediaType media_type = MediaType::image;
  std::vector<std::string> tools;
};

ToolRecommendation recommend_tools(const MediaRef& media);
/// Accepts "image" or "video"; anything else gets an empty list.
std::vector<std::string> recommend_tools(std::string_view media_type);

enum class SectionStatus { running, ok, error, skipped };

std::string_view to_string(SectionStatus status);

struct SectionResult {
  SectionStatus status = SectionStatus::running;
  nlohmann::json payload;  // ok only
  std::string error;       // error and skipped
  double duration_ms = 0.0;
};

struct AnalysisReport {
  std::string report_id;
  SubmissionKind kind = SubmissionKind::plain_text;
  std::string submission_value;  // echo, possibly shortened
  std::string language;
  std::string created_at;
  bool complete = false;
  std::optional<std::string> scraper_error;
  nlohmann::json extracted = nlohmann::json::object();
  std::map<std::string, SectionResult> sections;
};

nlohmann::json to_json(const AnalysisReport& report);
AnalysisReport analysis_report_from_json(const nlohmann::json& j);

/// Plain counters; derived ratios are left to the reader.
struct MetricsSnapshot {
  std::string since;
  std::map<std::string, std::uint64_t> requests;                              // per endpoint
  std::map<std::string, std::map<int, std::uint64_t>> responses_by_endpoint;  // endpoint -> status -> n
  std::map<int, std::uint64_t> responses;                                     // status -> n
  std::uint64_t scraper_error = 0;
  std::map<std::string, std::uint64_t> section_errors;

  std::uint64_t total_requests() const;
  std::uint64_t total_responses() const;
  /// Share of responses with a 5xx status; 0 when nothing was served.
  double server_error_fraction() const;
};

nlohmann::json to_json(const MetricsSnapshot& snapshot);

class Metrics {
 public:
  Metrics();
  void record_response(const std::string& endpoint, int status);
  void record_scraper_error();
  void record_section_error(const std::string& section);
  MetricsSnapshot snapshot() const;

 private:
  mutable std::mutex mutex_;
  MetricsSnapshot data_;
};

/// Reports by id. A report is written only by its own orchestrator; readers get copies.
class ReportStore {
 public:
  struct Entry {
    std::mutex mutex;
    std::condition_variable done;
    AnalysisReport report;
  };

  /// Replays completed reports from an append-only JSON-lines log and appends to it.
  void attach_log(const std::string& path);

  std::shared_ptr<Entry> create(AnalysisReport report);
  std::optional<AnalysisReport> get(const std::string& id) const;
  /// Blocks until the report is complete or the timeout passes. False on timeout or unknown id.
  bool wait(const std::string& id, std::chrono::milliseconds timeout) const;
  void persist(const AnalysisReport& report);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> reports_;
  std::mutex log_mutex_;
  std::ofstream log_;
};

struct AnalyzeOutcome {
  std::string report_id;
  std::optional<std::string> scraper_error;
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Services> services);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Validates and extracts synchronously, then runs the sections in the background.
  /// Throws ValidationError for an invalid submission. A failed page fetch still yields
  /// a report (sections skipped, submitted domain checked) and is counted as a scraper error.
  AnalyzeOutcome analyze(const Submission& submission);

  /// Throws NotFoundError.
  AnalysisReport get_report(const std::string& report_id) const;
  bool wait(const std::string& report_id, std::chrono::milliseconds timeout) const;

  Metrics& metrics() { return *metrics_; }
  const Metrics& metrics() const { return *metrics_; }
  const Services& services() const { return *services_; }
  std::shared_ptr<Services> shared_services() const { return services_; }

  /// Blocks until every in-flight orchestration has finished (used on shutdown).
  void drain(std::chrono::milliseconds timeout);

  struct Task;

 private:
  void launch(std::shared_ptr<ReportStore::Entry> entry, std::vector<Task> tasks);

  std::shared_ptr<Services> services_;
  std::shared_ptr<Metrics> metrics_;
  std::shared_ptr<ReportStore> store_;

  struct InFlight {
    std::mutex mutex;
    std::condition_variable cv;
    std::size_t count = 0;
  };
  std::shared_ptr<InFlight> in_flight_;
};

/// Payload builders shared by the orchestrator and the single-purpose HTTP endpoints.
nlohmann::json signal_payload(const Services& services, SignalKind kind, const ExtractedContent& content,
                              const std::string& language);
nlohmann::json entities_payload(const Services& services, std::string_view text);
nlohmann::json stance_payload(const Services& services, const Url& video_url, const VideoClient& client);

}  // namespace verif
