#include "verif/gateway.hpp"

#include <algorithm>
#include <filesystem>
#include <ctime>
#include <functional>
#include <random>
#include <thread>

#include "verif/error.hpp"
#include "verif/image_hash.hpp"
#include "verif/text.hpp"

namespace verif {

struct Gateway::Task {
  std::string name;
  std::chrono::milliseconds deadline;
  std::function<nlohmann::json()> run;
};

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kEchoLength = 500;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string new_report_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int part = 0; part < 2; ++part) {
    auto v = rng();
    for (int i = 0; i < 16; ++i, v >>= 4) id += kHex[v & 15];
  }
  return id;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::optional<SectionStatus> section_status_from_string(std::string_view s) {
  for (auto st : {SectionStatus::running, SectionStatus::ok, SectionStatus::error, SectionStatus::skipped})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

json media_json(const MediaRef& m) {
  json j = {{"url", m.url},
            {"media_type", to_string(m.media_type)},
            {"document_position", m.document_position},
            {"text_offset", m.text_offset}};
  j["alt_text"] = m.alt_text ? json(*m.alt_text) : json(nullptr);
  return j;
}

json extracted_json(const ExtractedContent& c, const std::string& language) {
  json sentences = json::array();
  for (const auto& s : c.sentences) sentences.push_back({{"start", s.start}, {"end", s.end}});
  json images = json::array();
  for (const auto& m : c.images) images.push_back(media_json(m));
  json videos = json::array();
  for (const auto& m : c.videos) videos.push_back(media_json(m));
  return {{"text", c.text},
          {"sentences", sentences},
          {"title", c.title ? json(*c.title) : json(nullptr)},
          {"source_url", c.source_url ? json(*c.source_url) : json(nullptr)},
          {"links", c.links},
          {"images", images},
          {"videos", videos},
          {"language", language}};
}

MediaType sniff_media_type(std::string_view bytes) {
  if (bytes.size() >= 12 && bytes.substr(4, 4) == "ftyp") return MediaType::video;
  if (bytes.size() >= 4 && static_cast<unsigned char>(bytes[0]) == 0x1A && static_cast<unsigned char>(bytes[1]) == 0x45 &&
      static_cast<unsigned char>(bytes[2]) == 0xDF && static_cast<unsigned char>(bytes[3]) == 0xA3)
    return MediaType::video;
  if (bytes.size() >= 12 && bytes.substr(0, 4) == "RIFF" && bytes.substr(8, 3) == "AVI") return MediaType::video;
  return MediaType::image;
}

MediaType media_type_of_url(const Url& url) {
  static const std::vector<std::string> video_ext = {"mp4", "webm", "mov", "m4v", "mkv", "avi", "ogv", "m3u8"};
  const auto dot = url.path.rfind('.');
  if (dot == std::string::npos) return MediaType::image;
  const auto ext = text::to_lower_utf8(url.path.substr(dot + 1));
  return std::find(video_ext.begin(), video_ext.end(), ext) != video_ext.end() ? MediaType::video : MediaType::image;
}

json image_matches(const Services& s, std::string_view bytes) {
  const auto hash = hash_image(decode_image(bytes));
  json matches = json::array();
  for (const auto& m : s.claims->search_image(hash, s.config.max_image_distance)) matches.push_back(to_json(m));
  return {{"hash", hash_to_hex(hash)}, {"matches", matches}};
}

/// Per-item failures are recorded on the item; the section itself stays ok.
json media_payload(const Services& s, std::vector<MediaRef> media, const std::optional<std::string>& upload) {
  std::stable_sort(media.begin(), media.end(),
                   [](const MediaRef& a, const MediaRef& b) { return a.document_position < b.document_position; });
  json items = json::array();
  std::size_t analysed = 0;
  for (const auto& m : media) {
    json item = media_json(m);
    item["tools"] = recommend_tools(m).tools;
    if (m.media_type == MediaType::image) {
      try {
        if (upload) {
          item.update(image_matches(s, *upload));
        } else if (analysed >= s.config.media_max_items) {
          item["error"] = "not analysed: media item limit reached";
        } else {
          ++analysed;
          const auto url = Url::parse_http(m.url);
          if (!url) throw ValidationError("image URL is not absolute http(s)");
          FetchOptions opts = s.config.fetch;
          item.update(image_matches(s, s.fetcher->fetch(*url, opts).body));
        }
      } catch (const std::exception& e) {
        item["error"] = e.what();
      }
    }
    items.push_back(std::move(item));
  }
  return {{"items", items}};
}

json matches_json(const std::vector<ClaimMatch>& matches) {
  json out = json::array();
  for (const auto& m : matches) out.push_back(to_json(m));
  return out;
}

}  // namespace

// --- tools --------------------------------------------------------------------

std::vector<std::string> recommend_tools(std::string_view media_type) {
  if (media_type == "image")
    return {"image magnifier",           "metadata retrieval", "forensic analysis", "OCR",
            "synthetic image detection", "geolocalizer",       "provenance (C2PA)"};
  if (media_type == "video") return {"video analysis", "keyframes", "thumbnails", "metadata", "deepfake"};
  return {};
}

ToolRecommendation recommend_tools(const MediaRef& media) {
  return {media.media_type, recommend_tools(to_string(media.media_type))};
}

std::string_view to_string(SectionStatus status) {
  switch (status) {
    case SectionStatus::running: return "running";
    case SectionStatus::ok: return "ok";
    case SectionStatus::error: return "error";
    case SectionStatus::skipped: return "skipped";
  }
  return "running";
}

// --- report JSON ----------------------------------------------------------------

json to_json(const AnalysisReport& r) {
  json sections = json::object();
  json timings = json::object();
  for (const auto& [name, s] : r.sections) {
    json j = {{"status", to_string(s.status)}};
    if (s.status == SectionStatus::ok) j["payload"] = s.payload;
    if (!s.error.empty()) j["error"] = s.error;
    sections[name] = std::move(j);
    timings[name] = s.duration_ms;
  }
  json out = {{"report_id", r.report_id},
              {"submission", {{"kind", to_string(r.kind)}, {"value", r.submission_value}, {"language", r.language}}},
              {"created_at", r.created_at},
              {"status", r.complete ? "complete" : "running"},
              {"extracted", r.extracted},
              {"sections", sections},
              {"timings", timings}};
  if (r.scraper_error) out["scraper_error"] = *r.scraper_error;
  return out;
}

AnalysisReport analysis_report_from_json(const json& j) {
  AnalysisReport r;
  try {
    r.report_id = j.at("report_id").get<std::string>();
    const auto& sub = j.at("submission");
    const auto kind = submission_kind_from_string(sub.at("kind").get<std::string>());
    if (!kind) throw ValidationError("unknown submission kind");
    r.kind = *kind;
    r.submission_value = sub.value("value", "");
    r.language = sub.value("language", "en");
    r.created_at = j.value("created_at", "");
    r.complete = j.value("status", "") == "complete";
    if (j.contains("scraper_error")) r.scraper_error = j.at("scraper_error").get<std::string>();
    r.extracted = j.value("extracted", json::object());
    const auto timings = j.value("timings", json::object());
    for (const auto& [name, s] : j.at("sections").items()) {
      SectionResult sr;
      const auto status = section_status_from_string(s.at("status").get<std::string>());
      if (!status) throw ValidationError("unknown section status in " + name);
      sr.status = *status;
      if (s.contains("payload")) sr.payload = s.at("payload");
      sr.error = s.value("error", "");
      sr.duration_ms = timings.value(name, 0.0);
      r.sections[name] = std::move(sr);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
  return r;
}

// --- metrics --------------------------------------------------------------------

std::uint64_t MetricsSnapshot::total_requests() const {
  std::uint64_t n = 0;
  for (const auto& [_, c] : requests) n += c;
  return n;
}

std::uint64_t MetricsSnapshot::total_responses() const {
  std::uint64_t n = 0;
  for (const auto& [_, c] : responses) n += c;
  return n;
}

double MetricsSnapshot::server_error_fraction() const {
  const auto total = total_responses();
  if (total == 0) return 0.0;
  std::uint64_t errors = 0;
  for (const auto& [status, c] : responses)
    if (status >= 500 && status < 600) errors += c;
  return static_cast<double>(errors) / static_cast<double>(total);
}

json to_json(const MetricsSnapshot& m) {
  json responses = json::object();
  for (const auto& [status, n] : m.responses) responses[std::to_string(status)] = n;
  json by_endpoint = json::object();
  for (const auto& [endpoint, statuses] : m.responses_by_endpoint) {
    json e = json::object();
    for (const auto& [status, n] : statuses) e[std::to_string(status)] = n;
    by_endpoint[endpoint] = std::move(e);
  }
  return {{"since", m.since},
          {"requests", m.requests},
          {"responses", responses},
          {"responses_by_endpoint", by_endpoint},
          {"scraper_error", m.scraper_error},
          {"section_errors", m.section_errors}};
}

Metrics::Metrics() { data_.since = utc_now(); }

void Metrics::record_response(const std::string& endpoint, int status) {
  std::lock_guard lock(mutex_);
  ++data_.requests[endpoint];
  ++data_.responses_by_endpoint[endpoint][status];
  ++data_.responses[status];
}

void Metrics::record_scraper_error() {
  std::lock_guard lock(mutex_);
  ++data_.scraper_error;
}

void Metrics::record_section_error(const std::string& section) {
  std::lock_guard lock(mutex_);
  ++data_.section_errors[section];
}

MetricsSnapshot Metrics::snapshot() const {
  std::lock_guard lock(mutex_);
  return data_;
}

// --- report store -------------------------------------------------------------

void ReportStore::attach_log(const std::string& path) {
  {
    std::ifstream in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        auto report = analysis_report_from_json(json::parse(line));
        auto entry = std::make_shared<Entry>();
        entry->report = std::move(report);
        std::unique_lock lock(mutex_);
        reports_[entry->report.report_id] = entry;
      } catch (const std::exception& e) {
        throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  std::lock_guard lock(log_mutex_);
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
  }
  log_.open(path, std::ios::app);
  if (!log_) throw ValidationError("cannot open report log for append: " + path);
}

std::shared_ptr<ReportStore::Entry> ReportStore::create(AnalysisReport report) {
  auto entry = std::make_shared<Entry>();
  entry->report = std::move(report);
  std::unique_lock lock(mutex_);
  reports_[entry->report.report_id] = entry;
  return entry;
}

std::optional<AnalysisReport> ReportStore::get(const std::string& id) const {
  std::shared_ptr<Entry> entry;
  {
    std::shared_lock lock(mutex_);
    const auto it = reports_.find(id);
    if (it == reports_.end()) return std::nullopt;
    entry = it->second;
  }
  std::lock_guard lock(entry->mutex);
  return entry->report;
}

bool ReportStore::wait(const std::string& id, std::chrono::milliseconds timeout) const {
  std::shared_ptr<Entry> entry;
  {
    std::shared_lock lock(mutex_);
    const auto it = reports_.find(id);
    if (it == reports_.end()) return false;
    entry = it->second;
  }
  std::unique_lock lock(entry->mutex);
  return entry->done.wait_for(lock, timeout, [&] { return entry->report.complete; });
}

void ReportStore::persist(const AnalysisReport& report) {
  std::lock_guard lock(log_mutex_);
  if (!log_.is_open()) return;
  log_ << to_json(report).dump() << '\n';
  log_.flush();
}

std::size_t ReportStore::size() const {
  std::shared_lock lock(mutex_);
  return reports_.size();
}

// --- payload builders ---------------------------------------------------------

json signal_payload(const Services& s, SignalKind kind, const ExtractedContent& content, const std::string& language) {
  const auto& provider = s.signal_providers.at(kind);
  const auto result = classify(kind, content.text, content.sentences, *provider, *s.labels, language);
  json out = {{"result", to_json(result)}};
  switch (kind) {
    case SignalKind::framing: {
      json frames = json::array();
      for (const auto& [label, conf] : top_frames(result, s.config.frame_threshold))
        frames.push_back({{"label", label}, {"confidence", conf}});
      out["top_frames"] = frames;
      out["threshold"] = s.config.frame_threshold;
      break;
    }
    case SignalKind::genre: {
      std::optional<std::pair<std::string, double>> best;
      for (const auto& [label, conf] : result.doc_scores)
        if (!best || conf > best->second) best = {label, conf};
      out["label"] = best ? json(best->first) : json(nullptr);
      break;
    }
    case SignalKind::persuasion: {
      json groups = json::object();
      for (const auto& a : result.annotations) {
        const auto group = s.labels->persuasion_group(a.label).value_or("other");
        auto& list = groups[group];
        if (!list.is_array()) list = json::array();
        if (std::find(list.begin(), list.end(), a.label) == list.end()) list.push_back(a.label);
      }
      out["groups"] = groups;
      break;
    }
    case SignalKind::subjectivity:
      out["gauge"] = to_json(subjectivity_gauge(result, s.config.subjectivity_sentence_threshold, s.config.subjectivity_bands));
      break;
    case SignalKind::mgt:
      out["gauge"] = to_json(mgt_gauge(result, s.config.mgt_bands));
      break;
  }
  return out;
}

json entities_payload(const Services& s, std::string_view text) {
  const auto mentions = s.entities->detect(text);
  json m = json::array();
  for (const auto& x : mentions) m.push_back(to_json(x));
  json cloud = json::array();
  for (const auto& item : s.entities->build_cloud(mentions)) cloud.push_back(to_json(item));
  return {{"mentions", m}, {"cloud", cloud}};
}

json stance_payload(const Services& s, const Url& video_url, const VideoClient& client) {
  const auto thread = fetch_thread(video_url, client);
  return to_json(classify_thread(thread, *s.stance));
}

// --- gateway ------------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<Services> services)
    : services_(std::move(services)),
      metrics_(std::make_shared<Metrics>()),
      store_(std::make_shared<ReportStore>()),
      in_flight_(std::make_shared<InFlight>()) {
  if (!services_) throw ValidationError("gateway needs services");
  if (!services_->config.report_log.empty()) store_->attach_log(services_->config.report_log);
}

Gateway::~Gateway() {
  auto longest = services_->config.default_deadline;
  for (const auto& [_, d] : services_->config.section_deadlines) longest = std::max(longest, d);
  drain(longest + std::chrono::seconds(1));
}

void Gateway::drain(std::chrono::milliseconds timeout) {
  std::unique_lock lock(in_flight_->mutex);
  in_flight_->cv.wait_for(lock, timeout, [&] { return in_flight_->count == 0; });
}

AnalysisReport Gateway::get_report(const std::string& id) const {
  auto r = store_->get(id);
  if (!r) throw NotFoundError("unknown report: " + id);
  return *r;
}

bool Gateway::wait(const std::string& id, std::chrono::milliseconds timeout) const { return store_->wait(id, timeout); }

AnalyzeOutcome Gateway::analyze(const Submission& sub) {
  sub.validate();
  const auto& s = *services_;
  const std::string language = sub.declared_language.value_or("en");

  AnalysisReport report;
  report.report_id = new_report_id();
  report.kind = sub.kind;
  report.language = language;
  report.created_at = utc_now();
  if (sub.kind == SubmissionKind::media_upload) report.submission_value = std::to_string(sub.value.size()) + " bytes";
  else report.submission_value = text::truncate_codepoints(sub.value, kEchoLength);
  for (const auto& name : section_names()) report.sections[name] = SectionResult{};

  enum class Path { article, video, media_only, failed } path = Path::article;
  auto content = std::make_shared<ExtractedContent>();
  std::optional<Url> submitted;
  std::vector<MediaRef> direct_media;
  std::optional<std::string> upload;
  ExtractOptions opts;
  opts.density_threshold = s.config.density_threshold;
  opts.language = sub.declared_language;

  try {
    switch (sub.kind) {
      case SubmissionKind::url: {
        submitted = Url::parse_http(sub.value);
        const auto cls = classify_submission(*submitted, s.rules);
        if (cls == SubmissionClass::video_platform) {
          path = Path::video;
        } else if (cls == SubmissionClass::direct_media) {
          path = Path::media_only;
          direct_media.push_back({submitted->str(), media_type_of_url(*submitted), std::nullopt, 0, 0});
        } else {
          const auto page = s.fetcher->fetch(*submitted, s.config.fetch);
          *content = extract(page.body, page.final_url, opts);
        }
        break;
      }
      case SubmissionKind::raw_html: *content = extract(sub.value, std::nullopt, opts); break;
      case SubmissionKind::plain_text: *content = from_plain_text(sub.value, sub.declared_language); break;
      case SubmissionKind::media_upload:
        path = Path::media_only;
        upload = sub.value;
        direct_media.push_back({"upload", sniff_media_type(sub.value), std::nullopt, 0, 0});
        break;
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    path = Path::failed;
    report.scraper_error = e.what();
    metrics_->record_scraper_error();
  }
  report.extracted = extracted_json(*content, language);

  const auto services = services_;
  std::vector<Task> tasks;
  auto add = [&](const std::string& name, std::function<json()> fn) {
    tasks.push_back({name, s.config.deadline_for(name), std::move(fn)});
  };

  if (submitted) {
    const auto url = submitted->str();
    add("domain_submitted", [services, url] { return to_json(services->domains->check(url)); });
  } else {
    report.sections["domain_submitted"] = {SectionStatus::skipped, {}, "no submitted URL", 0.0};
  }

  std::string skip_reason;
  switch (path) {
    case Path::failed: skip_reason = "extraction failed: " + *report.scraper_error; break;
    case Path::video: skip_reason = "video-platform submission: only stance runs"; break;
    case Path::media_only: skip_reason = "media submission has no article text"; break;
    case Path::article: break;
  }

  if (path == Path::article) {
    add("claim_matches", [services, content] {
      return json{{"matches", matches_json(services->claims->search_text(content->text, services->config.claim_threshold))}};
    });
    add("semantic_matches", [services, content] {
      return json{
          {"matches", matches_json(services->claims->search_semantic(content->text, services->config.claim_threshold))}};
    });
    add("domain_links", [services, content] { return to_json(services->domains->check_batch(content->links)); });
    add("media", [services, content] {
      auto media = content->images;
      media.insert(media.end(), content->videos.begin(), content->videos.end());
      return media_payload(*services, std::move(media), std::nullopt);
    });
    for (auto kind : kSignalKinds)
      add(signal_section(kind), [services, content, kind, language] {
        return signal_payload(*services, kind, *content, language);
      });
    add("entities", [services, content] { return entities_payload(*services, content->text); });
    report.sections["stance"] = {SectionStatus::skipped, {}, "not a video-platform submission", 0.0};
  } else {
    for (const auto& name : section_names()) {
      if (name == "domain_submitted") continue;
      if (name == "media" && path == Path::media_only) continue;
      if (name == "stance" && path == Path::video) continue;
      report.sections[name] = {SectionStatus::skipped, {}, skip_reason, 0.0};
    }
    if (path == Path::media_only)
      add("media", [services, direct_media, upload] { return media_payload(*services, direct_media, upload); });
    if (path == Path::video) {
      const auto url = *submitted;
      add("stance", [services, url] {
        if (!services->videos) throw StanceError(StanceError::Kind::fetch, "no video client configured");
        return stance_payload(*services, url, *services->videos);
      });
    }
  }

  AnalyzeOutcome outcome{report.report_id, report.scraper_error};
  auto entry = store_->create(std::move(report));
  launch(std::move(entry), std::move(tasks));
  return outcome;
}

void Gateway::launch(std::shared_ptr<ReportStore::Entry> entry, std::vector<Task> tasks) {
  struct Run {
    std::mutex mutex;
    std::condition_variable cv;
    std::vector<std::optional<SectionResult>> results;
  };
  auto run = std::make_shared<Run>();
  run->results.resize(tasks.size());
  const auto t0 = Clock::now();

  {
    std::lock_guard lock(in_flight_->mutex);
    ++in_flight_->count;
  }

  // One worker per section. Workers that overrun their deadline are abandoned:
  // they keep only their own state alive and their late result is dropped.
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    std::thread([run, i, fn = tasks[i].run, t0] {
      SectionResult r;
      try {
        r.payload = fn();
        r.status = SectionStatus::ok;
      } catch (const std::exception& e) {
        r.status = SectionStatus::error;
        r.error = e.what();
      } catch (...) {
        r.status = SectionStatus::error;
        r.error = "unknown failure";
      }
      r.duration_ms = ms_since(t0);
      std::lock_guard lock(run->mutex);
      if (!run->results[i]) run->results[i] = std::move(r);
      run->cv.notify_all();
    }).detach();
  }

  std::vector<std::pair<std::string, std::chrono::milliseconds>> meta;
  for (const auto& t : tasks) meta.emplace_back(t.name, t.deadline);

  std::thread([run, entry, meta = std::move(meta), t0, metrics = metrics_, store = store_, in_flight = in_flight_] {
    std::vector<bool> published(meta.size(), false);
    while (true) {
      std::vector<std::pair<std::size_t, SectionResult>> fresh;
      std::optional<Clock::time_point> next_deadline;
      bool all_done = true;
      {
        std::unique_lock lock(run->mutex);
        const auto now = Clock::now();
        for (std::size_t i = 0; i < meta.size(); ++i) {
          if (published[i]) continue;
          const auto deadline = t0 + meta[i].second;
          if (!run->results[i] && now >= deadline) {
            SectionResult r;
            r.status = SectionStatus::error;
            r.error = "deadline of " + std::to_string(meta[i].second.count()) + " ms exceeded";
            r.duration_ms = static_cast<double>(meta[i].second.count());
            run->results[i] = std::move(r);
          }
          if (run->results[i]) {
            fresh.emplace_back(i, *run->results[i]);
            published[i] = true;
          } else {
            all_done = false;
            if (!next_deadline || deadline < *next_deadline) next_deadline = deadline;
          }
        }
        if (fresh.empty() && !all_done) {
          run->cv.wait_until(lock, *next_deadline);
          continue;
        }
      }
      for (const auto& [i, r] : fresh)
        if (r.status == SectionStatus::error) metrics->record_section_error(meta[i].first);
      {
        std::lock_guard lock(entry->mutex);
        for (auto& [i, r] : fresh) entry->report.sections[meta[i].first] = std::move(r);
        if (all_done) entry->report.complete = true;
      }
      if (all_done) break;
    }
    AnalysisReport final_report;
    {
      std::lock_guard lock(entry->mutex);
      final_report = entry->report;
    }
    store->persist(final_report);
    entry->done.notify_all();
    std::lock_guard lock(in_flight->mutex);
    --in_flight->count;
    in_flight->cv.notify_all();
  }).detach();
}

}  // namespace verif
