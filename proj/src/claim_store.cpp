#include "verif/claim_store.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>

#include "verif/error.hpp"
#include "verif/text.hpp"

namespace verif {
namespace {

// Scores are rounded so that mathematically equal scores compare equal and
// a score that is exactly the threshold is not pushed over it by rounding noise.
double round_score(double s) { return std::round(s * 1e9) / 1e9; }

std::unordered_map<std::string, int> count_terms(std::string_view text) {
  std::unordered_map<std::string, int> counts;
  for (auto& t : text::tokenize(text)) ++counts[std::move(t)];
  return counts;
}

void sort_matches(std::vector<ClaimMatch>& matches) {
  std::sort(matches.begin(), matches.end(), [](const ClaimMatch& a, const ClaimMatch& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.record_id < b.record_id;
  });
}

std::string require_string(const nlohmann::json& j, const char* field, bool required) {
  if (!j.contains(field) || j[field].is_null()) {
    if (required) throw ValidationError(std::string("debunk record missing field: ") + field);
    return {};
  }
  if (!j[field].is_string()) throw ValidationError(std::string("debunk record field must be a string: ") + field);
  return j[field].get<std::string>();
}

}  // namespace

std::string_view to_string(MatchedVia via) {
  switch (via) {
    case MatchedVia::title_query: return "title_query";
    case MatchedVia::semantic_query: return "semantic_query";
    case MatchedVia::image: return "image";
  }
  return "title_query";
}

nlohmann::json to_json(const DebunkRecord& r) {
  nlohmann::json hashes = nlohmann::json::array();
  for (auto h : r.image_hashes) hashes.push_back(hash_to_hex(h));
  return {{"id", r.id},
          {"claim_text", r.claim_text},
          {"debunk_url", r.debunk_url},
          {"organisation", r.organisation},
          {"language", r.language},
          {"image_hashes", hashes}};
}

DebunkRecord debunk_record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("debunk record must be a JSON object");
  DebunkRecord r;
  r.id = require_string(j, "id", true);
  r.claim_text = require_string(j, "claim_text", true);
  r.debunk_url = require_string(j, "debunk_url", false);
  r.organisation = require_string(j, "organisation", false);
  r.language = require_string(j, "language", false);
  if (j.contains("image_hashes") && !j["image_hashes"].is_null()) {
    if (!j["image_hashes"].is_array()) throw ValidationError("image_hashes must be an array of hex strings");
    for (const auto& h : j["image_hashes"]) {
      if (!h.is_string()) throw ValidationError("image_hashes must be an array of hex strings");
      r.image_hashes.push_back(hash_from_hex(h.get<std::string>()));
    }
  }
  return r;
}

nlohmann::json to_json(const ClaimMatch& m) {
  nlohmann::json j = {{"record_id", m.record_id},
                      {"score", m.score},
                      {"matched_via", to_string(m.matched_via)},
                      {"debunk_url", m.debunk_url},
                      {"claim_text", m.claim_text}};
  if (m.distance) j["distance"] = *m.distance;
  return j;
}

void ClaimStore::attach_log(const std::string& path) {
  std::unique_lock lock(mutex_);
  {
    std::ifstream in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        index_locked(debunk_record_from_json(nlohmann::json::parse(line)));
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  refresh_weights_locked();
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
  }
  log_.open(path, std::ios::app);
  if (!log_) throw ValidationError("cannot open claim log for append: " + path);
}

std::size_t ClaimStore::load_seed(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open claim seed file: " + path);
  std::unique_lock lock(mutex_);
  std::string line;
  std::size_t lineno = 0;
  std::size_t loaded = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      index_locked(debunk_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    ++loaded;
  }
  refresh_weights_locked();
  return loaded;
}

std::string ClaimStore::ingest(DebunkRecord record) {
  if (record.id.empty()) throw ValidationError("debunk record id is empty");
  if (text::normalize_whitespace(record.claim_text).empty()) throw ValidationError("claim_text is empty");
  std::unique_lock lock(mutex_);
  if (log_.is_open()) {
    log_ << to_json(record).dump() << '\n';
    log_.flush();
  }
  std::string id = record.id;
  index_locked(std::move(record));
  refresh_weights_locked();
  return id;
}

void ClaimStore::index_locked(DebunkRecord record) {
  if (record.id.empty()) throw ValidationError("debunk record id is empty");
  if (text::normalize_whitespace(record.claim_text).empty()) throw ValidationError("claim_text is empty");

  Entry entry;
  entry.term_counts = count_terms(record.claim_text);
  entry.record = std::move(record);

  std::size_t slot = entries_.size();
  if (auto it = slot_by_id_.find(entry.record.id); it != slot_by_id_.end()) {
    slot = it->second;
    for (const auto& [term, _] : entries_[slot].term_counts) {
      auto p = postings_.find(term);
      p->second.erase(slot);
      if (p->second.empty()) postings_.erase(p);
    }
    entries_[slot] = std::move(entry);
  } else {
    slot_by_id_.emplace(entry.record.id, slot);
    entries_.push_back(std::move(entry));
  }
  for (const auto& [term, count] : entries_[slot].term_counts) postings_[term][slot] = count;

  image_index_.clear();
  for (std::size_t s = 0; s < entries_.size(); ++s)
    for (auto h : entries_[s].record.image_hashes) image_index_.insert(h, s);
}

double ClaimStore::idf_locked(const std::string& term) const {
  const auto it = postings_.find(term);
  const double df = it == postings_.end() ? 0.0 : static_cast<double>(it->second.size());
  const double n = static_cast<double>(entries_.size());
  return std::log((1.0 + n) / (1.0 + df)) + 1.0;
}

void ClaimStore::refresh_weights_locked() {
  for (auto& e : entries_) {
    double sum = 0.0;
    for (const auto& [term, count] : e.term_counts) {
      const double w = count * idf_locked(term);
      sum += w * w;
    }
    e.norm_sq = sum;
  }
}

std::vector<ClaimMatch> ClaimStore::score_locked(std::string_view query, double threshold, MatchedVia via) const {
  std::vector<ClaimMatch> out;
  const auto q = count_terms(query);
  if (q.empty() || entries_.empty()) return out;

  double q_norm_sq = 0.0;
  std::unordered_map<std::size_t, double> dots;
  for (const auto& [term, count] : q) {
    const double idf = idf_locked(term);
    const double wq = count * idf;
    q_norm_sq += wq * wq;
    const auto p = postings_.find(term);
    if (p == postings_.end()) continue;
    for (const auto& [slot, dcount] : p->second) dots[slot] += wq * (dcount * idf);
  }
  for (const auto& [slot, dot] : dots) {
    const auto& e = entries_[slot];
    if (e.norm_sq <= 0.0) continue;
    const double cosine = std::clamp(dot / std::sqrt(q_norm_sq * e.norm_sq), 0.0, 1.0);
    const double score = round_score(100.0 * cosine);
    if (!(score > threshold)) continue;
    out.push_back({e.record.id, score, via, e.record.debunk_url, e.record.claim_text, std::nullopt});
  }
  sort_matches(out);
  return out;
}

std::optional<DebunkRecord> ClaimStore::get(std::string_view id) const {
  std::shared_lock lock(mutex_);
  const auto it = slot_by_id_.find(std::string(id));
  if (it == slot_by_id_.end()) return std::nullopt;
  return entries_[it->second].record;
}

std::size_t ClaimStore::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::vector<ClaimMatch> ClaimStore::search_text(std::string_view query, double threshold) const {
  const auto title = text::truncate_codepoints(query, kTitleLength);
  std::shared_lock lock(mutex_);
  return score_locked(title, threshold, MatchedVia::title_query);
}

std::vector<ClaimMatch> ClaimStore::search_semantic(std::string_view full_text, double threshold) const {
  std::shared_lock lock(mutex_);
  return score_locked(full_text, threshold, MatchedVia::semantic_query);
}

std::vector<ClaimMatch> ClaimStore::search_image(ImageHash hash, int max_distance) const {
  std::shared_lock lock(mutex_);
  std::unordered_map<std::size_t, int> best;
  for (const auto& [slot, d] : image_index_.query(hash, max_distance)) {
    auto [it, inserted] = best.emplace(slot, d);
    if (!inserted) it->second = std::min(it->second, d);
  }
  std::vector<ClaimMatch> out;
  for (const auto& [slot, d] : best) {
    const auto& r = entries_[slot].record;
    out.push_back({r.id, round_score(100.0 * (1.0 - d / 64.0)), MatchedVia::image, r.debunk_url, r.claim_text, d});
  }
  sort_matches(out);
  return out;
}

}  // namespace verif
