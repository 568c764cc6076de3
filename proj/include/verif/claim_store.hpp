#pragma once

// Local store of previously debunked claims, searchable by text and by image hash.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "verif/image_hash.hpp"

namespace verif {

struct DebunkRecord {
  std::string id;
  std::string claim_text;
  std::string debunk_url;
  std::string organisation;
  std::string language;
  std::vector<ImageHash> image_hashes;

  bool operator==(const DebunkRecord&) const = default;
};

/// JSON object with fields id, claim_text, debunk_url, organisation, language,
/// image_hashes (array of hex strings).
nlohmann::json to_json(const DebunkRecord& record);
/// Throws ValidationError on missing or mistyped fields.
DebunkRecord debunk_record_from_json(const nlohmann::json& j);

enum class MatchedVia { title_query, semantic_query, image };

std::string_view to_string(MatchedVia via);

struct ClaimMatch {
  std::string record_id;
  double score = 0.0;  // [0, 100]
  MatchedVia matched_via = MatchedVia::title_query;
  std::string debunk_url;
  std::string claim_text;
  std::optional<int> distance;  // image matches only
};

nlohmann::json to_json(const ClaimMatch& match);

class ClaimStore {
 public:
  static constexpr std::size_t kTitleLength = 100;
  static constexpr double kDefaultThreshold = 40.0;
  static constexpr int kDefaultMaxDistance = 10;

  ClaimStore() = default;
  ClaimStore(const ClaimStore&) = delete;
  ClaimStore& operator=(const ClaimStore&) = delete;

  /// Replays an append-only JSON-lines log and appends every later ingest to it.
  void attach_log(const std::string& path);

  /// Loads a JSON-lines seed file without writing it to the log. Returns records loaded.
  std::size_t load_seed(const std::string& path);

  /// Indexes the record, replacing any record with the same id. Throws ValidationError.
  std::string ingest(DebunkRecord record);

  std::optional<DebunkRecord> get(std::string_view id) const;
  std::size_t size() const;

  /// Scores the first 100 codepoints of the query against every claim:
  /// 100 x TF-IDF cosine. Only scores strictly above `threshold` are returned,
  /// sorted by score descending then record id ascending.
  std::vector<ClaimMatch> search_text(std::string_view query, double threshold = kDefaultThreshold) const;

  /// Same scoring on the full text, without truncation.
  std::vector<ClaimMatch> search_semantic(std::string_view text, double threshold = kDefaultThreshold) const;

  /// Records with any stored hash within `max_distance` bits; score = 100 x (1 - d/64).
  std::vector<ClaimMatch> search_image(ImageHash hash, int max_distance = kDefaultMaxDistance) const;

 private:
  struct Entry {
    DebunkRecord record;
    std::unordered_map<std::string, int> term_counts;
    double norm_sq = 0.0;
  };

  void index_locked(DebunkRecord record);
  void refresh_weights_locked();
  double idf_locked(const std::string& term) const;
  std::vector<ClaimMatch> score_locked(std::string_view query, double threshold, MatchedVia via) const;

  mutable std::shared_mutex mutex_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> slot_by_id_;
  std::unordered_map<std::string, std::map<std::size_t, int>> postings_;  // term -> slot -> count
  HammingIndex image_index_;
  std::ofstream log_;
};

}  // namespace verif
