#pragma once

// Source credibility lookup for domains and social-media accounts.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace verif {

/// Ordered by severity; a key found in several lists takes the lowest enumerator.
enum class SourceFlag { warning = 0, mention = 1, fact_checker = 2, unknown = 3 };

std::string_view to_string(SourceFlag flag);

enum class KeyGroup { domain, social_account };

std::string_view to_string(KeyGroup group);

struct Evidence {
  std::string note;
  std::string source_url;

  bool operator==(const Evidence&) const = default;
};

struct SourceEntry {
  std::string key;
  SourceFlag flag = SourceFlag::unknown;
  std::vector<Evidence> evidence;
};

struct ResolvedKey {
  std::string key;
  KeyGroup group = KeyGroup::domain;

  bool operator==(const ResolvedKey&) const = default;
};

struct DomainVerdict {
  std::string target;
  std::string resolved_key;
  SourceFlag flag = SourceFlag::unknown;
  std::vector<Evidence> evidence;
  KeyGroup group = KeyGroup::domain;
  std::vector<std::string> members;  // every input URL that resolved to this key
};

struct BatchResult {
  std::vector<DomainVerdict> verdicts;
  std::vector<std::string> rejects;
};

nlohmann::json to_json(const DomainVerdict& verdict);
nlohmann::json to_json(const BatchResult& batch);

/// The three curated lists. Lists are swapped as a whole on reload.
struct SourceLists {
  std::unordered_map<std::string, SourceEntry> warnings;
  std::unordered_map<std::string, SourceEntry> mentions;
  std::unordered_map<std::string, SourceEntry> fact_checkers;

  /// Adds an entry to the list matching its flag; the key is lowercased.
  void add(SourceEntry entry);

  /// Reads JSON-lines of {"key", "evidence": [{"note", "source_url"}]}. Missing files are errors.
  static SourceLists load(const std::string& warnings_path, const std::string& mentions_path,
                          const std::string& fact_checkers_path);
};

std::vector<std::string> default_social_hosts();

class DomainAnalyzer {
 public:
  explicit DomainAnalyzer(SourceLists lists = {}, std::vector<std::string> social_hosts = default_social_hosts());

  /// Social-platform URLs resolve to host/account; everything else to the registrable domain.
  /// Throws ValidationError for URLs that do not parse.
  ResolvedKey resolve_key(std::string_view url) const;

  DomainVerdict check(std::string_view url) const;

  /// One verdict per unique key, flagged keys first, then alphabetical by key.
  BatchResult check_batch(const std::vector<std::string>& urls) const;

  void reload(SourceLists lists);

 private:
  std::shared_ptr<const SourceLists> snapshot() const;
  DomainVerdict lookup(const SourceLists& lists, std::string target, ResolvedKey key) const;

  mutable std::mutex swap_mutex_;
  std::shared_ptr<const SourceLists> lists_;
  std::vector<std::string> social_hosts_;
};

/// Two-label registrable-domain heuristic, aware of a short list of multi-part suffixes.
std::string registrable_domain(std::string_view host);

}  // namespace verif
