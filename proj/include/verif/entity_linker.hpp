#pragma once

// Gazetteer-based entity detection, mention counting and the entity cloud.

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace verif {

enum class EntityType { person, location, organization, other };

/// "Person", "Location", "Organization", "Other".
std::string_view to_string(EntityType type);
std::optional<EntityType> entity_type_from_string(std::string_view name);

/// Maps raw knowledge-base type strings (e.g. "dbo:Person") onto EntityType. Unmapped types are Other.
class TypeMapping {
 public:
  static const TypeMapping& defaults();
  /// {"dbo:Person": "Person", ...}
  static TypeMapping from_json(const nlohmann::json& doc);
  static TypeMapping load(const std::string& path);

  /// The four enum names map to themselves; everything else goes through the table.
  EntityType map(std::string_view raw) const;

 private:
  std::unordered_map<std::string, EntityType> table_;
};

struct GazetteerEntry {
  std::vector<std::string> surface_forms;
  std::string entity_id;
  EntityType entity_type = EntityType::other;
  std::string abstract;
  std::string kb_link;
};

struct EntityMention {
  std::string entity_id;
  std::string surface;  // as written in the text
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const EntityMention&) const = default;
};

struct EntityCloudItem {
  std::string entity_id;
  std::string display_name;
  EntityType entity_type = EntityType::person;
  std::size_t mention_count = 0;
  std::string abstract;
  std::string kb_link;

  bool operator==(const EntityCloudItem&) const = default;
};

nlohmann::json to_json(const EntityMention& mention);
nlohmann::json to_json(const EntityCloudItem& item);

struct KbRecord {
  std::string abstract;
  std::string kb_link;
  EntityType entity_type = EntityType::other;

  bool operator==(const KbRecord&) const = default;
};

/// Remote knowledge base. Returns nullopt when the id is unknown; throws on transport failure.
class KbClient {
 public:
  virtual ~KbClient() = default;
  virtual std::optional<KbRecord> fetch(const std::string& entity_id) const = 0;
};

/// GET `<url_template>` with "{id}" replaced by the percent-encoded id; expects {abstract, type, link}.
class HttpKbClient final : public KbClient {
 public:
  HttpKbClient(std::string url_template, std::chrono::milliseconds timeout, TypeMapping mapping = TypeMapping::defaults());
  std::optional<KbRecord> fetch(const std::string& entity_id) const override;

 private:
  std::string url_template_;
  std::chrono::milliseconds timeout_;
  TypeMapping mapping_;
};

/// Immutable after construction. Ambiguous surface forms keep the entry loaded first.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(std::vector<GazetteerEntry> entries);

  /// JSON-lines of {entity_id, surface_forms, entity_type | kb_type, abstract, kb_link}.
  static Gazetteer load(const std::string& path, const TypeMapping& mapping = TypeMapping::defaults());

  const GazetteerEntry* find(std::string_view entity_id) const;
  std::size_t size() const { return entries_.size(); }

  /// Longest-leftmost matches at word boundaries. At each position the longest case-sensitive
  /// match wins; failing that, the longest case-insensitive one. All-caps forms (acronyms)
  /// only match case-sensitively.
  std::vector<EntityMention> detect(std::string_view text) const;

 private:
  struct Form {
    std::u32string exact;
    std::u32string lowered;
    std::size_t entry = 0;
    bool acronym = false;
  };

  std::vector<GazetteerEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::vector<Form> forms_;
  // First word of a form -> form indices, longest first.
  std::unordered_map<std::u32string, std::vector<std::size_t>> by_first_exact_;
  std::unordered_map<std::u32string, std::vector<std::size_t>> by_first_lower_;
};

class EntityLinker {
 public:
  explicit EntityLinker(std::shared_ptr<const Gazetteer> gazetteer, std::shared_ptr<const KbClient> remote = nullptr);

  std::vector<EntityMention> detect(std::string_view text) const { return gazetteer_->detect(text); }

  /// Groups by entity, drops Other, sorts by count descending then display name.
  /// Missing abstracts are filled from kb_lookup when possible, otherwise left empty.
  std::vector<EntityCloudItem> build_cloud(const std::vector<EntityMention>& mentions) const;

  /// Gazetteer first, then one remote attempt whose result (hit) is cached. Throws NotFoundError.
  KbRecord kb_lookup(const std::string& entity_id) const;

 private:
  std::shared_ptr<const Gazetteer> gazetteer_;
  std::shared_ptr<const KbClient> remote_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::string, KbRecord> cache_;
};

}  // namespace verif
