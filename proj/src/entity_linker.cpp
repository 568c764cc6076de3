#include "verif/entity_linker.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <httplib.h>

#include "verif/error.hpp"
#include "verif/text.hpp"
#include "verif/url.hpp"

namespace verif {
namespace {

bool is_acronym(const std::u32string& form) {
  bool any_letter = false;
  for (char32_t c : form) {
    if (text::to_lower(c) != c) any_letter = true;
    else if (text::is_word_char(c) && !(c >= U'0' && c <= U'9')) return false;
  }
  return any_letter;
}

// First maximal run of word characters.
std::u32string first_word(std::u32string_view s) {
  std::size_t end = 0;
  while (end < s.size() && text::is_word_char(s[end])) ++end;
  return std::u32string(s.substr(0, end));
}

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

TypeMapping build_default_mapping() {
  return TypeMapping::from_json({{"dbo:Person", "Person"},
                                 {"schema:Person", "Person"},
                                 {"wd:Q5", "Person"},
                                 {"dbo:Place", "Location"},
                                 {"dbo:Location", "Location"},
                                 {"dbo:Country", "Location"},
                                 {"dbo:City", "Location"},
                                 {"schema:Place", "Location"},
                                 {"dbo:Organisation", "Organization"},
                                 {"dbo:Organization", "Organization"},
                                 {"dbo:Company", "Organization"},
                                 {"schema:Organization", "Organization"}});
}

}  // namespace

std::string_view to_string(EntityType type) {
  switch (type) {
    case EntityType::person: return "Person";
    case EntityType::location: return "Location";
    case EntityType::organization: return "Organization";
    case EntityType::other: return "Other";
  }
  return "Other";
}

std::optional<EntityType> entity_type_from_string(std::string_view name) {
  for (auto t : {EntityType::person, EntityType::location, EntityType::organization, EntityType::other})
    if (to_string(t) == name) return t;
  return std::nullopt;
}

// --- type mapping -------------------------------------------------------------

const TypeMapping& TypeMapping::defaults() {
  static const TypeMapping mapping = build_default_mapping();
  return mapping;
}

TypeMapping TypeMapping::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("type mapping must be a JSON object");
  TypeMapping m;
  for (const auto& [raw, target] : doc.items()) {
    const auto t = target.is_string() ? entity_type_from_string(target.get<std::string>()) : std::nullopt;
    if (!t) throw ValidationError("type mapping target must be Person, Location, Organization or Other: " + raw);
    m.table_[raw] = *t;
  }
  return m;
}

TypeMapping TypeMapping::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open type mapping: " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

EntityType TypeMapping::map(std::string_view raw) const {
  if (const auto direct = entity_type_from_string(raw)) return *direct;
  const auto it = table_.find(std::string(raw));
  return it == table_.end() ? EntityType::other : it->second;
}

// --- serialization ------------------------------------------------------------

nlohmann::json to_json(const EntityMention& m) {
  return {{"entity_id", m.entity_id}, {"surface", m.surface}, {"start", m.start}, {"end", m.end}};
}

nlohmann::json to_json(const EntityCloudItem& c) {
  return {{"entity_id", c.entity_id},         {"display_name", c.display_name}, {"entity_type", to_string(c.entity_type)},
          {"mention_count", c.mention_count}, {"abstract", c.abstract},         {"kb_link", c.kb_link}};
}

// --- gazetteer ----------------------------------------------------------------

Gazetteer::Gazetteer(std::vector<GazetteerEntry> entries) : entries_(std::move(entries)) {
  std::map<std::u32string, std::size_t> seen_exact;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.entity_id.empty()) throw ValidationError("gazetteer entry without entity_id");
    if (e.surface_forms.empty()) throw ValidationError("gazetteer entry without surface forms: " + e.entity_id);
    if (!by_id_.emplace(e.entity_id, i).second) throw ValidationError("duplicate entity_id: " + e.entity_id);
    for (const auto& sf : e.surface_forms) {
      Form f;
      f.exact = text::decode_utf8(sf);
      if (f.exact.empty() || !text::is_word_char(f.exact.front()))
        throw ValidationError("surface form must start with a letter or digit: " + sf);
      // Ambiguous forms: the first entry loaded keeps them.
      if (!seen_exact.emplace(f.exact, i).second) continue;
      f.lowered = text::to_lower(f.exact);
      f.entry = i;
      f.acronym = is_acronym(f.exact);
      forms_.push_back(std::move(f));
    }
  }
  std::map<std::u32string, bool> seen_lower;
  for (std::size_t k = 0; k < forms_.size(); ++k) {
    by_first_exact_[first_word(forms_[k].exact)].push_back(k);
    if (!forms_[k].acronym && seen_lower.emplace(forms_[k].lowered, true).second)
      by_first_lower_[first_word(forms_[k].lowered)].push_back(k);
  }
  auto longest_first = [this](std::size_t a, std::size_t b) {
    if (forms_[a].exact.size() != forms_[b].exact.size()) return forms_[a].exact.size() > forms_[b].exact.size();
    return a < b;
  };
  for (auto& [_, list] : by_first_exact_) std::sort(list.begin(), list.end(), longest_first);
  for (auto& [_, list] : by_first_lower_) std::sort(list.begin(), list.end(), longest_first);
}

Gazetteer Gazetteer::load(const std::string& path, const TypeMapping& mapping) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open gazetteer: " + path);
  std::vector<GazetteerEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      GazetteerEntry e;
      e.entity_id = j.at("entity_id").get<std::string>();
      e.surface_forms = j.at("surface_forms").get<std::vector<std::string>>();
      if (j.contains("entity_type")) e.entity_type = mapping.map(j.at("entity_type").get<std::string>());
      else e.entity_type = mapping.map(j.value("kb_type", ""));
      e.abstract = j.value("abstract", "");
      e.kb_link = j.value("kb_link", "");
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return Gazetteer(std::move(entries));
}

const GazetteerEntry* Gazetteer::find(std::string_view entity_id) const {
  const auto it = by_id_.find(std::string(entity_id));
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

std::vector<EntityMention> Gazetteer::detect(std::string_view input) const {
  std::vector<EntityMention> out;
  const auto cps = text::decode_utf8(input);
  if (cps.empty() || forms_.empty()) return out;
  const auto lowered = text::to_lower(cps);
  const std::u32string_view exact_view(cps);
  const std::u32string_view lower_view(lowered);

  auto boundary_after = [&](std::size_t pos) { return pos >= cps.size() || !text::is_word_char(cps[pos]); };

  auto best_match = [&](std::size_t pos, const std::u32string& head,
                        const std::unordered_map<std::u32string, std::vector<std::size_t>>& index,
                        std::u32string_view hay, bool use_lower) -> const Form* {
    const auto it = index.find(head);
    if (it == index.end()) return nullptr;
    for (auto k : it->second) {
      const auto& form = use_lower ? forms_[k].lowered : forms_[k].exact;
      if (pos + form.size() > hay.size()) continue;
      if (hay.substr(pos, form.size()) != form) continue;
      if (!boundary_after(pos + form.size())) continue;
      return &forms_[k];
    }
    return nullptr;
  };

  std::size_t pos = 0;
  while (pos < cps.size()) {
    const bool word_start = text::is_word_char(cps[pos]) && (pos == 0 || !text::is_word_char(cps[pos - 1]));
    if (!word_start) {
      ++pos;
      continue;
    }
    const Form* match = best_match(pos, first_word(exact_view.substr(pos)), by_first_exact_, exact_view, false);
    if (!match) match = best_match(pos, first_word(lower_view.substr(pos)), by_first_lower_, lower_view, true);
    if (!match) {
      while (pos < cps.size() && text::is_word_char(cps[pos])) ++pos;
      continue;
    }
    const auto len = match->exact.size();
    out.push_back({entries_[match->entry].entity_id, text::encode_utf8(exact_view.substr(pos, len)), pos, pos + len});
    pos += len;
  }
  return out;
}

// --- linker -------------------------------------------------------------------

EntityLinker::EntityLinker(std::shared_ptr<const Gazetteer> gazetteer, std::shared_ptr<const KbClient> remote)
    : gazetteer_(gazetteer ? std::move(gazetteer) : std::make_shared<const Gazetteer>()), remote_(std::move(remote)) {}

KbRecord EntityLinker::kb_lookup(const std::string& entity_id) const {
  if (const auto* e = gazetteer_->find(entity_id)) return {e->abstract, e->kb_link, e->entity_type};
  {
    std::lock_guard lock(cache_mutex_);
    if (const auto it = cache_.find(entity_id); it != cache_.end()) return it->second;
  }
  if (!remote_) throw NotFoundError("unknown entity: " + entity_id);
  std::optional<KbRecord> record;
  try {
    record = remote_->fetch(entity_id);
  } catch (const std::exception& e) {
    throw NotFoundError("knowledge base lookup failed for " + entity_id + ": " + e.what());
  }
  if (!record) throw NotFoundError("unknown entity: " + entity_id);
  std::lock_guard lock(cache_mutex_);
  cache_[entity_id] = *record;
  return *record;
}

std::vector<EntityCloudItem> EntityLinker::build_cloud(const std::vector<EntityMention>& mentions) const {
  std::map<std::string, std::size_t> counts;
  for (const auto& m : mentions) ++counts[m.entity_id];

  std::vector<EntityCloudItem> out;
  for (const auto& [id, count] : counts) {
    EntityCloudItem item;
    item.entity_id = id;
    item.mention_count = count;
    if (const auto* e = gazetteer_->find(id)) {
      item.display_name = e->surface_forms.front();
      item.entity_type = e->entity_type;
      item.abstract = e->abstract;
      item.kb_link = e->kb_link;
      if (item.abstract.empty() && remote_) {
        try {
          // The gazetteer entry wins for type; only the text fields are borrowed.
          std::optional<KbRecord> r;
          {
            std::lock_guard lock(cache_mutex_);
            if (const auto it = cache_.find(id); it != cache_.end()) r = it->second;
          }
          if (!r) {
            r = remote_->fetch(id);
            if (r) {
              std::lock_guard lock(cache_mutex_);
              cache_[id] = *r;
            }
          }
          if (r) {
            item.abstract = r->abstract;
            if (item.kb_link.empty()) item.kb_link = r->kb_link;
          }
        } catch (const std::exception&) {
          // Enrichment failures leave the abstract empty.
        }
      }
    } else {
      item.display_name = id;
      try {
        const auto r = kb_lookup(id);
        item.entity_type = r.entity_type;
        item.abstract = r.abstract;
        item.kb_link = r.kb_link;
      } catch (const NotFoundError&) {
        item.entity_type = EntityType::other;
      }
    }
    if (item.entity_type == EntityType::other) continue;
    out.push_back(std::move(item));
  }
  std::sort(out.begin(), out.end(), [](const EntityCloudItem& a, const EntityCloudItem& b) {
    if (a.mention_count != b.mention_count) return a.mention_count > b.mention_count;
    if (a.display_name != b.display_name) return a.display_name < b.display_name;
    return a.entity_id < b.entity_id;
  });
  return out;
}

// --- remote knowledge base ----------------------------------------------------

HttpKbClient::HttpKbClient(std::string url_template, std::chrono::milliseconds timeout, TypeMapping mapping)
    : url_template_(std::move(url_template)), timeout_(timeout), mapping_(std::move(mapping)) {}

std::optional<KbRecord> HttpKbClient::fetch(const std::string& entity_id) const {
  std::string target = url_template_;
  const auto slot = target.find("{id}");
  if (slot == std::string::npos) throw ValidationError("knowledge base URL template lacks {id}");
  target.replace(slot, 4, percent_encode(entity_id));
  const auto url = Url::parse_http(target);
  if (!url) throw ValidationError("bad knowledge base URL: " + target);

  httplib::Client client(url->origin());
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  auto res = client.Get(url->request_target());
  if (!res) throw Error("knowledge base request failed: " + httplib::to_string(res.error()));
  if (res->status == 404) return std::nullopt;
  if (res->status < 200 || res->status >= 300)
    throw Error("knowledge base returned HTTP " + std::to_string(res->status));
  try {
    const auto j = nlohmann::json::parse(res->body);
    return KbRecord{j.value("abstract", ""), j.value("link", ""), mapping_.map(j.value("type", ""))};
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("knowledge base returned invalid JSON: ") + e.what());
  }
}

}  // namespace verif
