#include "verif/domain_analyzer.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

#include "verif/error.hpp"
#include "verif/text.hpp"
#include "verif/url.hpp"

namespace verif {
namespace {

// Second-level suffixes under which registrations happen one label deeper.
constexpr std::array kMultiPartSuffixes = {
    "co.uk", "org.uk", "ac.uk", "gov.uk", "ltd.uk", "me.uk", "net.uk", "com.au", "net.au", "org.au", "gov.au",
    "co.nz", "org.nz", "co.jp", "ne.jp", "or.jp", "com.br", "com.ar", "com.mx", "co.in", "co.za", "com.tr",
    "com.ua", "org.ua", "com.cn", "com.hk", "co.kr", "com.sg", "com.pl", "co.il"};

// First path segments on social platforms that name a feature rather than an account.
constexpr std::array kNonAccountSegments = {"watch", "shorts", "embed", "results", "playlist", "feed", "i",
                                            "intent", "search", "explore", "hashtag", "home", "share", "sharer.php",
                                            "p", "reel", "reels", "stories", "video", "tag", "login", "s"};

std::string strip_www(std::string host) {
  for (std::string_view prefix : {"www.", "m.", "mobile."}) {
    if (host.rfind(prefix, 0) == 0 && host.size() > prefix.size()) return host.substr(prefix.size());
  }
  return host;
}

bool is_ip_literal(std::string_view host) {
  if (!host.empty() && host.front() == '[') return true;
  return !host.empty() && std::all_of(host.begin(), host.end(), [](char c) {
    return (c >= '0' && c <= '9') || c == '.';
  });
}

std::unordered_map<std::string, SourceEntry> load_list(const std::string& path, SourceFlag flag) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open source list: " + path);
  std::unordered_map<std::string, SourceEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SourceEntry e;
      e.key = text::to_lower_utf8(j.at("key").get<std::string>());
      e.flag = flag;
      if (j.contains("evidence")) {
        for (const auto& ev : j.at("evidence"))
          e.evidence.push_back({ev.value("note", ""), ev.value("source_url", "")});
      }
      if (e.key.empty()) throw ValidationError("empty key");
      auto [it, inserted] = out.emplace(e.key, e);
      if (!inserted) {
        // One entry per key per list: merge evidence from duplicate lines.
        for (auto& ev : e.evidence) it->second.evidence.push_back(std::move(ev));
      }
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + ex.what());
    } catch (const ValidationError& ex) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(SourceFlag flag) {
  switch (flag) {
    case SourceFlag::warning: return "Warning";
    case SourceFlag::mention: return "Mention";
    case SourceFlag::fact_checker: return "FactChecker";
    case SourceFlag::unknown: return "Unknown";
  }
  return "Unknown";
}

std::string_view to_string(KeyGroup group) { return group == KeyGroup::domain ? "domain" : "social_account"; }

nlohmann::json to_json(const DomainVerdict& v) {
  nlohmann::json evidence = nlohmann::json::array();
  for (const auto& e : v.evidence) evidence.push_back({{"note", e.note}, {"source_url", e.source_url}});
  return {{"target", v.target},     {"resolved_key", v.resolved_key}, {"flag", to_string(v.flag)},
          {"evidence", evidence},   {"group", to_string(v.group)},    {"members", v.members}};
}

nlohmann::json to_json(const BatchResult& b) {
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : b.verdicts) verdicts.push_back(to_json(v));
  return {{"verdicts", verdicts}, {"rejects", b.rejects}};
}

void SourceLists::add(SourceEntry entry) {
  entry.key = text::to_lower_utf8(entry.key);
  auto* list = entry.flag == SourceFlag::warning   ? &warnings
               : entry.flag == SourceFlag::mention ? &mentions
               : entry.flag == SourceFlag::fact_checker ? &fact_checkers
                                                         : nullptr;
  if (!list) throw ValidationError("source entry must be flagged Warning, Mention or FactChecker");
  auto key = entry.key;
  (*list)[key] = std::move(entry);
}

SourceLists SourceLists::load(const std::string& warnings_path, const std::string& mentions_path,
                              const std::string& fact_checkers_path) {
  SourceLists lists;
  lists.warnings = load_list(warnings_path, SourceFlag::warning);
  lists.mentions = load_list(mentions_path, SourceFlag::mention);
  lists.fact_checkers = load_list(fact_checkers_path, SourceFlag::fact_checker);
  return lists;
}

std::vector<std::string> default_social_hosts() {
  return {"x.com", "twitter.com", "facebook.com", "youtube.com", "t.me", "tiktok.com", "instagram.com"};
}

std::string registrable_domain(std::string_view host_in) {
  std::string host = strip_www(std::string(host_in));
  if (is_ip_literal(host)) return host;
  std::vector<std::string_view> labels;
  std::string_view h = host;
  std::size_t pos = 0;
  while (true) {
    const auto dot = h.find('.', pos);
    labels.push_back(h.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos));
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  if (labels.size() <= 2) return host;
  std::size_t keep = 2;
  const std::string last_two = std::string(labels[labels.size() - 2]) + "." + std::string(labels.back());
  if (std::find(kMultiPartSuffixes.begin(), kMultiPartSuffixes.end(), last_two) != kMultiPartSuffixes.end()) keep = 3;
  std::string out;
  for (std::size_t i = labels.size() - std::min(keep, labels.size()); i < labels.size(); ++i) {
    if (!out.empty()) out += '.';
    out += labels[i];
  }
  return out;
}

DomainAnalyzer::DomainAnalyzer(SourceLists lists, std::vector<std::string> social_hosts)
    : lists_(std::make_shared<const SourceLists>(std::move(lists))) {
  for (auto& h : social_hosts) social_hosts_.push_back(text::to_lower_utf8(h));
}

std::shared_ptr<const SourceLists> DomainAnalyzer::snapshot() const {
  std::lock_guard lock(swap_mutex_);
  return lists_;
}

void DomainAnalyzer::reload(SourceLists lists) {
  auto fresh = std::make_shared<const SourceLists>(std::move(lists));
  std::lock_guard lock(swap_mutex_);
  lists_ = std::move(fresh);
}

ResolvedKey DomainAnalyzer::resolve_key(std::string_view url_text) const {
  const auto url = Url::parse(url_text);
  if (!url || url->host.empty()) throw ValidationError("cannot parse URL: " + std::string(url_text));

  const auto host = strip_www(url->host);
  if (std::find(social_hosts_.begin(), social_hosts_.end(), host) != social_hosts_.end()) {
    std::string_view path = url->path;
    while (!path.empty() && path.front() == '/') path.remove_prefix(1);
    const auto segment = path.substr(0, path.find('/'));
    const auto account = text::to_lower_utf8(segment);
    const bool reserved =
        std::find(kNonAccountSegments.begin(), kNonAccountSegments.end(), account) != kNonAccountSegments.end();
    if (!segment.empty() && !reserved) return {host + "/" + account, KeyGroup::social_account};
    return {host, KeyGroup::domain};
  }
  return {registrable_domain(url->host), KeyGroup::domain};
}

DomainVerdict DomainAnalyzer::lookup(const SourceLists& lists, std::string target, ResolvedKey key) const {
  DomainVerdict v;
  v.target = std::move(target);
  v.resolved_key = key.key;
  v.group = key.group;
  const std::pair<const std::unordered_map<std::string, SourceEntry>*, SourceFlag> order[] = {
      {&lists.warnings, SourceFlag::warning},
      {&lists.mentions, SourceFlag::mention},
      {&lists.fact_checkers, SourceFlag::fact_checker}};
  for (const auto& [list, flag] : order) {
    if (const auto it = list->find(key.key); it != list->end()) {
      v.flag = flag;
      v.evidence = it->second.evidence;
      return v;
    }
  }
  v.flag = SourceFlag::unknown;
  return v;
}

DomainVerdict DomainAnalyzer::check(std::string_view url) const {
  auto key = resolve_key(url);
  auto v = lookup(*snapshot(), std::string(url), std::move(key));
  v.members = {v.target};
  return v;
}

BatchResult DomainAnalyzer::check_batch(const std::vector<std::string>& urls) const {
  const auto lists = snapshot();
  BatchResult out;
  std::map<std::pair<KeyGroup, std::string>, std::size_t> slot;
  for (const auto& u : urls) {
    ResolvedKey key;
    try {
      key = resolve_key(u);
    } catch (const ValidationError&) {
      out.rejects.push_back(u);
      continue;
    }
    const auto id = std::make_pair(key.group, key.key);
    if (auto it = slot.find(id); it != slot.end()) {
      out.verdicts[it->second].members.push_back(u);
      continue;
    }
    slot.emplace(id, out.verdicts.size());
    auto v = lookup(*lists, u, std::move(key));
    v.members.push_back(u);
    out.verdicts.push_back(std::move(v));
  }
  std::stable_sort(out.verdicts.begin(), out.verdicts.end(), [](const DomainVerdict& a, const DomainVerdict& b) {
    const bool fa = a.flag != SourceFlag::unknown;
    const bool fb = b.flag != SourceFlag::unknown;
    if (fa != fb) return fa;
    if (a.resolved_key != b.resolved_key) return a.resolved_key < b.resolved_key;
    return a.group < b.group;
  });
  return out;
}

}  // namespace verif
