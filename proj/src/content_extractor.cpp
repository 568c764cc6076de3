#include "verif/content_extractor.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "verif/error.hpp"
#include "verif/html_parser.hpp"
#include "verif/text.hpp"

namespace verif {
namespace {

constexpr std::array kSkipped = {"script", "style", "noscript", "template", "svg", "math",
                                 "head", "object", "canvas", "select", "textarea", "title"};

constexpr std::array kBoilerplateTags = {"nav", "header", "footer", "aside", "form", "button", "menu", "dialog"};

constexpr std::array kBoilerplateClassTokens = {
    "nav",       "navbar",  "navigation", "menu",       "footer",    "header",  "sidebar",
    "cookie",    "cookies", "banner",     "advert",     "advertisement", "ads", "ad",
    "share",     "social",  "related",    "newsletter", "promo",     "breadcrumb",
    "breadcrumbs", "subscribe", "masthead", "skip"};

template <std::size_t N>
bool in(const std::array<const char*, N>& set, std::string_view name) {
  return std::any_of(set.begin(), set.end(), [&](const char* s) { return name == s; });
}

bool has_boilerplate_marker(const html::Node& el) {
  for (const char* attr : {"class", "id", "role"}) {
    const auto* value = el.attribute(attr);
    if (!value) continue;
    std::string token;
    auto check = [&]() {
      const bool hit = in(kBoilerplateClassTokens, token) || token == "navigation" || token == "contentinfo";
      token.clear();
      return hit;
    };
    for (char c : *value) {
      if (c == ' ' || c == '-' || c == '_' || c == '\t') {
        if (!token.empty() && check()) return true;
      } else {
        token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    if (!token.empty() && check()) return true;
  }
  return false;
}

bool is_hidden(const html::Node& el) {
  if (el.attribute("hidden")) return true;
  if (const auto* aria = el.attribute("aria-hidden"); aria && *aria == "true") return true;
  if (const auto* style = el.attribute("style")) {
    std::string s;
    for (char c : *style)
      if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::tolower(c)));
    if (s.find("display:none") != std::string::npos || s.find("visibility:hidden") != std::string::npos)
      return true;
  }
  return false;
}

std::size_t count_non_space(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](unsigned char c) { return !std::isspace(c); }));
}

const html::Node* find_first(const html::Node& node, std::string_view tag) {
  if (node.is_element(tag)) return &node;
  for (const auto& child : node.children)
    if (const auto* hit = find_first(child, tag)) return hit;
  return nullptr;
}

std::string inner_text(const html::Node& node) {
  if (node.kind == html::Node::Kind::text) return node.text;
  std::string out;
  for (const auto& c : node.children) {
    out += inner_text(c);
    out += ' ';
  }
  return out;
}

class Walker {
 public:
  Walker(std::string_view source, std::optional<Url> base, const ExtractOptions& options)
      : source_(source), base_(std::move(base)), options_(options) {}

  ExtractedContent run(const html::Node& root) {
    if (const auto* base_el = find_first(root, "base")) {
      if (const auto* href = base_el->attribute("href")) {
        if (base_) {
          if (auto resolved = base_->resolve(*href)) base_ = resolved;
        } else if (auto parsed = Url::parse_http(*href)) {
          base_ = parsed;
        }
      }
    }
    if (const auto* title = find_first(root, "title")) {
      auto t = text::normalize_whitespace(inner_text(*title));
      if (!t.empty()) out_.title = std::move(t);
    }
    if (!out_.title) {
      if (const auto* h1 = find_first(root, "h1")) {
        auto t = text::normalize_whitespace(inner_text(*h1));
        if (!t.empty()) out_.title = std::move(t);
      }
    }
    if (base_) out_.source_url = base_->str();

    walk(root, false);
    flush();
    out_.text = text::encode_utf8(text_);
    out_.sentences = segment(out_.text, options_.language);
    return std::move(out_);
  }

 private:
  struct Run {
    std::string raw;
    std::size_t begin = std::string::npos;
    std::size_t end = 0;
  };

  void touch(const html::Node& node) {
    run_.begin = std::min(run_.begin, node.source_begin);
    run_.end = std::max(run_.end, node.source_end);
  }

  void flush() {
    const auto normalized = text::normalize_whitespace(run_.raw);
    if (!normalized.empty() && run_.begin != std::string::npos) {
      const auto markup = count_non_space(source_.substr(run_.begin, run_.end - run_.begin));
      const double density =
          markup == 0 ? 1.0 : static_cast<double>(count_non_space(normalized)) / static_cast<double>(markup);
      if (density > options_.density_threshold) {
        if (!text_.empty()) text_.push_back(U' ');
        text_ += text::decode_utf8(normalized);
      }
    }
    run_ = Run{};
  }

  std::optional<std::string> resolve(std::string_view ref) const {
    if (ref.empty() || ref.substr(0, 5) == "data:") return std::nullopt;
    std::optional<Url> url = base_ ? base_->resolve(ref) : Url::parse(ref);
    if (!url || (url->scheme != "http" && url->scheme != "https")) return std::nullopt;
    return url->str();
  }

  void add_media(const html::Node& el, MediaType type, std::string_view src) {
    auto url = resolve(src);
    if (!url) return;
    flush();
    MediaRef ref;
    ref.url = std::move(*url);
    ref.media_type = type;
    if (const auto* alt = el.attribute("alt"); alt && !alt->empty()) ref.alt_text = text::normalize_whitespace(*alt);
    ref.document_position = element_ordinal_;
    ref.text_offset = text_.size();
    (type == MediaType::image ? out_.images : out_.videos).push_back(std::move(ref));
  }

  static std::optional<std::string> image_source(const html::Node& el) {
    for (const char* attr : {"src", "data-src", "data-original"}) {
      const auto* v = el.attribute(attr);
      if (v && !v->empty() && v->rfind("data:", 0) != 0) return *v;
    }
    if (const auto* srcset = el.attribute("srcset")) {
      std::istringstream in(*srcset);
      std::string first;
      if (in >> first) {
        if (!first.empty() && first.back() == ',') first.pop_back();
        return first;
      }
    }
    return std::nullopt;
  }

  void add_link(std::string_view href) {
    const auto url = base_ ? base_->resolve(href) : Url::parse(href);
    if (!url || (url->scheme != "http" && url->scheme != "https")) return;
    auto s = url->str_without_fragment();
    if (seen_links_.insert(s).second) out_.links.push_back(std::move(s));
  }

  void walk(const html::Node& node, bool suppressed, bool in_article = false) {
    if (node.kind == html::Node::Kind::text) {
      if (suppressed) return;
      run_.raw += node.text;
      touch(node);
      return;
    }
    ++element_ordinal_;
    const std::string& tag = node.tag;
    if (in(kSkipped, tag)) return;

    // <header>/<footer> inside an article belong to the article.
    const bool sectioning = (tag == "header" || tag == "footer") && in_article;
    const bool chrome =
        (in(kBoilerplateTags, tag) && !sectioning) || (!sectioning && has_boilerplate_marker(node)) || is_hidden(node);
    in_article = in_article || tag == "article" || tag == "main";
    const bool suppress_here = suppressed || chrome;

    if (tag == "a") {
      if (const auto* href = node.attribute("href")) add_link(*href);
    }

    if (tag == "img") {
      if (!suppress_here) {
        if (auto src = image_source(node)) add_media(node, MediaType::image, *src);
      }
      return;
    }
    if (tag == "video") {
      if (!suppress_here) {
        const std::string* src = node.attribute("src");
        if (!src || src->empty()) {
          for (const auto& child : node.children)
            if (child.is_element("source") && child.attribute("src")) {
              src = child.attribute("src");
              break;
            }
        }
        if (src) add_media(node, MediaType::video, *src);
      }
      return;  // fallback content inside <video> is not article text
    }
    if (tag == "iframe" || tag == "embed") {
      if (!suppress_here) {
        if (const auto* src = node.attribute("src")) {
          if (const auto url = base_ ? base_->resolve(*src) : Url::parse(*src)) {
            if (classify_submission(*url) == SubmissionClass::video_platform)
              add_media(node, MediaType::video, url->str());
          }
        }
      }
      return;
    }
    if (tag == "br") {
      run_.raw.push_back(' ');
      return;
    }

    const bool block = node.tag == "#document" || html::is_block_element(tag) || chrome;
    if (block) flush();
    if (!block && !suppress_here) touch(node);
    for (const auto& child : node.children) walk(child, suppress_here, in_article);
    if (block) flush();
  }

  std::string_view source_;
  std::optional<Url> base_;
  const ExtractOptions& options_;
  ExtractedContent out_;
  std::u32string text_;
  Run run_;
  std::size_t element_ordinal_ = 0;
  std::unordered_set<std::string> seen_links_;
};

}  // namespace

std::string_view to_string(SubmissionKind kind) {
  switch (kind) {
    case SubmissionKind::url: return "url";
    case SubmissionKind::raw_html: return "raw_html";
    case SubmissionKind::plain_text: return "plain_text";
    case SubmissionKind::media_upload: return "media_upload";
  }
  return "unknown";
}

std::optional<SubmissionKind> submission_kind_from_string(std::string_view name) {
  if (name == "url") return SubmissionKind::url;
  if (name == "raw_html" || name == "html") return SubmissionKind::raw_html;
  if (name == "plain_text" || name == "text") return SubmissionKind::plain_text;
  if (name == "media_upload" || name == "media") return SubmissionKind::media_upload;
  return std::nullopt;
}

void Submission::validate() const {
  if (value.empty()) throw ValidationError("submission payload is empty");
  if (kind == SubmissionKind::url && !Url::parse_http(value))
    throw ValidationError("submission url must be an absolute http(s) URL: " + value);
}

std::string_view to_string(MediaType type) { return type == MediaType::image ? "image" : "video"; }

std::string_view to_string(SubmissionClass cls) {
  switch (cls) {
    case SubmissionClass::webpage: return "webpage";
    case SubmissionClass::video_platform: return "video_platform";
    case SubmissionClass::direct_media: return "direct_media";
  }
  return "webpage";
}

ExtractedContent extract(std::string_view html, const std::optional<Url>& base_url, const ExtractOptions& options) {
  const auto root = html::parse(html);
  return Walker(html, base_url, options).run(root);
}

ExtractedContent from_plain_text(std::string_view plain, std::optional<std::string_view> language) {
  ExtractedContent out;
  out.text = std::string(plain);
  out.sentences = segment(out.text, language);
  return out;
}

SubmissionRules SubmissionRules::defaults() {
  SubmissionRules rules;
  rules.video_platforms = {
      {"youtube.com", R"(^/(watch\?(.*&)?v=[\w-]+.*|shorts/[\w-]+.*|embed/[\w-]+.*|live/[\w-]+.*|v/[\w-]+.*)$)"},
      {"youtube-nocookie.com", R"(^/embed/[\w-]+.*$)"},
      {"youtu.be", R"(^/[\w-]+.*$)"},
      {"vimeo.com", R"(^/(video/)?\d+.*$)"},
      {"player.vimeo.com", R"(^/video/\d+.*$)"},
      {"dailymotion.com", R"(^/video/\w+.*$)"},
      {"tiktok.com", R"(^/@[\w.-]+/video/\d+.*$)"},
  };
  rules.media_extensions = {"jpg", "jpeg", "png",  "gif", "webp", "bmp", "tif", "tiff", "svg", "avif", "heic",
                            "mp4", "webm", "mov",  "avi", "mkv",  "m4v", "mpg", "mpeg", "ogv", "3gp"};
  return rules;
}

namespace {

std::string strip_host_prefix(std::string host) {
  for (std::string_view prefix : {"www.", "m.", "mobile."}) {
    if (host.rfind(prefix, 0) == 0 && host.size() > prefix.size()) return host.substr(prefix.size());
  }
  return host;
}

}  // namespace

SubmissionClass classify_submission(const Url& url, const SubmissionRules& rules) {
  const auto host = strip_host_prefix(url.host);
  const auto target = url.request_target();
  for (const auto& rule : rules.video_platforms) {
    if (host != rule.host) continue;
    if (std::regex_match(target, std::regex(rule.path_pattern))) return SubmissionClass::video_platform;
  }
  const auto dot = url.path.rfind('.');
  const auto slash = url.path.rfind('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    const auto ext = text::to_lower_utf8(url.path.substr(dot + 1));
    if (std::find(rules.media_extensions.begin(), rules.media_extensions.end(), ext) != rules.media_extensions.end())
      return SubmissionClass::direct_media;
  }
  return SubmissionClass::webpage;
}

std::optional<std::string> video_id(const Url& url) {
  static const std::regex query_v(R"((^|&)v=([\w-]+))");
  static const std::regex path_id(R"(^/(shorts|embed|live|v|video)/([\w-]+))");
  const auto host = strip_host_prefix(url.host);
  std::smatch m;
  if (host == "youtu.be") {
    static const std::regex short_id(R"(^/([\w-]+))");
    if (std::regex_search(url.path, m, short_id)) return m[1].str();
    return std::nullopt;
  }
  if (std::regex_search(url.query, m, query_v)) return m[2].str();
  if (std::regex_search(url.path, m, path_id)) return m[2].str();
  static const std::regex numeric(R"(^/(\d+))");
  if (std::regex_search(url.path, m, numeric)) return m[1].str();
  return std::nullopt;
}

}  // namespace verif
