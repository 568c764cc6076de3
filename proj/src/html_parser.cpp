#include "verif/html_parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include "verif/text.hpp"

namespace verif::html {
namespace {

constexpr std::array kVoid = {"area", "base", "br",   "col",   "embed",  "hr",    "img",
                              "input", "link", "meta", "param", "source", "track", "wbr"};

constexpr std::array kBlock = {
    "address", "article", "aside",    "blockquote", "body",     "caption", "center", "dd",
    "details", "dialog",  "dir",      "div",        "dl",       "dt",      "fieldset",
    "figcaption", "figure", "footer", "form",       "h1",       "h2",      "h3",     "h4",
    "h5",      "h6",      "header",   "hgroup",     "hr",       "html",    "li",     "main",
    "menu",    "nav",     "ol",       "p",          "pre",      "section", "summary", "table",
    "tbody",   "td",      "tfoot",    "th",         "thead",    "tr",      "ul",     "br",
    "iframe",  "video",   "img",      "picture",    "audio",    "noscript", "option", "select",
    "textarea", "button", "legend",   "title",      "head"};

constexpr std::array kRawText = {"script", "style", "textarea", "title", "xmp", "iframe", "noembed",
                                 "noframes", "noscript", "plaintext"};

// Elements whose start implicitly closes an open <p>.
constexpr std::array kClosesParagraph = {
    "address", "article", "aside", "blockquote", "details", "dialog", "div", "dl", "fieldset",
    "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header",
    "hgroup", "hr", "main", "menu", "nav", "ol", "p", "pre", "section", "table", "ul"};

template <std::size_t N>
bool contains(const std::array<const char*, N>& set, std::string_view name) {
  return std::any_of(set.begin(), set.end(), [&](const char* s) { return name == s; });
}

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> table = {
      {"amp", U'&'},      {"lt", U'<'},       {"gt", U'>'},       {"quot", U'"'},
      {"apos", U'\''},    {"nbsp", 0xA0},     {"copy", 0xA9},     {"reg", 0xAE},
      {"trade", 0x2122},  {"hellip", 0x2026}, {"mdash", 0x2014},  {"ndash", 0x2013},
      {"lsquo", 0x2018},  {"rsquo", 0x2019},  {"sbquo", 0x201A},  {"ldquo", 0x201C},
      {"rdquo", 0x201D},  {"bdquo", 0x201E},  {"laquo", 0xAB},    {"raquo", 0xBB},
      {"bull", 0x2022},   {"middot", 0xB7},   {"euro", 0x20AC},   {"pound", 0xA3},
      {"yen", 0xA5},      {"cent", 0xA2},     {"sect", 0xA7},     {"deg", 0xB0},
      {"plusmn", 0xB1},   {"times", 0xD7},    {"divide", 0xF7},   {"para", 0xB6},
      {"iexcl", 0xA1},    {"iquest", 0xBF},   {"shy", 0xAD},      {"ensp", 0x2002},
      {"emsp", 0x2003},   {"thinsp", 0x2009}, {"zwnj", 0x200C},   {"zwj", 0x200D},
      {"Agrave", 0xC0},   {"Aacute", 0xC1},   {"Acirc", 0xC2},    {"Atilde", 0xC3},
      {"Auml", 0xC4},     {"Aring", 0xC5},    {"AElig", 0xC6},    {"Ccedil", 0xC7},
      {"Egrave", 0xC8},   {"Eacute", 0xC9},   {"Ecirc", 0xCA},    {"Euml", 0xCB},
      {"Igrave", 0xCC},   {"Iacute", 0xCD},   {"Icirc", 0xCE},    {"Iuml", 0xCF},
      {"Ntilde", 0xD1},   {"Ograve", 0xD2},   {"Oacute", 0xD3},   {"Ocirc", 0xD4},
      {"Otilde", 0xD5},   {"Ouml", 0xD6},     {"Oslash", 0xD8},   {"Ugrave", 0xD9},
      {"Uacute", 0xDA},   {"Ucirc", 0xDB},    {"Uuml", 0xDC},     {"Yacute", 0xDD},
      {"szlig", 0xDF},    {"agrave", 0xE0},   {"aacute", 0xE1},   {"acirc", 0xE2},
      {"atilde", 0xE3},   {"auml", 0xE4},     {"aring", 0xE5},    {"aelig", 0xE6},
      {"ccedil", 0xE7},   {"egrave", 0xE8},   {"eacute", 0xE9},   {"ecirc", 0xEA},
      {"euml", 0xEB},     {"igrave", 0xEC},   {"iacute", 0xED},   {"icirc", 0xEE},
      {"iuml", 0xEF},     {"ntilde", 0xF1},   {"ograve", 0xF2},   {"oacute", 0xF3},
      {"ocirc", 0xF4},    {"otilde", 0xF5},   {"ouml", 0xF6},     {"oslash", 0xF8},
      {"ugrave", 0xF9},   {"uacute", 0xFA},   {"ucirc", 0xFB},    {"uuml", 0xFC},
      {"yacute", 0xFD},   {"yuml", 0xFF},
  };
  return table;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_name_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '-' || c == '_' || c == ':' || c == '.' || u >= 0x80;
}

class TreeBuilder {
 public:
  explicit TreeBuilder(std::string_view src) : src_(src) {
    root_.tag = "#document";
    root_.source_end = src.size();
  }

  Node build() {
    std::vector<Node*> stack{&root_};
    stack_ = &stack;
    std::size_t pos = 0;
    while (pos < src_.size()) {
      const auto lt = src_.find('<', pos);
      if (lt == std::string_view::npos) {
        add_text(pos, src_.size());
        break;
      }
      if (lt > pos) add_text(pos, lt);
      pos = consume_markup(lt);
    }
    while (stack.size() > 1) close_top(src_.size());
    return std::move(root_);
  }

 private:
  Node* current() { return stack_->back(); }

  void add_text(std::size_t begin, std::size_t end) {
    if (begin >= end) return;
    Node t;
    t.kind = Node::Kind::text;
    t.text = decode_entities(src_.substr(begin, end - begin));
    t.source_begin = begin;
    t.source_end = end;
    auto& siblings = current()->children;
    // Merge with a preceding text node (happens around stray '<').
    if (!siblings.empty() && siblings.back().kind == Node::Kind::text && siblings.back().source_end == begin) {
      siblings.back().text += t.text;
      siblings.back().source_end = end;
      return;
    }
    siblings.push_back(std::move(t));
  }

  void close_top(std::size_t end) {
    Node* top = stack_->back();
    top->source_end = std::max(end, top->source_begin);
    stack_->pop_back();
  }

  // Returns the position after the construct starting at `lt`.
  std::size_t consume_markup(std::size_t lt) {
    const auto rest = src_.substr(lt);
    if (rest.substr(0, 4) == "<!--") {
      const auto close = src_.find("-->", lt + 4);
      return close == std::string_view::npos ? src_.size() : close + 3;
    }
    if (rest.size() >= 2 && (rest[1] == '!' || rest[1] == '?')) {
      const auto close = src_.find('>', lt);
      return close == std::string_view::npos ? src_.size() : close + 1;
    }
    if (rest.size() >= 2 && rest[1] == '/') {
      std::size_t p = lt + 2;
      std::size_t name_end = p;
      while (name_end < src_.size() && is_name_char(src_[name_end])) ++name_end;
      if (name_end == p) {
        // "</>" or "</ " is bogus, skip to '>'
        const auto close = src_.find('>', lt);
        return close == std::string_view::npos ? src_.size() : close + 1;
      }
      const auto name = lower(src_.substr(p, name_end - p));
      const auto close = src_.find('>', name_end);
      const std::size_t after = close == std::string_view::npos ? src_.size() : close + 1;
      end_tag(name, lt, after);
      return after;
    }
    if (rest.size() >= 2 && std::isalpha(static_cast<unsigned char>(rest[1]))) {
      return start_tag(lt);
    }
    add_text(lt, lt + 1);
    return lt + 1;
  }

  void end_tag(const std::string& name, std::size_t tag_begin, std::size_t tag_end) {
    if (name == "br") {  // "</br>" behaves like "<br>"
      Node br;
      br.tag = "br";
      br.source_begin = tag_begin;
      br.source_end = tag_end;
      current()->children.push_back(std::move(br));
      return;
    }
    auto& stack = *stack_;
    for (std::size_t i = stack.size(); i-- > 1;) {
      if (stack[i]->tag == name) {
        while (stack.size() > i + 1) close_top(tag_begin);
        close_top(tag_end);
        return;
      }
    }
    // Stray end tag: ignored.
  }

  void implicit_close(const std::string& name, std::size_t at) {
    auto& stack = *stack_;
    auto close_nearest = [&](std::initializer_list<std::string_view> targets,
                             std::initializer_list<std::string_view> barriers) {
      for (std::size_t i = stack.size(); i-- > 1;) {
        const auto& tag = stack[i]->tag;
        if (std::find(barriers.begin(), barriers.end(), tag) != barriers.end()) return;
        if (std::find(targets.begin(), targets.end(), tag) != targets.end()) {
          while (stack.size() > i) close_top(at);
          return;
        }
      }
    };
    if (contains(kClosesParagraph, name)) close_nearest({"p"}, {"div", "td", "th", "li", "blockquote", "section", "article", "button"});
    if (name == "li") close_nearest({"li"}, {"ul", "ol", "menu"});
    if (name == "dt" || name == "dd") close_nearest({"dt", "dd"}, {"dl"});
    if (name == "td" || name == "th") close_nearest({"td", "th"}, {"tr", "table"});
    if (name == "tr") close_nearest({"tr"}, {"table", "tbody", "thead", "tfoot"});
    if (name == "option") close_nearest({"option"}, {"select", "datalist"});
  }

  std::size_t start_tag(std::size_t lt) {
    std::size_t p = lt + 1;
    std::size_t name_end = p;
    while (name_end < src_.size() && is_name_char(src_[name_end])) ++name_end;
    Node el;
    el.tag = lower(src_.substr(p, name_end - p));
    el.source_begin = lt;
    p = name_end;

    bool self_closing = false;
    while (p < src_.size()) {
      while (p < src_.size() && std::isspace(static_cast<unsigned char>(src_[p]))) ++p;
      if (p >= src_.size()) break;
      if (src_[p] == '>') {
        ++p;
        break;
      }
      if (src_[p] == '/') {
        self_closing = (p + 1 < src_.size() && src_[p + 1] == '>');
        ++p;
        continue;
      }
      std::size_t an = p;
      while (an < src_.size() && !std::isspace(static_cast<unsigned char>(src_[an])) && src_[an] != '=' &&
             src_[an] != '>' && !(src_[an] == '/' && an + 1 < src_.size() && src_[an + 1] == '>'))
        ++an;
      if (an == p) {  // lone '=' or similar garbage
        ++p;
        continue;
      }
      std::string attr_name = lower(src_.substr(p, an - p));
      p = an;
      while (p < src_.size() && std::isspace(static_cast<unsigned char>(src_[p]))) ++p;
      std::string value;
      if (p < src_.size() && src_[p] == '=') {
        ++p;
        while (p < src_.size() && std::isspace(static_cast<unsigned char>(src_[p]))) ++p;
        if (p < src_.size() && (src_[p] == '"' || src_[p] == '\'')) {
          const char q = src_[p];
          const auto close = src_.find(q, p + 1);
          const auto vend = close == std::string_view::npos ? src_.size() : close;
          value = decode_entities(src_.substr(p + 1, vend - p - 1));
          p = close == std::string_view::npos ? src_.size() : close + 1;
        } else {
          std::size_t vend = p;
          while (vend < src_.size() && !std::isspace(static_cast<unsigned char>(src_[vend])) && src_[vend] != '>') ++vend;
          value = decode_entities(src_.substr(p, vend - p));
          p = vend;
        }
      }
      const bool dup = std::any_of(el.attributes.begin(), el.attributes.end(),
                                   [&](const auto& kv) { return kv.first == attr_name; });
      if (!dup) el.attributes.emplace_back(std::move(attr_name), std::move(value));
    }
    const std::size_t after_tag = p;

    implicit_close(el.tag, lt);

    if (is_void_element(el.tag) || self_closing) {
      el.source_end = after_tag;
      current()->children.push_back(std::move(el));
      return after_tag;
    }

    if (contains(kRawText, el.tag)) {
      const auto close = find_end_tag(el.tag, after_tag);
      const auto content_end = close == std::string_view::npos ? src_.size() : close;
      if (content_end > after_tag) {
        Node t;
        t.kind = Node::Kind::text;
        const auto raw = src_.substr(after_tag, content_end - after_tag);
        const bool decode = el.tag == "title" || el.tag == "textarea";
        t.text = decode ? decode_entities(raw) : std::string(raw);
        t.source_begin = after_tag;
        t.source_end = content_end;
        el.children.push_back(std::move(t));
      }
      std::size_t resume = src_.size();
      if (close != std::string_view::npos) {
        const auto gt = src_.find('>', close);
        resume = gt == std::string_view::npos ? src_.size() : gt + 1;
      }
      el.source_end = resume;
      current()->children.push_back(std::move(el));
      return resume;
    }

    current()->children.push_back(std::move(el));
    stack_->push_back(&current()->children.back());
    return after_tag;
  }

  std::size_t find_end_tag(const std::string& name, std::size_t from) const {
    std::size_t p = from;
    while (true) {
      const auto lt = src_.find("</", p);
      if (lt == std::string_view::npos) return lt;
      if (lt + 2 + name.size() <= src_.size() && lower(src_.substr(lt + 2, name.size())) == name) {
        const auto after = lt + 2 + name.size();
        if (after == src_.size() || !is_name_char(src_[after])) return lt;
      }
      p = lt + 2;
    }
  }

  std::string_view src_;
  Node root_;
  std::vector<Node*>* stack_ = nullptr;
};

}  // namespace

const std::string* Node::attribute(std::string_view name) const {
  for (const auto& [k, v] : attributes)
    if (k == name) return &v;
  return nullptr;
}

bool is_void_element(std::string_view tag) { return contains(kVoid, tag); }
bool is_block_element(std::string_view tag) { return contains(kBlock, tag); }

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    const auto body = s.substr(i + 1, semi - i - 1);
    if (!body.empty() && body[0] == '#') {
      unsigned long cp = 0;
      std::from_chars_result r{};
      if (body.size() > 1 && (body[1] == 'x' || body[1] == 'X'))
        r = std::from_chars(body.data() + 2, body.data() + body.size(), cp, 16);
      else
        r = std::from_chars(body.data() + 1, body.data() + body.size(), cp, 10);
      if (r.ec == std::errc{} && r.ptr == body.data() + body.size() && cp > 0 && cp <= 0x10FFFF &&
          !(cp >= 0xD800 && cp <= 0xDFFF)) {
        text::append_utf8(out, static_cast<char32_t>(cp));
        i = semi + 1;
        continue;
      }
    } else if (const auto it = named_entities().find(body); it != named_entities().end()) {
      text::append_utf8(out, it->second);
      i = semi + 1;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

Node parse(std::string_view html) { return TreeBuilder(html).build(); }

}  // namespace verif::html
