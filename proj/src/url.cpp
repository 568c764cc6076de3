#include "verif/url.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <vector>

namespace verif {
namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool valid_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '+' || c == '-' || c == '.';
  });
}

bool valid_host(std::string_view h) {
  if (h.empty()) return false;
  if (h.front() == '[') return h.back() == ']';
  return std::all_of(h.begin(), h.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c >= 0x80;
  });
}

int default_port(std::string_view scheme) {
  if (scheme == "http") return 80;
  if (scheme == "https") return 443;
  return -1;
}

}  // namespace

std::string remove_dot_segments(std::string_view path) {
  if (path.empty()) return "/";
  if (path.front() == '/') path.remove_prefix(1);
  std::vector<std::string_view> segments;
  std::size_t i = 0;
  while (true) {
    const auto j = path.find('/', i);
    const auto seg = path.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i);
    const bool last = j == std::string_view::npos;
    if (seg == "..") {
      if (!segments.empty()) segments.pop_back();
      if (last) segments.emplace_back();
    } else if (seg == ".") {
      if (last) segments.emplace_back();
    } else {
      segments.push_back(seg);
    }
    if (last) break;
    i = j + 1;
  }
  std::string result;
  for (const auto seg : segments) {
    result += '/';
    result += seg;
  }
  return result.empty() ? "/" : result;
}

std::optional<Url> Url::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);

  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto scheme = text.substr(0, colon);
  if (!valid_scheme(scheme)) return std::nullopt;
  auto rest = text.substr(colon + 1);
  if (rest.substr(0, 2) != "//") return std::nullopt;
  rest.remove_prefix(2);

  Url url;
  url.scheme = lower_ascii(scheme);

  const auto authority_end = rest.find_first_of("/?#");
  auto authority = rest.substr(0, authority_end);
  rest = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

  if (const auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);

  std::string_view host = authority;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    host = authority.substr(0, close + 1);
    auto after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') return std::nullopt;
      after.remove_prefix(1);
      authority = after;
    } else {
      authority = {};
    }
    if (!authority.empty()) {
      int port = 0;
      auto [p, ec] = std::from_chars(authority.data(), authority.data() + authority.size(), port);
      if (ec != std::errc{} || p != authority.data() + authority.size() || port <= 0 || port > 65535)
        return std::nullopt;
      url.port = port;
    }
  } else if (const auto pc = authority.rfind(':'); pc != std::string_view::npos) {
    host = authority.substr(0, pc);
    const auto port_text = authority.substr(pc + 1);
    if (!port_text.empty()) {
      int port = 0;
      auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
      if (ec != std::errc{} || p != port_text.data() + port_text.size() || port <= 0 || port > 65535)
        return std::nullopt;
      url.port = port;
    }
  }
  while (!host.empty() && host.back() == '.') host.remove_suffix(1);
  if (!valid_host(host)) return std::nullopt;
  url.host = lower_ascii(host);
  if (url.port && *url.port == default_port(url.scheme)) url.port.reset();

  if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
    url.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  if (const auto q = rest.find('?'); q != std::string_view::npos) {
    url.query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  url.path = rest.empty() ? "/" : remove_dot_segments(rest);
  return url;
}

std::optional<Url> Url::parse_http(std::string_view text) {
  auto url = parse(text);
  if (!url || (url->scheme != "http" && url->scheme != "https")) return std::nullopt;
  return url;
}

std::optional<Url> Url::resolve(std::string_view ref) const {
  while (!ref.empty() && std::isspace(static_cast<unsigned char>(ref.front()))) ref.remove_prefix(1);
  while (!ref.empty() && std::isspace(static_cast<unsigned char>(ref.back()))) ref.remove_suffix(1);

  if (auto absolute = parse(ref)) return absolute;
  if (ref.substr(0, 2) == "//") return parse(scheme + ":" + std::string(ref));
  // A scheme without "//" (mailto:, javascript:, data:) is not resolvable to a web URL.
  if (const auto colon = ref.find(':'); colon != std::string_view::npos) {
    const auto slash = ref.find_first_of("/?#");
    if (slash == std::string_view::npos || colon < slash) {
      if (valid_scheme(ref.substr(0, colon))) return std::nullopt;
    }
  }

  Url out = *this;
  out.fragment.clear();
  std::string_view r = ref;
  std::string frag;
  bool has_frag = false;
  if (const auto hash = r.find('#'); hash != std::string_view::npos) {
    frag = std::string(r.substr(hash + 1));
    has_frag = true;
    r = r.substr(0, hash);
  }
  std::string query;
  bool has_query = false;
  if (const auto q = r.find('?'); q != std::string_view::npos) {
    query = std::string(r.substr(q + 1));
    has_query = true;
    r = r.substr(0, q);
  }

  if (r.empty()) {
    if (has_query) out.query = query;
  } else if (r.front() == '/') {
    out.path = remove_dot_segments(r);
    out.query = query;
  } else {
    const auto last_slash = path.rfind('/');
    std::string merged = (last_slash == std::string::npos ? std::string("/") : path.substr(0, last_slash + 1));
    merged += r;
    out.path = remove_dot_segments(merged);
    out.query = query;
  }
  if (has_frag) out.fragment = frag;
  return out;
}

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (port) out += ":" + std::to_string(*port);
  return out;
}

std::string Url::request_target() const {
  std::string out = path.empty() ? "/" : path;
  if (!query.empty()) out += "?" + query;
  return out;
}

std::string Url::str_without_fragment() const { return origin() + request_target(); }

std::string Url::str() const {
  std::string out = str_without_fragment();
  if (!fragment.empty()) out += "#" + fragment;
  return out;
}

}  // namespace verif
