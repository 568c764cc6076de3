#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace verif {

/// An absolute URL split into its RFC 3986 components. Scheme and host are lowercased.
struct Url {
  std::string scheme;
  std::string host;
  std::optional<int> port;
  std::string path = "/";
  std::string query;     // without '?'
  std::string fragment;  // without '#'

  /// Parses an absolute URL; nullopt if it is relative or malformed.
  static std::optional<Url> parse(std::string_view text);

  /// Like parse(), but only accepts http and https.
  static std::optional<Url> parse_http(std::string_view text);

  /// Resolves `reference` against this URL (RFC 3986 section 5.2, simplified).
  std::optional<Url> resolve(std::string_view reference) const;

  /// scheme://host[:port]
  std::string origin() const;

  /// path[?query]
  std::string request_target() const;

  std::string str() const;
  std::string str_without_fragment() const;

  bool operator==(const Url&) const = default;
};

/// Removes "." and ".." segments from an absolute path.
std::string remove_dot_segments(std::string_view path);

}  // namespace verif
