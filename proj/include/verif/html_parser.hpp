#pragma once

// A forgiving HTML tree builder. It does not implement the full HTML5 tree
// construction algorithm; it handles the cases that matter for article text:
// void elements, raw-text elements, implicit </p> and </li>, stray end tags,
// comments and character references.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace verif::html {

struct Node {
  enum class Kind { element, text };

  Kind kind = Kind::element;
  std::string tag;  // lowercase; "#document" for the root
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // decoded, for text nodes
  std::vector<Node> children;
  std::size_t source_begin = 0;
  std::size_t source_end = 0;

  bool is_element(std::string_view name) const { return kind == Kind::element && tag == name; }
  const std::string* attribute(std::string_view name) const;
};

Node parse(std::string_view html);

/// Decodes numeric and common named character references.
std::string decode_entities(std::string_view text);

bool is_void_element(std::string_view tag);
bool is_block_element(std::string_view tag);

}  // namespace verif::html
