#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace verif {

/// A sentence as a half-open codepoint range [start, end) into its text.
struct SentenceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t index = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const SentenceSpan&) const = default;
};

/// Lowercased abbreviations (without the trailing period) per language tag.
/// Lookups use the primary subtag, so "en-GB" falls back to "en".
class AbbreviationTable {
 public:
  static const AbbreviationTable& defaults();
  static AbbreviationTable from_json_file(const std::string& path);

  void add(const std::string& language, std::string abbreviation);
  bool contains(std::string_view language, std::u32string_view lowered) const;

 private:
  std::map<std::string, std::set<std::u32string>, std::less<>> by_language_;
};

/// Rule-based sentence segmentation on terminal punctuation with an abbreviation guard.
/// Spans exclude surrounding whitespace and cover every non-whitespace codepoint.
std::vector<SentenceSpan> segment(std::string_view text, std::optional<std::string_view> language = std::nullopt,
                                  const AbbreviationTable& abbreviations = AbbreviationTable::defaults());

/// True if the spans are sorted, non-overlapping, non-empty, indexed 0..n-1 and inside [0, length).
bool spans_valid(const std::vector<SentenceSpan>& spans, std::size_t text_length);

}  // namespace verif
