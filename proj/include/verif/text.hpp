#pragma once

// UTF-8 helpers. Every offset exposed on the wire is a codepoint offset.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace verif::text {

/// Decodes UTF-8; invalid sequences become U+FFFD, one per offending byte.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

std::size_t codepoint_length(std::string_view bytes);

/// Codepoint substring [start, end) of a UTF-8 string.
std::string codepoint_substr(std::string_view bytes, std::size_t start, std::size_t end);

/// First `n` codepoints of a UTF-8 string.
std::string truncate_codepoints(std::string_view bytes, std::size_t n);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool is_word_char(char32_t cp);

/// Simple case folding for Latin, Latin-1, Greek and Cyrillic letters.
char32_t to_lower(char32_t cp);
std::u32string to_lower(std::u32string_view cps);
std::string to_lower_utf8(std::string_view bytes);

/// Collapses whitespace runs into single spaces and trims both ends.
std::string normalize_whitespace(std::string_view bytes);

/// Lowercased, punctuation-stripped, whitespace-split tokens.
std::vector<std::string> tokenize(std::string_view bytes);

/// A word with its codepoint offsets in the source text.
struct WordToken {
  std::u32string text;
  std::size_t start = 0;
  std::size_t end = 0;
};

/// Maximal runs of word characters: anything that is not whitespace, punctuation or a control.
std::vector<WordToken> word_tokens(std::u32string_view cps);

}  // namespace verif::text
