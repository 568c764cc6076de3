#include "verif/text.hpp"

#include <algorithm>

namespace verif::text {

std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      extra = 1;
      cp = b0 & 0x1F;
      min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2;
      cp = b0 & 0x0F;
      min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3;
      cp = b0 & 0x07;
      min = 0x10000;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(extra) >= n) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(bytes[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

std::size_t codepoint_length(std::string_view bytes) { return decode_utf8(bytes).size(); }

std::string codepoint_substr(std::string_view bytes, std::size_t start, std::size_t end) {
  const auto cps = decode_utf8(bytes);
  if (start >= cps.size() || start >= end) return {};
  end = std::min(end, cps.size());
  return encode_utf8(std::u32string_view(cps).substr(start, end - start));
}

std::string truncate_codepoints(std::string_view bytes, std::size_t n) {
  const auto cps = decode_utf8(bytes);
  if (cps.size() <= n) return encode_utf8(cps);
  return encode_utf8(std::u32string_view(cps).substr(0, n));
}

bool is_space(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\f':
    case U'\v':
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
    case 0xFEFF:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200B;
  }
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  if (cp >= 0xA1 && cp <= 0xBF) return cp != 0xAA && cp != 0xB5 && cp != 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return true;
  if (cp >= 0x2010 && cp <= 0x205E) return true;       // general punctuation
  if (cp >= 0x20A0 && cp <= 0x2BFF) return true;       // currency, arrows, symbols
  if (cp >= 0x3001 && cp <= 0x303F) return true;       // CJK punctuation
  if (cp >= 0xFF01 && cp <= 0xFF0F) return true;       // fullwidth ASCII punct
  if (cp >= 0xFF1A && cp <= 0xFF20) return true;
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return true;     // emoji and pictographs
  if (cp == 0x55D || cp == 0x60C || cp == 0x61F || cp == 0x6D4) return true;
  return cp == 0xFFFD;
}

bool is_word_char(char32_t cp) {
  if (cp < 0x20 || cp == 0x7F) return false;
  return !is_space(cp) && !is_punct(cp);
}

char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if (cp < 0x80) return cp;
  if ((cp >= 0xC0 && cp <= 0xDE) && cp != 0xD7) return cp + 32;
  if (cp >= 0x100 && cp <= 0x17F) {
    // Latin Extended-A alternates upper/lower, with a few exceptions around 0x138 and 0x178.
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp == 0x130 || cp == 0x138 || cp == 0x149 || cp == 0x178 || cp == 0x17F) return cp;
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;  // Greek
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;                  // Cyrillic
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  if (cp >= 0x460 && cp <= 0x4FF) return (cp % 2 == 0) ? cp + 1 : cp;
  return cp;
}

std::u32string to_lower(std::u32string_view cps) {
  std::u32string out(cps);
  for (auto& cp : out) cp = to_lower(cp);
  return out;
}

std::string to_lower_utf8(std::string_view bytes) { return encode_utf8(to_lower(decode_utf8(bytes))); }

std::string normalize_whitespace(std::string_view bytes) {
  const auto cps = decode_utf8(bytes);
  std::string out;
  out.reserve(bytes.size());
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    append_utf8(out, cp);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view bytes) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : decode_utf8(bytes)) {
    if (is_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (is_punct(cp) || cp < 0x20 || cp == 0x7F) continue;
    append_utf8(current, to_lower(cp));
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<WordToken> word_tokens(std::u32string_view cps) {
  std::vector<WordToken> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_word_char(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && is_word_char(cps[j])) ++j;
    out.push_back({std::u32string(cps.substr(i, j - i)), i, j});
    i = j;
  }
  return out;
}

}  // namespace verif::text
