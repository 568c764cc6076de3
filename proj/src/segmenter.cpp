#include "verif/segmenter.hpp"

#include <fstream>
#include <functional>
#include <json.hpp>

#include "verif/error.hpp"
#include "verif/text.hpp"

namespace verif {
namespace {

std::string primary_subtag(std::string_view tag) {
  const auto dash = tag.find_first_of("-_");
  return text::to_lower_utf8(tag.substr(0, dash));
}

bool is_terminal(char32_t cp) {
  switch (cp) {
    case U'.':
    case U'!':
    case U'?':
    case 0x2026:  // …
    case 0x3002:  // 。
    case 0xFF01:  // ！
    case 0xFF1F:  // ？
    case 0x061F:  // ؟
    case 0x0964:  // ।
      return true;
    default:
      return false;
  }
}

bool is_closer(char32_t cp) {
  switch (cp) {
    case U'"':
    case U'\'':
    case U')':
    case U']':
    case U'}':
    case 0x2019:
    case 0x201D:
    case 0xBB:
    case 0x300D:
    case 0x300F:
      return true;
    default:
      return false;
  }
}

bool is_opener(char32_t cp) {
  switch (cp) {
    case U'"':
    case U'\'':
    case U'(':
    case U'[':
    case U'{':
    case 0x2018:
    case 0x201C:
    case 0xAB:
      return true;
    default:
      return false;
  }
}

bool is_letter(char32_t cp) { return text::is_word_char(cp) && !(cp >= U'0' && cp <= U'9'); }

// CJK full stops end a sentence even without trailing whitespace.
bool ends_without_space(char32_t cp) { return cp == 0x3002 || cp == 0xFF01 || cp == 0xFF1F; }

}  // namespace

const AbbreviationTable& AbbreviationTable::defaults() {
  static const AbbreviationTable table = [] {
    AbbreviationTable t;
    const std::map<std::string, std::vector<std::string>> lists = {
        {"en",
         {"mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "e.g", "i.e", "cf", "inc", "ltd", "co",
          "corp", "gen", "col", "lt", "sgt", "capt", "gov", "sen", "rev", "fig", "vol", "pp",
          "approx", "dept", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct",
          "nov", "dec", "u.s", "u.k", "u.n", "a.m", "p.m", "mt", "ft", "ave", "blvd", "hon"}},
        {"de",
         {"dr", "prof", "z.b", "bzw", "nr", "str", "ca", "vgl", "hr", "fr", "d.h", "u.a", "evtl", "ggf",
          "inkl", "bspw", "jh", "mio", "mrd", "s", "sog"}},
        {"fr", {"m", "mm", "mme", "mlle", "dr", "pr", "p.ex", "cf", "env", "av", "bd", "st", "ste", "mgr"}},
        {"es", {"sr", "sra", "srta", "dr", "dra", "ud", "uds", "p.ej", "av", "avda", "pág", "núm", "lic"}},
        {"it", {"sig", "sigg", "dott", "prof", "ing", "avv", "ecc", "pag", "es"}},
        {"pt", {"sr", "sra", "dr", "dra", "prof", "av", "pág", "ex"}},
    };
    for (const auto& [lang, abbrs] : lists)
      for (const auto& a : abbrs) t.add(lang, a);
    return t;
  }();
  return table;
}

AbbreviationTable AbbreviationTable::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open abbreviation file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid abbreviation file " + path + ": " + e.what());
  }
  AbbreviationTable t;
  for (const auto& [lang, list] : doc.items())
    for (const auto& a : list) t.add(lang, a.get<std::string>());
  return t;
}

void AbbreviationTable::add(const std::string& language, std::string abbreviation) {
  if (!abbreviation.empty() && abbreviation.back() == '.') abbreviation.pop_back();
  by_language_[primary_subtag(language)].insert(text::to_lower(text::decode_utf8(abbreviation)));
}

bool AbbreviationTable::contains(std::string_view language, std::u32string_view lowered) const {
  const auto it = by_language_.find(primary_subtag(language));
  if (it == by_language_.end()) return false;
  return it->second.count(std::u32string(lowered)) > 0;
}

std::vector<SentenceSpan> segment(std::string_view text_utf8, std::optional<std::string_view> language,
                                  const AbbreviationTable& abbreviations) {
  const auto cps = text::decode_utf8(text_utf8);
  const std::string_view lang = language.value_or("en");
  std::vector<SentenceSpan> spans;

  const std::size_t n = cps.size();
  std::size_t start = 0;
  auto emit = [&](std::size_t from, std::size_t to) {
    while (from < to && text::is_space(cps[from])) ++from;
    while (to > from && text::is_space(cps[to - 1])) --to;
    if (from < to) spans.push_back({from, to, spans.size()});
  };

  // A single letter and a dot is an initial only when a name follows: a capitalised word,
  // or another initial that itself continues ("J. R. R. Tolkien", but not "A. B.").
  std::function<bool(std::size_t)> initial_continues = [&](std::size_t dot) {
    std::size_t k = dot + 1;
    while (k < n && text::is_space(cps[k])) ++k;
    std::size_t e = k;
    while (e < n && !text::is_space(cps[e])) ++e;
    if (k == e || !is_letter(cps[k]) || text::to_lower(cps[k]) == cps[k]) return false;
    if (e - k == 2 && cps[k + 1] == U'.') return initial_continues(k + 1);
    return e - k >= 2 && is_letter(cps[k + 1]);
  };

  // True if the '.' at `dot` ends a known abbreviation or a single-letter initial.
  auto guarded = [&](std::size_t dot) {
    std::size_t b = dot;
    while (b > start && !text::is_space(cps[b - 1])) --b;
    while (b < dot && is_opener(cps[b])) ++b;
    if (b == dot) return false;
    const auto word = text::to_lower(std::u32string_view(cps).substr(b, dot - b));
    if (word.size() == 1 && is_letter(word[0])) return initial_continues(dot);
    return abbreviations.contains(lang, word);
  };

  std::size_t i = 0;
  while (i < n) {
    const char32_t cp = cps[i];

    // A blank line is a paragraph break and always ends a sentence.
    if (cp == U'\n') {
      std::size_t j = i + 1;
      int newlines = 1;
      while (j < n && text::is_space(cps[j])) {
        if (cps[j] == U'\n') ++newlines;
        ++j;
      }
      if (newlines >= 2) {
        emit(start, i);
        start = j;
      }
      i = j;
      continue;
    }

    if (!is_terminal(cp)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && (is_terminal(cps[j]) || is_closer(cps[j]))) ++j;
    const bool boundary = j == n || text::is_space(cps[j]) || ends_without_space(cps[j - 1]);
    if (!boundary) {
      i = j;
      continue;
    }
    if (cp == U'.' && j == i + 1 && guarded(i)) {
      i = j;
      continue;
    }
    emit(start, j);
    start = j;
    i = j;
  }
  emit(start, n);
  return spans;
}

bool spans_valid(const std::vector<SentenceSpan>& spans, std::size_t text_length) {
  std::size_t prev_end = 0;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto& s = spans[k];
    if (s.index != k || s.start >= s.end || s.end > text_length) return false;
    if (k > 0 && s.start < prev_end) return false;
    prev_end = s.end;
  }
  return true;
}

}  // namespace verif
