#pragma once

// Brute-force reference implementations. They share no code with the library
// beyond plain data types, so agreement is meaningful.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct Doc {
  std::string id;
  std::string text;
  std::vector<std::uint64_t> hashes;
};

struct Hit {
  std::string id;
  double score = 0.0;
  int distance = -1;
};

// ASCII-only: lowercase, punctuation deleted, whitespace-split. The seeded corpus is ASCII.
inline std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::ispunct(c)) {
      cur += static_cast<char>(std::tolower(c));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::map<std::string, double> counts(const std::string& s) {
  std::map<std::string, double> m;
  for (const auto& t : tokens(s)) m[t] += 1.0;
  return m;
}

inline void sort_hits(std::vector<Hit>& hits) {
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
}

/// Full pairwise TF-IDF cosine, scaled to 0..100, keeping scores strictly above threshold.
inline std::vector<Hit> tfidf_search(const std::vector<Doc>& corpus, const std::string& query, double threshold) {
  const double n = static_cast<double>(corpus.size());
  std::vector<std::map<std::string, double>> tf;
  std::map<std::string, double> df;
  for (const auto& d : corpus) {
    tf.push_back(counts(d.text));
    for (const auto& [t, _] : tf.back()) df[t] += 1.0;
  }
  auto idf = [&](const std::string& t) {
    const auto it = df.find(t);
    return std::log((1.0 + n) / (1.0 + (it == df.end() ? 0.0 : it->second))) + 1.0;
  };
  const auto q = counts(query);
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    double dot = 0.0, qq = 0.0, dd = 0.0;
    std::set<std::string> vocab;
    for (const auto& [t, _] : q) vocab.insert(t);
    for (const auto& [t, _] : tf[i]) vocab.insert(t);
    for (const auto& t : vocab) {
      const double a = (q.count(t) ? q.at(t) : 0.0) * idf(t);
      const double b = (tf[i].count(t) ? tf[i].at(t) : 0.0) * idf(t);
      dot += a * b;
      qq += a * a;
      dd += b * b;
    }
    if (qq == 0.0 || dd == 0.0) continue;
    const double score = 100.0 * dot / (std::sqrt(qq) * std::sqrt(dd));
    if (score > threshold) hits.push_back({corpus[i].id, score, -1});
  }
  sort_hits(hits);
  return hits;
}

inline int hamming(std::uint64_t a, std::uint64_t b) { return std::popcount(a ^ b); }

/// Linear scan over every stored hash.
inline std::vector<Hit> hamming_search(const std::vector<Doc>& corpus, std::uint64_t hash, int max_distance) {
  std::vector<Hit> hits;
  for (const auto& d : corpus) {
    int best = 65;
    for (auto h : d.hashes) best = std::min(best, hamming(h, hash));
    if (best <= max_distance) hits.push_back({d.id, 100.0 * (1.0 - best / 64.0), best});
  }
  sort_hits(hits);
  return hits;
}

}  // namespace oracle
