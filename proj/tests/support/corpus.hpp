#pragma once

// Reads the shipped claim seed into oracle documents without going through the library parser.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/oracles.hpp"
#include "support/paths.hpp"

namespace testing_support {

inline std::vector<oracle::Doc> seed_corpus() {
  std::vector<oracle::Doc> docs;
  std::ifstream in(source_path("data/claims.jsonl"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    oracle::Doc d{j.at("id").get<std::string>(), j.at("claim_text").get<std::string>(), {}};
    for (const auto& h : j.at("image_hashes")) d.hashes.push_back(std::stoull(h.get<std::string>(), nullptr, 16));
    docs.push_back(std::move(d));
  }
  return docs;
}

/// The acceptance query and the record engineered to score at or below 40 against it.
inline const std::string kMicrochipQuery = "Vaccines contain microchips that track people through 5G networks";
inline const std::string kLowScoringRecord = "dbk-026";

}  // namespace testing_support
