#pragma once

// Concrete signal providers: the offline lexicon baselines and the HTTP wire client.

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "verif/signals.hpp"
#include "verif/url.hpp"

namespace verif {

/// A lexicon phrase, pre-tokenized, with the weight it contributes when matched.
struct LexiconPhrase {
  std::vector<std::u32string> tokens;
  double weight = 1.0;
};

/// Shared plumbing of the baselines: language gating and phrase matching.
class BaselineProvider : public SignalProvider {
 public:
  BaselineProvider(SignalKind kind, const nlohmann::json& lexicon);

  SignalKind kind() const { return kind_; }
  bool supports(std::string_view language) const;

 protected:
  void require_language(const SignalRequest& request) const;

  static std::vector<LexiconPhrase> phrases(const nlohmann::json& list);
  /// Lowercased word tokens of one sentence.
  static std::vector<std::u32string> sentence_tokens(const std::u32string& text, const SentenceSpan& span);
  /// Number of occurrences of `phrase` in `tokens`.
  static std::size_t count(const std::vector<std::u32string>& tokens, const LexiconPhrase& phrase);

 private:
  SignalKind kind_;
  std::vector<std::string> languages_;
};

/// Subjective cue tokens per sentence token, through a fixed logistic.
class SubjectivityBaseline final : public BaselineProvider {
 public:
  explicit SubjectivityBaseline(const nlohmann::json& lexicon);
  ProviderResponse analyze(const SignalRequest& request) const override;

  /// Per-sentence probability for a given cue ratio.
  double probability(double cue_ratio) const;

 private:
  std::vector<LexiconPhrase> cues_;
  double slope_;
  double midpoint_;
  double emit_floor_;
};

/// Keyword lists per frame. Doc score = hits / (hits + saturation); importance = per-sentence hit density.
class FramingBaseline final : public BaselineProvider {
 public:
  explicit FramingBaseline(const nlohmann::json& lexicon);
  ProviderResponse analyze(const SignalRequest& request) const override;

 private:
  std::map<std::string, std::vector<LexiconPhrase>> frames_;
  double saturation_;
};

/// Rule-based genre from first-person, exclamation, quote and satire-cue rates.
class GenreBaseline final : public BaselineProvider {
 public:
  explicit GenreBaseline(const nlohmann::json& lexicon);
  ProviderResponse analyze(const SignalRequest& request) const override;

 private:
  std::vector<LexiconPhrase> first_person_;
  std::vector<LexiconPhrase> opinion_cues_;
  std::vector<LexiconPhrase> satire_cues_;
  nlohmann::json rules_;
};

/// Pattern lexicon per persuasion technique; annotation confidence is the strongest matching pattern.
class PersuasionBaseline final : public BaselineProvider {
 public:
  explicit PersuasionBaseline(const nlohmann::json& lexicon);
  ProviderResponse analyze(const SignalRequest& request) const override;

 private:
  std::map<std::string, std::vector<LexiconPhrase>> techniques_;
  double repetition_min_;
};

/// Burstiness heuristic: uniform sentence lengths and a low type-token ratio raise p.
class MgtBaseline final : public BaselineProvider {
 public:
  explicit MgtBaseline(const nlohmann::json& lexicon);
  ProviderResponse analyze(const SignalRequest& request) const override;

 private:
  double bias_;
  double uniformity_weight_;
  double ttr_weight_;
  double deviation_weight_;
  std::size_t window_;
};

/// Loads `<lexicon_dir>/<kind>.json` and builds the matching baseline.
std::unique_ptr<BaselineProvider> make_baseline_provider(SignalKind kind, const std::string& lexicon_dir);

/// Sends the wire request as JSON to a remote endpoint. Non-2xx replies with
/// {"error": "unsupported_language"} map to that error; other failures are unavailable.
class RemoteSignalProvider final : public SignalProvider {
 public:
  RemoteSignalProvider(SignalKind kind, Url endpoint, std::chrono::milliseconds timeout);
  ProviderResponse analyze(const SignalRequest& request) const override;

 private:
  SignalKind kind_;
  Url endpoint_;
  std::chrono::milliseconds timeout_;
};

}  // namespace verif
