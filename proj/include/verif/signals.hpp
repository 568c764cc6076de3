#pragma once

// Credibility signals: the label registry, the provider contract, validation of
// provider output, and the derived views (top frames, highlights, gauges).

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "verif/error.hpp"
#include "verif/segmenter.hpp"

namespace verif {

enum class SignalKind { framing, genre, persuasion, subjectivity, mgt };

inline constexpr std::array kSignalKinds = {SignalKind::framing, SignalKind::genre, SignalKind::persuasion,
                                            SignalKind::subjectivity, SignalKind::mgt};

std::string_view to_string(SignalKind kind);
std::optional<SignalKind> signal_kind_from_string(std::string_view name);

class SignalError : public Error {
 public:
  enum class Kind { timeout, protocol, bad_label, unsupported_language, unavailable };

  SignalError(Kind kind, SignalKind signal, const std::string& message)
      : Error(message), kind_(kind), signal_(signal) {}

  Kind kind() const { return kind_; }
  SignalKind signal() const { return signal_; }

 private:
  Kind kind_;
  SignalKind signal_;
};

std::string_view to_string(SignalError::Kind kind);

/// The closed label vocabulary of each signal, plus the persuasion technique groups.
class LabelRegistry {
 public:
  static const LabelRegistry& defaults();

  /// {"framing": [...], "genre": [...], "persuasion": {"Label": "group", ...}, ...}
  /// Kinds missing from the document keep their defaults.
  static LabelRegistry from_json(const nlohmann::json& doc);

  const std::vector<std::string>& labels(SignalKind kind) const;
  bool contains(SignalKind kind, std::string_view label) const;
  std::optional<std::string> persuasion_group(std::string_view technique) const;

  void set_labels(SignalKind kind, std::vector<std::string> labels);
  void set_persuasion_group(const std::string& technique, const std::string& group);

  static const std::vector<std::string>& persuasion_groups();

 private:
  std::map<SignalKind, std::vector<std::string>> labels_;
  std::map<std::string, std::string, std::less<>> groups_;
};

struct SignalAnnotation {
  SignalKind kind = SignalKind::framing;
  std::string label;
  std::size_t sentence_index = 0;
  double confidence = 0.0;

  bool operator==(const SignalAnnotation&) const = default;
};

struct DocumentSignalResult {
  SignalKind kind = SignalKind::framing;
  std::map<std::string, double> doc_scores;
  std::vector<SignalAnnotation> annotations;
  std::map<std::size_t, double> importance;  // max is exactly 1 when non-empty
  std::vector<std::size_t> sentence_lengths;  // codepoints, one per sentence

  std::size_t sentence_count() const { return sentence_lengths.size(); }
  bool operator==(const DocumentSignalResult&) const = default;
};

/// What a provider (remote or baseline) is asked to analyze.
struct SignalRequest {
  SignalKind kind = SignalKind::framing;
  std::string text;
  std::vector<SentenceSpan> sentences;
  std::string language = "en";
};

struct RawAnnotation {
  std::string label;
  std::size_t sentence_index = 0;
  double confidence = 0.0;

  bool operator==(const RawAnnotation&) const = default;
};

/// Provider output before registry validation; mirrors the wire response.
struct ProviderResponse {
  std::map<std::string, double> doc_scores;
  std::vector<RawAnnotation> annotations;
  std::map<std::size_t, double> importance;

  bool operator==(const ProviderResponse&) const = default;
};

class SignalProvider {
 public:
  virtual ~SignalProvider() = default;
  /// May throw SignalError; any other exception is treated as the provider being unavailable.
  virtual ProviderResponse analyze(const SignalRequest& request) const = 0;
};

// Wire format shared by remote providers and the HTTP API.
nlohmann::json to_json(const SignalRequest& request);
nlohmann::json to_json(const ProviderResponse& response);
/// Throws SignalError(protocol) for anything that does not match the response schema.
ProviderResponse provider_response_from_json(const nlohmann::json& j, SignalKind kind);
SignalRequest signal_request_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DocumentSignalResult& result);

/// Runs the provider and validates its output against the registry: unknown labels are
/// SignalError(bad_label), out-of-range sentence indices or non-finite numbers are
/// SignalError(protocol). Confidences are clamped to [0, 1] and importance is rescaled
/// so its maximum is 1. Empty text short-circuits to an empty result.
DocumentSignalResult classify(SignalKind kind, std::string_view text, const std::vector<SentenceSpan>& sentences,
                              const SignalProvider& provider, const LabelRegistry& registry = LabelRegistry::defaults(),
                              std::string_view language = "en");

/// Labels with confidence strictly above the threshold, descending, ties in label order.
std::vector<std::pair<std::string, double>> top_frames(const DocumentSignalResult& result, double threshold = 0.8);

/// Sentences to highlight at a slider position. Framing and genre use importance;
/// the per-sentence signals use annotation confidence, optionally restricted to one label.
std::set<std::size_t> filter_highlights(const DocumentSignalResult& result, double slider,
                                        std::optional<std::string_view> selected_label = std::nullopt);

/// Ordered bands: a value takes the label of the first band whose upper bound it is below.
struct GaugeBands {
  struct Band {
    double upper;
    std::string label;
  };
  std::vector<Band> bands;
  std::string top_label;

  const std::string& classify(double value) const;

  static const GaugeBands& subjectivity_defaults();
  /// Probability bands, applied to per-sentence p and to percentage / 100.
  static const GaugeBands& mgt_defaults();
};

struct GaugeResult {
  double percentage = 0.0;
  std::string level;
  std::map<std::size_t, std::string> per_sentence;
  /// Unweighted share of sentences (MGT only; the headline percentage is length-weighted).
  std::optional<double> sentence_percentage;
};

nlohmann::json to_json(const GaugeResult& gauge);

GaugeResult subjectivity_gauge(const DocumentSignalResult& result, double sentence_threshold = 0.5,
                               const GaugeBands& bands = GaugeBands::subjectivity_defaults());

GaugeResult mgt_gauge(const DocumentSignalResult& result, const GaugeBands& bands = GaugeBands::mgt_defaults());

}  // namespace verif
