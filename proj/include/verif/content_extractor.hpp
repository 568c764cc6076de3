#pragma once

// Turning a submission into article text, sentence spans, media and links.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verif/segmenter.hpp"
#include "verif/url.hpp"

namespace verif {

enum class SubmissionKind { url, raw_html, plain_text, media_upload };

std::string_view to_string(SubmissionKind kind);
std::optional<SubmissionKind> submission_kind_from_string(std::string_view name);

struct Submission {
  SubmissionKind kind = SubmissionKind::plain_text;
  std::string value;  // URL, HTML, text, or raw media bytes
  std::optional<std::string> declared_language;

  /// Throws ValidationError if the payload is missing or a url is not absolute http(s).
  void validate() const;
};

enum class MediaType { image, video };

std::string_view to_string(MediaType type);

struct MediaRef {
  std::string url;
  MediaType media_type = MediaType::image;
  std::optional<std::string> alt_text;
  /// Pre-order index of the element in the parsed document.
  std::size_t document_position = 0;
  /// Codepoint offset in the extracted text at which the media appeared.
  std::size_t text_offset = 0;

  bool operator==(const MediaRef&) const = default;
};

struct ExtractedContent {
  std::string text;
  std::vector<SentenceSpan> sentences;
  std::vector<MediaRef> images;
  std::vector<MediaRef> videos;
  std::vector<std::string> links;
  std::optional<std::string> source_url;
  std::optional<std::string> title;

  bool operator==(const ExtractedContent&) const = default;
};

struct ExtractOptions {
  /// Text runs whose visible-text / markup ratio is not above this are dropped as boilerplate.
  double density_threshold = 0.25;
  std::optional<std::string> language;
};

ExtractedContent extract(std::string_view html, const std::optional<Url>& base_url = std::nullopt,
                         const ExtractOptions& options = {});

/// Plain text skips HTML handling entirely; only segmentation runs.
ExtractedContent from_plain_text(std::string_view text, std::optional<std::string_view> language = std::nullopt);

enum class SubmissionClass { webpage, video_platform, direct_media };

std::string_view to_string(SubmissionClass cls);

struct VideoPlatformRule {
  std::string host;         // matched against the host with "www."/"m." removed
  std::string path_pattern; // ECMAScript regex matched against path[?query]
};

struct SubmissionRules {
  std::vector<VideoPlatformRule> video_platforms;
  std::vector<std::string> media_extensions;  // lowercase, without dot

  static SubmissionRules defaults();
};

SubmissionClass classify_submission(const Url& url, const SubmissionRules& rules = SubmissionRules::defaults());

/// Extracts the video id from a video-platform URL, if the URL names one.
std::optional<std::string> video_id(const Url& url);

}  // namespace verif
