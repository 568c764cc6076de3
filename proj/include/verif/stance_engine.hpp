#pragma once

// Stance of video comments towards the video title, and of replies towards their parent comment.

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "verif/error.hpp"
#include "verif/signal_providers.hpp"
#include "verif/url.hpp"

namespace verif {

class StanceError : public Error {
 public:
  enum class Kind { fetch, provider };

  StanceError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Top-level comments use question, replies use query; the two vocabularies otherwise match.
enum class StanceLabel { support, deny, question, query, comment };

std::string_view to_string(StanceLabel label);
bool valid_for_depth(StanceLabel label, bool is_reply);

struct Reply {
  std::string id;
  std::string author_handle;
  std::string text;
};

struct Comment {
  std::string id;
  std::string author_handle;
  std::string text;
  std::vector<Reply> replies;
};

struct CommentThread {
  static constexpr std::size_t kMaxComments = 10;

  std::string video_title;
  std::vector<Comment> comments;
};

/// Parses the fixture / wire shape {video_title, comments: [{id, author_handle, text, replies: [...]}]}.
/// Keeps the first kMaxComments comments. Throws ValidationError on a malformed document.
CommentThread comment_thread_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CommentThread& thread);

/// All but the first character replaced by '*'.
std::string mask_handle(std::string_view handle);

struct StancedReply {
  Reply reply;
  StanceLabel label = StanceLabel::comment;
  std::optional<std::string> error;
};

struct StancedComment {
  Comment comment;  // replies are carried in `replies` below
  StanceLabel label = StanceLabel::comment;
  std::optional<std::string> error;
  std::vector<StancedReply> replies;
};

struct StancedThread {
  std::string video_title;
  std::vector<StancedComment> comments;

  std::size_t label_count() const;
};

/// Author handles are emitted masked; the raw handle never leaves the service.
nlohmann::json to_json(const StancedThread& thread);

class VideoClient {
 public:
  virtual ~VideoClient() = default;
  /// Title plus comments in the platform's ranking. Throws StanceError(fetch).
  virtual CommentThread fetch(const Url& video_url) const = 0;
};

/// Reads a CommentThread JSON file. With a directory, `<dir>/<video id>.json` is tried
/// before `<dir>/default.json`.
class FixtureVideoClient final : public VideoClient {
 public:
  explicit FixtureVideoClient(std::string path);
  CommentThread fetch(const Url& video_url) const override;

 private:
  std::string path_;
};

/// YouTube Data API v3 style: GET {base}/videos and {base}/commentThreads with the key from an env var.
class HttpVideoClient final : public VideoClient {
 public:
  HttpVideoClient(std::string base_url, std::string api_key_env, std::chrono::milliseconds timeout);
  CommentThread fetch(const Url& video_url) const override;

 private:
  nlohmann::json get(const std::string& path_and_query) const;

  std::string base_url_;
  std::string api_key_env_;
  std::chrono::milliseconds timeout_;
};

/// Classifies one item against its target. Returns one of support, deny, question, query, comment.
class StanceProvider {
 public:
  virtual ~StanceProvider() = default;
  virtual std::string classify(std::string_view target, std::string_view item) const = 0;
};

/// Cue lexicons and interrogative detection: deny > support > question > comment.
class BaselineStanceProvider final : public StanceProvider {
 public:
  explicit BaselineStanceProvider(const nlohmann::json& lexicon);
  static std::unique_ptr<BaselineStanceProvider> load(const std::string& path);

  std::string classify(std::string_view target, std::string_view item) const override;

 private:
  std::vector<LexiconPhrase> deny_;
  std::vector<LexiconPhrase> support_;
  std::vector<std::u32string> wh_words_;
};

/// POSTs {target, item} to a remote classifier and expects {label}.
class RemoteStanceProvider final : public StanceProvider {
 public:
  RemoteStanceProvider(Url endpoint, std::chrono::milliseconds timeout);
  std::string classify(std::string_view target, std::string_view item) const override;

 private:
  Url endpoint_;
  std::chrono::milliseconds timeout_;
};

/// Checks the URL is a video-platform page, then fetches and truncates.
CommentThread fetch_thread(const Url& video_url, const VideoClient& client);

/// Maps provider output into the depth's vocabulary. Provider failures and unknown
/// labels degrade to comment with an error note.
StanceLabel classify_stance(std::string_view target, std::string_view item, bool is_reply,
                            const StanceProvider& provider, std::string* error = nullptr);

StancedThread classify_thread(const CommentThread& thread, const StanceProvider& provider);

}  // namespace verif
