#include "verif/stance_engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <httplib.h>

#include "verif/content_extractor.hpp"
#include "verif/text.hpp"

namespace verif {
namespace {

std::string string_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  if (!j.at(key).is_string()) throw ValidationError(std::string("comment field must be a string: ") + key);
  return j.at(key).get<std::string>();
}

nlohmann::json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StanceError(StanceError::Kind::fetch, "cannot open comment fixture: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw StanceError(StanceError::Kind::fetch, path + ": " + e.what());
  }
}

std::vector<std::u32string> lowered_words(std::string_view s) {
  std::vector<std::u32string> out;
  for (auto& w : text::word_tokens(text::decode_utf8(s))) out.push_back(text::to_lower(w.text));
  return out;
}

bool contains_phrase(const std::vector<std::u32string>& tokens, const std::vector<LexiconPhrase>& phrases) {
  for (const auto& p : phrases) {
    if (p.tokens.empty() || p.tokens.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + p.tokens.size() <= tokens.size(); ++i)
      if (std::equal(p.tokens.begin(), p.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) return true;
  }
  return false;
}

std::vector<LexiconPhrase> to_phrases(const nlohmann::json& list) {
  std::vector<LexiconPhrase> out;
  for (const auto& item : list) {
    LexiconPhrase p;
    for (auto& w : text::word_tokens(text::decode_utf8(item.get<std::string>()))) p.tokens.push_back(text::to_lower(w.text));
    if (!p.tokens.empty()) out.push_back(std::move(p));
  }
  return out;
}

nlohmann::json reply_json(const Reply& r) {
  return {{"id", r.id}, {"author_handle", r.author_handle}, {"text", r.text}};
}

}  // namespace

std::string_view to_string(StanceLabel label) {
  switch (label) {
    case StanceLabel::support: return "support";
    case StanceLabel::deny: return "deny";
    case StanceLabel::question: return "question";
    case StanceLabel::query: return "query";
    case StanceLabel::comment: return "comment";
  }
  return "comment";
}

bool valid_for_depth(StanceLabel label, bool is_reply) {
  if (label == StanceLabel::question) return !is_reply;
  if (label == StanceLabel::query) return is_reply;
  return true;
}

CommentThread comment_thread_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("comment thread must be a JSON object");
  CommentThread t;
  t.video_title = string_field(j, "video_title");
  if (!j.contains("comments")) return t;
  if (!j.at("comments").is_array()) throw ValidationError("comments must be an array");
  for (const auto& c : j.at("comments")) {
    if (t.comments.size() == CommentThread::kMaxComments) break;
    if (!c.is_object()) throw ValidationError("comment must be a JSON object");
    Comment comment{string_field(c, "id"), string_field(c, "author_handle"), string_field(c, "text"), {}};
    if (c.contains("replies")) {
      if (!c.at("replies").is_array()) throw ValidationError("replies must be an array");
      for (const auto& r : c.at("replies")) {
        if (!r.is_object()) throw ValidationError("reply must be a JSON object");
        comment.replies.push_back({string_field(r, "id"), string_field(r, "author_handle"), string_field(r, "text")});
      }
    }
    t.comments.push_back(std::move(comment));
  }
  return t;
}

nlohmann::json to_json(const CommentThread& t) {
  nlohmann::json comments = nlohmann::json::array();
  for (const auto& c : t.comments) {
    nlohmann::json replies = nlohmann::json::array();
    for (const auto& r : c.replies) replies.push_back(reply_json(r));
    comments.push_back({{"id", c.id}, {"author_handle", c.author_handle}, {"text", c.text}, {"replies", replies}});
  }
  return {{"video_title", t.video_title}, {"comments", comments}};
}

std::string mask_handle(std::string_view handle) {
  const auto cps = text::decode_utf8(handle);
  if (cps.empty()) return {};
  std::u32string masked(1, cps.front());
  masked.append(cps.size() - 1, U'*');
  return text::encode_utf8(masked);
}

std::size_t StancedThread::label_count() const {
  std::size_t n = comments.size();
  for (const auto& c : comments) n += c.replies.size();
  return n;
}

nlohmann::json to_json(const StancedThread& t) {
  nlohmann::json comments = nlohmann::json::array();
  for (const auto& c : t.comments) {
    nlohmann::json replies = nlohmann::json::array();
    for (const auto& r : c.replies) {
      nlohmann::json rj = {{"id", r.reply.id},
                           {"author", mask_handle(r.reply.author_handle)},
                           {"text", r.reply.text},
                           {"label", to_string(r.label)}};
      if (r.error) rj["error"] = *r.error;
      replies.push_back(std::move(rj));
    }
    nlohmann::json cj = {{"id", c.comment.id},
                         {"author", mask_handle(c.comment.author_handle)},
                         {"text", c.comment.text},
                         {"label", to_string(c.label)},
                         {"replies", replies}};
    if (c.error) cj["error"] = *c.error;
    comments.push_back(std::move(cj));
  }
  return {{"video_title", t.video_title}, {"comments", comments}};
}

// --- clients ------------------------------------------------------------------

FixtureVideoClient::FixtureVideoClient(std::string path) : path_(std::move(path)) {}

CommentThread FixtureVideoClient::fetch(const Url& video_url) const {
  std::string file = path_;
  std::error_code ec;
  if (std::filesystem::is_directory(path_, ec)) {
    file = path_ + "/default.json";
    if (const auto id = video_id(video_url)) {
      const auto candidate = path_ + "/" + *id + ".json";
      if (std::filesystem::exists(candidate, ec)) file = candidate;
    }
  }
  try {
    return comment_thread_from_json(read_file(file));
  } catch (const ValidationError& e) {
    throw StanceError(StanceError::Kind::fetch, file + ": " + e.what());
  }
}

HttpVideoClient::HttpVideoClient(std::string base_url, std::string api_key_env, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), api_key_env_(std::move(api_key_env)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

nlohmann::json HttpVideoClient::get(const std::string& path_and_query) const {
  const auto url = Url::parse_http(base_url_ + path_and_query);
  if (!url) throw StanceError(StanceError::Kind::fetch, "bad video API base URL: " + base_url_);
  httplib::Client client(url->origin());
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  auto res = client.Get(url->request_target());
  if (!res) throw StanceError(StanceError::Kind::fetch, "video API request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw StanceError(StanceError::Kind::fetch, "video API returned HTTP " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw StanceError(StanceError::Kind::fetch, std::string("video API returned invalid JSON: ") + e.what());
  }
}

CommentThread HttpVideoClient::fetch(const Url& video_url) const {
  const auto id = video_id(video_url);
  if (!id) throw StanceError(StanceError::Kind::fetch, "no video id in " + video_url.str());
  const char* key = api_key_env_.empty() ? nullptr : std::getenv(api_key_env_.c_str());
  const std::string key_param = key ? std::string("&key=") + key : std::string();

  CommentThread thread;
  try {
    const auto video = get("/videos?part=snippet&id=" + *id + key_param);
    const auto& items = video.at("items");
    if (!items.empty()) thread.video_title = items.at(0).at("snippet").value("title", "");

    const auto threads = get("/commentThreads?part=snippet,replies&order=relevance&maxResults=" +
                             std::to_string(CommentThread::kMaxComments) + "&videoId=" + *id + key_param);
    for (const auto& item : threads.value("items", nlohmann::json::array())) {
      if (thread.comments.size() == CommentThread::kMaxComments) break;
      const auto& top = item.at("snippet").at("topLevelComment");
      const auto& s = top.at("snippet");
      Comment c{top.value("id", item.value("id", "")), s.value("authorDisplayName", ""), s.value("textOriginal", ""), {}};
      if (item.contains("replies")) {
        for (const auto& r : item.at("replies").value("comments", nlohmann::json::array())) {
          const auto& rs = r.at("snippet");
          c.replies.push_back({r.value("id", ""), rs.value("authorDisplayName", ""), rs.value("textOriginal", "")});
        }
      }
      thread.comments.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw StanceError(StanceError::Kind::fetch, std::string("unexpected video API response: ") + e.what());
  }
  return thread;
}

// --- baseline provider --------------------------------------------------------

BaselineStanceProvider::BaselineStanceProvider(const nlohmann::json& lex)
    : deny_(to_phrases(lex.value("deny", nlohmann::json::array()))),
      support_(to_phrases(lex.value("support", nlohmann::json::array()))) {
  for (const auto& w : lex.value("wh_words", nlohmann::json::array()))
    wh_words_.push_back(text::to_lower(text::decode_utf8(w.get<std::string>())));
}

std::unique_ptr<BaselineStanceProvider> BaselineStanceProvider::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stance lexicon: " + path);
  try {
    return std::make_unique<BaselineStanceProvider>(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string BaselineStanceProvider::classify(std::string_view, std::string_view item) const {
  const auto tokens = lowered_words(item);
  if (contains_phrase(tokens, deny_)) return "deny";
  if (contains_phrase(tokens, support_)) return "support";
  const auto trimmed = text::normalize_whitespace(item);
  const bool question_mark = !trimmed.empty() && (trimmed.back() == '?' || trimmed.ends_with("？"));
  const bool wh_start =
      !tokens.empty() && std::find(wh_words_.begin(), wh_words_.end(), tokens.front()) != wh_words_.end();
  if (question_mark || wh_start) return "question";
  return "comment";
}

RemoteStanceProvider::RemoteStanceProvider(Url endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

std::string RemoteStanceProvider::classify(std::string_view target, std::string_view item) const {
  httplib::Client client(endpoint_.origin());
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  const nlohmann::json body = {{"target", target}, {"item", item}};
  auto res = client.Post(endpoint_.request_target(), body.dump(), "application/json");
  if (!res) throw StanceError(StanceError::Kind::provider, "stance request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw StanceError(StanceError::Kind::provider, "stance provider returned HTTP " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body).at("label").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw StanceError(StanceError::Kind::provider, std::string("malformed stance response: ") + e.what());
  }
}

// --- classification -----------------------------------------------------------

CommentThread fetch_thread(const Url& video_url, const VideoClient& client) {
  if (classify_submission(video_url) != SubmissionClass::video_platform)
    throw ValidationError("not a video-platform URL: " + video_url.str());
  auto thread = client.fetch(video_url);
  if (thread.comments.size() > CommentThread::kMaxComments) thread.comments.resize(CommentThread::kMaxComments);
  return thread;
}

StanceLabel classify_stance(std::string_view target, std::string_view item, bool is_reply,
                            const StanceProvider& provider, std::string* error) {
  std::string raw;
  try {
    raw = provider.classify(target, item);
  } catch (const std::exception& e) {
    if (error) *error = std::string("stance provider failed: ") + e.what();
    return StanceLabel::comment;
  }
  if (raw == "support") return StanceLabel::support;
  if (raw == "deny") return StanceLabel::deny;
  if (raw == "question" || raw == "query") return is_reply ? StanceLabel::query : StanceLabel::question;
  if (raw == "comment") return StanceLabel::comment;
  if (error) *error = "stance provider returned unknown label: " + raw;
  return StanceLabel::comment;
}

StancedThread classify_thread(const CommentThread& thread, const StanceProvider& provider) {
  StancedThread out;
  out.video_title = thread.video_title;
  for (const auto& c : thread.comments) {
    StancedComment sc;
    sc.comment = {c.id, c.author_handle, c.text, {}};
    std::string err;
    sc.label = classify_stance(thread.video_title, c.text, false, provider, &err);
    if (!err.empty()) sc.error = err;
    for (const auto& r : c.replies) {
      StancedReply sr;
      sr.reply = r;
      std::string rerr;
      sr.label = classify_stance(c.text, r.text, true, provider, &rerr);
      if (!rerr.empty()) sr.error = rerr;
      sc.replies.push_back(std::move(sr));
    }
    out.comments.push_back(std::move(sc));
  }
  return out;
}

}  // namespace verif
