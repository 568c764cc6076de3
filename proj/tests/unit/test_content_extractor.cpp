#include <doctest.h>

#include <random>
#include <set>

#include "support/paths.hpp"
#include "verif/content_extractor.hpp"
#include "verif/error.hpp"
#include "verif/text.hpp"

using namespace verif;
using testing_support::read_file;
using testing_support::source_path;

TEST_CASE("paragraphs and an image between them") {
  const auto c = extract("<p>A.</p><img src=\"/x.png\"><p>B.</p>", Url::parse("https://e.com"));
  CHECK(c.text == "A. B.");
  REQUIRE(c.images.size() == 1);
  CHECK(c.images[0].url == "https://e.com/x.png");
  CHECK(c.images[0].text_offset == 2);
  REQUIRE(c.sentences.size() == 2);
  CHECK(c.images[0].text_offset >= c.sentences[0].end);
  CHECK(c.images[0].text_offset <= c.sentences[1].start);
}

TEST_CASE("links are absolute, deduplicated and keep first-occurrence order") {
  const auto c = extract(
      "<p><a href='/b'>b</a> <a href='https://z.example/'>z</a> <a href='/b#frag'>again</a> "
      "<a href='mailto:x@y.z'>mail</a> <a href='/a'>a</a></p>",
      Url::parse("https://site.example/dir/page"));
  CHECK(c.links == std::vector<std::string>{"https://site.example/b", "https://z.example/", "https://site.example/a"});
  CHECK(extract("<p>No anchors here.</p>").links.empty());
}

TEST_CASE("empty documents give empty content") {
  const auto c = extract("");
  CHECK(c.text.empty());
  CHECK(c.sentences.empty());
  CHECK(c.images.empty());
  CHECK(c.links.empty());
}

TEST_CASE("boilerplate, scripts and hidden blocks are dropped") {
  const auto c = extract(read_file(source_path("fixtures/html/nav_heavy.html")), Url::parse("https://city.example/news/1"));
  CHECK(c.title == "Council approves new cycle lanes");
  CHECK(c.text.find("twelve kilometres of protected cycle lanes") != std::string::npos);
  CHECK(c.text.find("eighteen months") != std::string::npos);
  for (const char* junk : {"cookies", "Weather", "Most read", "Copyright", "do not extract", "Hidden paragraph", "Share on social", "color:red"})
    CHECK_MESSAGE(c.text.find(junk) == std::string::npos, junk);
}

TEST_CASE("media keep document order and resolve against <base>") {
  const auto c = extract(read_file(source_path("fixtures/html/media_order.html")), Url::parse("https://news.example/storm"));
  REQUIRE(c.images.size() == 3);
  CHECK(c.images[0].url == "https://news.example/gallery/photo-one.jpg");
  CHECK(c.images[0].alt_text == "Fallen tree on a car");
  CHECK(c.images[1].url == "https://news.example/images/photo-two.png");
  CHECK(c.images[2].url == "https://news.example/gallery/photo-three.webp");
  CHECK_FALSE(c.images[2].alt_text);
  REQUIRE(c.videos.size() == 2);
  CHECK(c.videos[0].url == "https://www.youtube.com/embed/abc123XYZ");
  CHECK(c.videos[1].url == "https://news.example/gallery/clip.mp4");
  for (const auto* list : {&c.images, &c.videos})
    for (std::size_t i = 1; i < list->size(); ++i) CHECK((*list)[i - 1].document_position < (*list)[i].document_position);
  CHECK(c.images[0].document_position < c.videos[0].document_position);
  CHECK(c.videos[0].document_position < c.images[1].document_position);
}

TEST_CASE("plain text skips HTML handling") {
  const auto c = from_plain_text("<b>Bold</b> text. Second.");
  CHECK(c.text == "<b>Bold</b> text. Second.");
  CHECK(c.sentences.size() == 2);
  CHECK(c.links.empty());
}

TEST_CASE("submission validation") {
  CHECK_THROWS_AS((Submission{SubmissionKind::url, "not a url", {}}).validate(), ValidationError);
  CHECK_THROWS_AS((Submission{SubmissionKind::url, "ftp://x.example/", {}}).validate(), ValidationError);
  CHECK_THROWS_AS((Submission{SubmissionKind::plain_text, "", {}}).validate(), ValidationError);
  CHECK_NOTHROW((Submission{SubmissionKind::url, "https://x.example/a", {}}).validate());
  CHECK(submission_kind_from_string("media_upload") == SubmissionKind::media_upload);
  CHECK_FALSE(submission_kind_from_string("pdf"));
}

TEST_CASE("submission classification") {
  auto cls = [](const char* u) { return classify_submission(*Url::parse(u)); };
  CHECK(cls("https://www.youtube.com/watch?v=abc") == SubmissionClass::video_platform);
  CHECK(cls("https://youtube.com/watch?feature=share&v=abc") == SubmissionClass::video_platform);
  CHECK(cls("https://m.youtube.com/shorts/xyz") == SubmissionClass::video_platform);
  CHECK(cls("https://youtu.be/abc") == SubmissionClass::video_platform);
  CHECK(cls("https://www.youtube.com/feed/trending") == SubmissionClass::webpage);
  CHECK(cls("https://example.com/story.html") == SubmissionClass::webpage);
  CHECK(cls("https://example.com/pic.jpg") == SubmissionClass::direct_media);
  CHECK(cls("https://example.com/PIC.JPEG?w=200") == SubmissionClass::direct_media);
  CHECK(cls("https://example.com/v/clip.mp4") == SubmissionClass::direct_media);
  CHECK(video_id(*Url::parse("https://www.youtube.com/watch?v=abc_1-2&t=3")) == "abc_1-2");
  CHECK(video_id(*Url::parse("https://youtu.be/zzz")) == "zzz");
  CHECK(video_id(*Url::parse("https://www.youtube.com/shorts/short1")) == "short1");
}

TEST_CASE("property: random HTML yields valid spans, ordered media and unique links, deterministically") {
  std::mt19937 rng(2024);
  const std::vector<std::string> atoms = {
      "<p>", "</p>", "<div>", "</div>", "<nav>", "</nav>", "Some words.", " More text! ", "Dr. X", "?",
      "<img src='/i.png'>", "<img src='https://cdn.example/j.jpg' alt='j'>", "<a href='/l'>link</a>",
      "<a href='/l'>same</a>", "<a href='/m#x'>m</a>", "<script>var s = '<p>';</script>", "<br>", "&amp;",
      "<video src='/v.mp4'></video>", "\xC3\xA9t\xC3\xA9", "<span>", "</span>", "<!-- c -->", "<li>", "\n\n"};
  const auto base = Url::parse("https://rand.example/p/q");
  for (int round = 0; round < 200; ++round) {
    std::string html;
    const int len = std::uniform_int_distribution<int>(0, 40)(rng);
    for (int i = 0; i < len; ++i) html += atoms[std::uniform_int_distribution<std::size_t>(0, atoms.size() - 1)(rng)];
    const auto c = extract(html, base);
    CHECK(spans_valid(c.sentences, text::codepoint_length(c.text)));
    for (const auto* list : {&c.images, &c.videos})
      for (std::size_t i = 1; i < list->size(); ++i) CHECK((*list)[i - 1].document_position < (*list)[i].document_position);
    std::set<std::string> seen(c.links.begin(), c.links.end());
    CHECK(seen.size() == c.links.size());
    CHECK(extract(html, base) == c);
  }
}
