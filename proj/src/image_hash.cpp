#include "verif/image_hash.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <csetjmp>
#include <cstdio>
#include <cstring>

#include <jpeglib.h>
#include <png.h>

#include "verif/error.hpp"

namespace verif {
namespace {

std::uint8_t luma(int r, int g, int b) {
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

// ---- PNM ----

class PnmReader {
 public:
  explicit PnmReader(std::string_view data) : data_(data) {}

  GrayImage read() {
    if (data_.size() < 2 || data_[0] != 'P') throw DecodeError("not a PNM image");
    const char type = data_[1];
    pos_ = 2;
    if (type != '2' && type != '3' && type != '5' && type != '6') throw DecodeError("unsupported PNM variant");
    const bool color = type == '3' || type == '6';
    const bool binary = type == '5' || type == '6';
    GrayImage img;
    img.width = next_int();
    img.height = next_int();
    const int maxval = next_int();
    if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 65535) throw DecodeError("bad PNM header");
    if (static_cast<long long>(img.width) * img.height > 64LL * 1024 * 1024) throw DecodeError("PNM too large");
    const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(count);
    if (binary) ++pos_;  // single whitespace after maxval
    const int bytes_per_sample = maxval > 255 ? 2 : 1;
    const int channels = color ? 3 : 1;
    auto sample = [&]() -> int {
      int v = 0;
      if (binary) {
        if (pos_ + bytes_per_sample > data_.size()) throw DecodeError("truncated PNM data");
        v = static_cast<unsigned char>(data_[pos_++]);
        if (bytes_per_sample == 2) v = (v << 8) | static_cast<unsigned char>(data_[pos_++]);
      } else {
        v = next_int();
      }
      if (v > maxval) throw DecodeError("PNM sample exceeds maxval");
      return maxval == 255 ? v : (v * 255 + maxval / 2) / maxval;
    };
    for (std::size_t i = 0; i < count; ++i) {
      if (channels == 1) {
        img.pixels[i] = static_cast<std::uint8_t>(sample());
      } else {
        const int r = sample();
        const int g = sample();
        const int b = sample();
        img.pixels[i] = luma(r, g, b);
      }
    }
    return img;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(data_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int next_int() {
    skip_space_and_comments();
    int v = 0;
    const auto* first = data_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, data_.data() + data_.size(), v);
    if (ec != std::errc{} || ptr == first) throw DecodeError("malformed PNM number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

// ---- PNG ----

GrayImage decode_png(std::string_view data) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, data.data(), data.size()))
    throw DecodeError(std::string("PNG decode failed: ") + image.message);
  image.format = PNG_FORMAT_GRAY;
  GrayImage out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw DecodeError("PNG decode failed: " + msg);
  }
  return out;
}

// ---- JPEG ----

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Returns false and fills `message` on failure. No objects with destructors live across setjmp.
bool decode_jpeg_raw(const unsigned char* data, unsigned long size, GrayImage* out, char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    std::strncpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, size);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_GRAYSCALE;
  jpeg_start_decompress(&cinfo);
  out->width = static_cast<int>(cinfo.output_width);
  out->height = static_cast<int>(cinfo.output_height);
  out->pixels.resize(static_cast<std::size_t>(out->width) * out->height);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out->pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * out->width;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

GrayImage decode_jpeg(std::string_view data) {
  GrayImage out;
  char message[JMSG_LENGTH_MAX] = {};
  if (!decode_jpeg_raw(reinterpret_cast<const unsigned char*>(data.data()), static_cast<unsigned long>(data.size()),
                       &out, message))
    throw DecodeError(std::string("JPEG decode failed: ") + message);
  return out;
}

// Mean intensity of the source area covered by output cell (cx, cy) in a cols x rows grid.
double cell_mean(const GrayImage& img, int cx, int cy, int cols, int rows) {
  const double x0 = static_cast<double>(cx) * img.width / cols;
  const double x1 = static_cast<double>(cx + 1) * img.width / cols;
  const double y0 = static_cast<double>(cy) * img.height / rows;
  const double y1 = static_cast<double>(cy + 1) * img.height / rows;
  double sum = 0.0;
  double area = 0.0;
  for (int y = static_cast<int>(y0); y < img.height && y < y1; ++y) {
    const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
    if (wy <= 0) continue;
    for (int x = static_cast<int>(x0); x < img.width && x < x1; ++x) {
      const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
      if (wx <= 0) continue;
      sum += wx * wy * img.at(x, y);
      area += wx * wy;
    }
  }
  return area > 0 ? sum / area : 0.0;
}

}  // namespace

GrayImage decode_image(std::string_view bytes) {
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) == 0) return decode_png(bytes);
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF && static_cast<unsigned char>(bytes[1]) == 0xD8)
    return decode_jpeg(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P') return PnmReader(bytes).read();
  throw DecodeError("unrecognized image format");
}

std::string encode_pgm(const GrayImage& image, bool binary) {
  std::string out = (binary ? "P5\n" : "P2\n") + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n255\n";
  if (binary) {
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  } else {
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        out += std::to_string(image.at(x, y));
        out += (x + 1 == image.width) ? '\n' : ' ';
      }
    }
  }
  return out;
}

ImageHash hash_image(const GrayImage& image) {
  if (!image.valid()) throw DecodeError("image has no pixels or inconsistent dimensions");
  constexpr int kCols = 9;
  constexpr int kRows = 8;
  double cells[kRows][kCols];
  for (int y = 0; y < kRows; ++y)
    for (int x = 0; x < kCols; ++x) cells[y][x] = cell_mean(image, x, y, kCols, kRows);
  ImageHash hash = 0;
  for (int y = 0; y < kRows; ++y) {
    for (int x = 0; x < kCols - 1; ++x) {
      hash <<= 1;
      if (cells[y][x] > cells[y][x + 1]) hash |= 1;
    }
  }
  return hash;
}

int hamming_distance(ImageHash a, ImageHash b) { return std::popcount(a ^ b); }

std::string hash_to_hex(ImageHash hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

ImageHash hash_from_hex(std::string_view hex) {
  if (hex.size() > 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
  if (hex.empty() || hex.size() > 16) throw ValidationError("image hash must be 1-16 hex digits");
  ImageHash v = 0;
  const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), v, 16);
  if (ec != std::errc{} || ptr != hex.data() + hex.size())
    throw ValidationError("invalid hex image hash: " + std::string(hex));
  return v;
}

void HammingIndex::insert(ImageHash hash, std::size_t value) {
  nodes_.push_back({hash, value, {}});
  const std::size_t fresh = nodes_.size() - 1;
  if (fresh == 0) return;
  std::size_t cur = 0;
  while (true) {
    const int d = hamming_distance(nodes_[cur].hash, hash);
    auto& kids = nodes_[cur].children;
    auto it = std::find_if(kids.begin(), kids.end(), [d](const auto& c) { return c.first == d; });
    if (it == kids.end()) {
      kids.emplace_back(d, fresh);
      return;
    }
    cur = it->second;
  }
}

void HammingIndex::clear() { nodes_.clear(); }

std::vector<std::pair<std::size_t, int>> HammingIndex::query(ImageHash hash, int radius) const {
  std::vector<std::pair<std::size_t, int>> out;
  if (nodes_.empty() || radius < 0) return out;
  std::vector<std::size_t> pending{0};
  while (!pending.empty()) {
    const auto idx = pending.back();
    pending.pop_back();
    const auto& node = nodes_[idx];
    const int d = hamming_distance(node.hash, hash);
    if (d <= radius) out.emplace_back(node.value, d);
    for (const auto& [edge, child] : node.children)
      if (edge >= d - radius && edge <= d + radius) pending.push_back(child);
  }
  return out;
}

}  // namespace verif
