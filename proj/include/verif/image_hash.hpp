#pragma once

// 64-bit difference hashes of grayscale images, plus the decoders that feed them.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace verif {

using ImageHash = std::uint64_t;

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width * height

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool valid() const { return width > 0 && height > 0 && pixels.size() == static_cast<std::size_t>(width) * height; }
};

/// Decodes PNG, JPEG or binary/ASCII PGM/PPM bytes into 8-bit grayscale. Throws DecodeError.
GrayImage decode_image(std::string_view bytes);

/// Serializes as PGM; `binary` selects P5 over P2. Both decode to the same pixels.
std::string encode_pgm(const GrayImage& image, bool binary = true);

/// Difference hash: area-resample to 9x8, then one bit per horizontal neighbour pair,
/// set when the left cell is brighter than the right. Bit 63 is the top-left pair.
/// Throws DecodeError for an empty or inconsistent image.
ImageHash hash_image(const GrayImage& image);

int hamming_distance(ImageHash a, ImageHash b);

std::string hash_to_hex(ImageHash hash);
/// Accepts 1..16 hex digits with an optional 0x prefix. Throws ValidationError.
ImageHash hash_from_hex(std::string_view hex);

/// BK-tree over Hamming distance. Values are caller-defined payloads (record slots).
class HammingIndex {
 public:
  void insert(ImageHash hash, std::size_t value);
  void clear();
  std::size_t size() const { return nodes_.size(); }

  /// Every (value, distance) with distance <= radius, in unspecified order.
  std::vector<std::pair<std::size_t, int>> query(ImageHash hash, int radius) const;

 private:
  struct Node {
    ImageHash hash;
    std::size_t value;
    std::vector<std::pair<int, std::size_t>> children;  // (distance, node index)
  };
  std::vector<Node> nodes_;
};

}  // namespace verif
