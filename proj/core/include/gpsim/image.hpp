#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gpsim {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// 8-bit RGB raster, row-major, row 0 at the top.
struct TextureImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * 3

  TextureImage() = default;
  TextureImage(int w, int h);

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  Rgb at(int x, int y) const noexcept {
    const std::uint8_t* p = pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) noexcept {
    std::uint8_t* p = pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
};

// Decodes PNG or JPEG bytes. Alpha is dropped, gray is replicated to RGB and
// 16-bit samples keep their high byte. Throws Error(Decode).
TextureImage decode_texture(std::span<const std::uint8_t> bytes);

TextureImage load_texture(const std::filesystem::path& path);

// 8-bit RGB PNG, default zlib settings.
std::vector<std::uint8_t> encode_png(const TextureImage& image);

}  // namespace gpsim
