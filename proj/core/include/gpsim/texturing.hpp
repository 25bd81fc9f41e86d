#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gpsim/image.hpp"
#include "gpsim/patch.hpp"

namespace gpsim {

enum class ColorSpace { Bt601, Bt709 };

struct Yuv {
  double y = 0.0;
  double u = 0.0;
  double v = 0.0;

  double operator[](int c) const noexcept { return c == 0 ? y : (c == 1 ? u : v); }
  friend bool operator==(const Yuv&, const Yuv&) = default;
};

// Full-range RGB -> YUV. Chroma is offset by 128 and every channel is clamped
// to [0, 255].
Yuv rgb_to_yuv(Rgb rgb, ColorSpace space = ColorSpace::Bt601);

// Continuous pixel coordinates, x to the right and y down from the top-left
// corner of the image.
struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
};

struct PixelIndex {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const PixelIndex&, const PixelIndex&) = default;
};

// x = u * width, y = (1 - v) * height. Coordinates outside [0, 1] are wrapped
// by their fractional part first, and the result is clamped just inside the
// image so floor() always names a valid pixel.
PixelPoint uv_to_pixel(const Vec2& uv, int width, int height);

// Sub-pixel precision used when snapping triangle corners: 1/256 pixel.
inline constexpr int kSubpixelBits = 8;

// Pixels whose centers (x + 0.5, y + 0.5) lie inside the triangle, with
// edges resolved by the top-left rule so that two triangles sharing an edge
// never both claim a pixel on it. Corners are snapped to the sub-pixel grid
// and all coverage tests are exact integer arithmetic. Results are clipped to
// the image and listed in row-major order.
std::vector<PixelIndex> rasterize_triangle(const std::array<PixelPoint, 3>& corners, int width,
                                           int height);

// rasterize_triangle, falling back to the single pixel containing the
// centroid when no pixel center is covered.
std::vector<PixelIndex> rasterize_face(const std::array<PixelPoint, 3>& corners, int width,
                                       int height);

// Nearest-pixel lookup at the uv location, converted to YUV.
Yuv sample_vertex_color(const Vec2& uv, const TextureImage& image,
                        ColorSpace space = ColorSpace::Bt601);

struct TexturedPixel {
  int x = 0;
  int y = 0;
  Rgb rgb;
};

struct TexturedGeodesicPatch {
  GeodesicPatch patch;
  std::vector<std::vector<TexturedPixel>> face_pixels;  // one cluster per patch face
  std::size_t total_pixels = 0;
  std::vector<Yuv> vertex_colors;  // local vertex order: center, then neighbors
  ColorSpace color_space = ColorSpace::Bt601;
};

TexturedGeodesicPatch texture_patch(GeodesicPatch patch, const TextureImage& image,
                                    ColorSpace space = ColorSpace::Bt601);

}  // namespace gpsim
