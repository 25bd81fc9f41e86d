#include "gpsim/texturing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "gpsim/error.hpp"

namespace gpsim {
namespace {

struct Coefficients {
  double y[3];
  double u[3];
  double v[3];
};

constexpr Coefficients kBt601{{0.299, 0.587, 0.114},
                              {-0.1687, -0.3313, 0.5},
                              {0.5, -0.4187, -0.0813}};
constexpr Coefficients kBt709{{0.2126, 0.7152, 0.0722},
                              {-0.1146, -0.3854, 0.5},
                              {0.5, -0.4542, -0.0458}};

double clamp_channel(double x) { return std::clamp(x, 0.0, 255.0); }

double wrap_unit(double t) {
  if (!std::isfinite(t)) return 0.0;
  return (t >= 0.0 && t <= 1.0) ? t : t - std::floor(t);
}

// Corner coordinates beyond this many pixels would overflow the 64-bit edge
// functions.
constexpr double kMaxPixelCoordinate = double{1 << 22};

struct FixedPoint {
  std::int64_t x;
  std::int64_t y;
};

FixedPoint snap(const PixelPoint& p) {
  if (!(std::abs(p.x) <= kMaxPixelCoordinate) || !(std::abs(p.y) <= kMaxPixelCoordinate)) {
    throw Error(ErrorKind::Parameter, "triangle corner outside the rasterizable range");
  }
  constexpr double scale = double{1 << kSubpixelBits};
  return {std::llround(p.x * scale), std::llround(p.y * scale)};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Edge a->b of a positively oriented triangle (y down). E(p) > 0 inside.
struct Edge {
  std::int64_t ax, ay, dx, dy;
  bool top_left;

  Edge(FixedPoint a, FixedPoint b)
      : ax(a.x), ay(a.y), dx(b.x - a.x), dy(b.y - a.y), top_left(dy < 0 || (dy == 0 && dx > 0)) {}

  std::int64_t eval(std::int64_t px, std::int64_t py) const {
    return dx * (py - ay) - dy * (px - ax);
  }
  bool covers(std::int64_t e) const { return e > 0 || (e == 0 && top_left); }
};

}  // namespace

Yuv rgb_to_yuv(Rgb rgb, ColorSpace space) {
  const Coefficients& k = space == ColorSpace::Bt709 ? kBt709 : kBt601;
  const double r = rgb.r, g = rgb.g, b = rgb.b;
  return {clamp_channel(k.y[0] * r + k.y[1] * g + k.y[2] * b),
          clamp_channel(k.u[0] * r + k.u[1] * g + k.u[2] * b + 128.0),
          clamp_channel(k.v[0] * r + k.v[1] * g + k.v[2] * b + 128.0)};
}

PixelPoint uv_to_pixel(const Vec2& uv, int width, int height) {
  const double w = width, h = height;
  const double x = wrap_unit(uv.x()) * w;
  const double y = (1.0 - wrap_unit(uv.y())) * h;
  return {std::clamp(x, 0.0, std::nextafter(w, 0.0)), std::clamp(y, 0.0, std::nextafter(h, 0.0))};
}

std::vector<PixelIndex> rasterize_triangle(const std::array<PixelPoint, 3>& corners, int width,
                                           int height) {
  std::vector<PixelIndex> out;
  FixedPoint a = snap(corners[0]);
  FixedPoint b = snap(corners[1]);
  FixedPoint c = snap(corners[2]);
  const std::int64_t area2 = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (area2 == 0) return out;
  if (area2 < 0) std::swap(b, c);

  const Edge edges[3] = {Edge(a, b), Edge(b, c), Edge(c, a)};

  constexpr std::int64_t one = std::int64_t{1} << kSubpixelBits;
  constexpr std::int64_t half = one / 2;
  const std::int64_t min_x = std::min({a.x, b.x, c.x}), max_x = std::max({a.x, b.x, c.x});
  const std::int64_t min_y = std::min({a.y, b.y, c.y}), max_y = std::max({a.y, b.y, c.y});
  // Pixel i has its center at i * one + half.
  const std::int64_t x0 = std::max<std::int64_t>(0, floor_div(min_x - half, one));
  const std::int64_t x1 = std::min<std::int64_t>(width - 1, floor_div(max_x - half, one) + 1);
  const std::int64_t y0 = std::max<std::int64_t>(0, floor_div(min_y - half, one));
  const std::int64_t y1 = std::min<std::int64_t>(height - 1, floor_div(max_y - half, one) + 1);
  if (x0 > x1 || y0 > y1) return out;

  for (std::int64_t y = y0; y <= y1; ++y) {
    const std::int64_t py = y * one + half;
    const std::int64_t px0 = x0 * one + half;
    std::int64_t e[3];
    std::int64_t step[3];
    for (int k = 0; k < 3; ++k) {
      e[k] = edges[k].eval(px0, py);
      step[k] = -edges[k].dy * one;
    }
    for (std::int64_t x = x0; x <= x1; ++x) {
      if (edges[0].covers(e[0]) && edges[1].covers(e[1]) && edges[2].covers(e[2])) {
        out.push_back({static_cast<int>(x), static_cast<int>(y)});
      }
      for (int k = 0; k < 3; ++k) e[k] += step[k];
    }
  }
  return out;
}

std::vector<PixelIndex> rasterize_face(const std::array<PixelPoint, 3>& corners, int width,
                                       int height) {
  auto pixels = rasterize_triangle(corners, width, height);
  if (!pixels.empty()) return pixels;
  const double cx = (corners[0].x + corners[1].x + corners[2].x) / 3.0;
  const double cy = (corners[0].y + corners[1].y + corners[2].y) / 3.0;
  const int ix = std::clamp(static_cast<int>(std::floor(cx)), 0, width - 1);
  const int iy = std::clamp(static_cast<int>(std::floor(cy)), 0, height - 1);
  return {{ix, iy}};
}

Yuv sample_vertex_color(const Vec2& uv, const TextureImage& image, ColorSpace space) {
  const PixelPoint p = uv_to_pixel(uv, image.width, image.height);
  const int ix = std::min(static_cast<int>(p.x), image.width - 1);
  const int iy = std::min(static_cast<int>(p.y), image.height - 1);
  return rgb_to_yuv(image.at(ix, iy), space);
}

TexturedGeodesicPatch texture_patch(GeodesicPatch patch, const TextureImage& image,
                                    ColorSpace space) {
  if (image.empty()) throw Error(ErrorKind::Parameter, "texture image is empty");
  TexturedGeodesicPatch out;
  out.color_space = space;
  out.face_pixels.reserve(patch.faces.size());
  for (const auto& face : patch.faces) {
    std::array<PixelPoint, 3> corners;
    for (int k = 0; k < 3; ++k) {
      corners[k] = uv_to_pixel(patch.vertex(face[k]).uv, image.width, image.height);
    }
    std::vector<TexturedPixel> cluster;
    for (const PixelIndex& p : rasterize_face(corners, image.width, image.height)) {
      cluster.push_back({p.x, p.y, image.at(p.x, p.y)});
    }
    out.total_pixels += cluster.size();
    out.face_pixels.push_back(std::move(cluster));
  }
  out.vertex_colors.reserve(patch.vertex_count());
  for (int i = 0; i < static_cast<int>(patch.vertex_count()); ++i) {
    out.vertex_colors.push_back(sample_vertex_color(patch.vertex(i).uv, image, space));
  }
  out.patch = std::move(patch);
  return out;
}

}  // namespace gpsim
