#pragma once

// Synthetic top-down camera frames of the board, used as the camera stand-in
// for tests, the corpus generator and the vision-driven game loop.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "swarmtoe/game/board.hpp"
#include "swarmtoe/rng.hpp"
#include "swarmtoe/vision/image.hpp"
#include "swarmtoe/vision/pipeline.hpp"

namespace swarmtoe::vision {

struct NoiseSpec {
  double sigma = 0.0;         // additive Gaussian, gray levels
  double illumination = 0.0;  // gain runs linearly from 1-illumination (left) to 1+illumination (right)
  std::uint64_t seed = 0;
};

// Shapes in units of min(cell width, cell height) unless noted, relative to
// the cell center.
struct MarkStyle {
  double ring_outer = 0.36;
  double ring_thickness = 0.09;
  double rotor_offset = 0.22;  // fraction of cell width / height
  double rotor_radius = 0.27;
  double arm_half_width = 0.06;
  double body_half_side = 0.16;
  std::uint8_t table = 225;
  std::uint8_t board = 250;
  std::uint8_t grid = 70;
  std::uint8_t ink = 20;
  std::uint8_t drone = 35;
  int grid_thickness = 3;
};

namespace detail {

inline bool in_ring(double dx, double dy, double s, const MarkStyle& st) {
  const double r = std::hypot(dx, dy);
  return r <= st.ring_outer * s && r >= (st.ring_outer - st.ring_thickness) * s;
}

// Quadcopter seen from above: four rotor disks on an X frame around a body.
// Rotor centers sit at (+-rotor_offset * w, +-rotor_offset * h); neighbouring
// rotors overlap, so the frame encloses the body.
inline bool in_drone(double dx, double dy, double w, double h, const MarkStyle& st) {
  const double s = std::min(w, h);
  const double ox = st.rotor_offset * w;
  const double oy = st.rotor_offset * h;
  const double rr = st.rotor_radius * s;
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0})
      if (std::hypot(dx - sx * ox, dy - sy * oy) <= rr) return true;
  if (std::abs(dx) <= st.body_half_side * s && std::abs(dy) <= st.body_half_side * s) return true;
  // Arms: distance to the diagonals through the rotor centers.
  const double len = std::hypot(ox, oy);
  const double hw = st.arm_half_width * s;
  const bool within = std::abs(dx) <= ox && std::abs(dy) <= oy;
  return within && (std::abs(dx * oy - dy * ox) / len <= hw || std::abs(dx * oy + dy * ox) / len <= hw);
}

// Noise-free gray raster: table, white board, marks, then grid lines on top.
inline GrayImage draw_scene(const game::Board& board, const BoardGeometry& geom, const MarkStyle& st) {
  GrayImage g(geom.canvas_width(), geom.canvas_height(), st.table);
  for (int y = geom.y; y < geom.y + geom.height; ++y)
    for (int x = geom.x; x < geom.x + geom.width; ++x) g(x, y) = st.board;

  for (Cell cell : game::kAllCells) {
    const Mark m = board[cell];
    if (m == Mark::Empty) continue;
    const Rect r = geom.cell_rect(cell);
    const double s = std::min(r.width, r.height);
    for (int y = r.y; y < r.y + r.height; ++y) {
      for (int x = r.x; x < r.x + r.width; ++x) {
        const double dx = x + 0.5 - (r.x + r.width / 2.0);
        const double dy = y + 0.5 - (r.y + r.height / 2.0);
        if (m == Mark::O && in_ring(dx, dy, s, st)) g(x, y) = st.ink;
        if (m == Mark::X && in_drone(dx, dy, r.width, r.height, st)) g(x, y) = st.drone;
      }
    }
  }

  // Lines of `grid_thickness` straddle the cell boundaries and the border,
  // clipped to the board.
  const int half = st.grid_thickness / 2;
  auto on_line = [&](int p, int origin, int span) {
    const int pitch = span / 3;
    for (int b : {origin, origin + pitch, origin + 2 * pitch, origin + span})
      if (p >= b - half && p < b - half + st.grid_thickness) return true;
    return false;
  };
  for (int y = geom.y; y < geom.y + geom.height; ++y) {
    const bool row_line = on_line(y, geom.y, geom.height);
    for (int x = geom.x; x < geom.x + geom.width; ++x)
      if (row_line || on_line(x, geom.x, geom.width)) g(x, y) = st.grid;
  }
  return g;
}

}  // namespace detail

inline RgbImage render_board(const game::Board& board, const BoardGeometry& geom = {}, const NoiseSpec& noise = {},
                             const MarkStyle& style = {}) {
  const GrayImage scene = detail::draw_scene(board, geom, style);
  const int w = scene.width();
  const int h = scene.height();
  RgbImage img(w, h);
  SeededRng rng(noise.seed);
  const bool noisy = noise.sigma > 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t g = scene(x, y);
      if (noisy || noise.illumination != 0.0) {
        const double gain = 1.0 + noise.illumination * (2.0 * x / (w - 1) - 1.0);
        double v = g * gain;
        if (noisy) v += rng.gaussian(0.0, noise.sigma);
        g = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
      img(x, y) = {g, g, g};
    }
  }
  return img;
}

}  // namespace swarmtoe::vision
