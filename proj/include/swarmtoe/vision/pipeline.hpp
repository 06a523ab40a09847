#pragma once

// Board reader: grayscale, threshold, 5x5 erosion, nine cell crops, hole
// filling, black-pixel density and a two-threshold classifier.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swarmtoe/game/board.hpp"
#include "swarmtoe/vision/image.hpp"

namespace swarmtoe::vision {

using game::Board;
using game::Cell;
using game::Mark;

inline GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const Rgb p = img.data()[i];
    // round(0.299 r + 0.587 g + 0.114 b), exact in integers.
    out.data()[i] = static_cast<std::uint8_t>((299u * p.r + 587u * p.g + 114u * p.b + 500u) / 1000u);
  }
  return out;
}

// Foreground iff gray < t.
inline BinaryImage threshold(const GrayImage& img, std::uint8_t t) {
  BinaryImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out.data()[i] = img.data()[i] < t ? 1 : 0;
  return out;
}

inline constexpr int kErosionKernel = 5;

// 5x5 square erosion, out-of-bounds counts as background. Separable: a pixel
// survives iff the horizontal 5-run and then the vertical 5-run are full.
inline BinaryImage erode(const BinaryImage& img) {
  constexpr int k = kErosionKernel;
  constexpr int r = k / 2;
  const int w = img.width();
  const int h = img.height();
  if (w < k || h < k) throw std::invalid_argument("erode: image smaller than the 5x5 kernel");

  BinaryImage horiz(w, h);
  for (int y = 0; y < h; ++y) {
    int run = 0;  // consecutive foreground ending at x
    for (int x = 0; x < w; ++x) {
      run = img(x, y) ? run + 1 : 0;
      // run ending at x covers [x - k + 1, x], centered at x - r
      if (run >= k) horiz(x - r, y) = 1;
    }
  }
  BinaryImage out(w, h);
  std::vector<int> run(static_cast<std::size_t>(w), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int& rx = run[static_cast<std::size_t>(x)];
      rx = horiz(x, y) ? rx + 1 : 0;
      if (rx >= k) out(x, y - r) = 1;
    }
  }
  return out;
}

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool contains(int px, int py) const noexcept {
    return px >= x && py >= y && px < x + width && py < y + height;
  }
  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

// Board region in image pixels. Columns split `width`, rows split `height`;
// when a side is not divisible by 3 the remainder goes to the last column or
// row of cells.
struct BoardGeometry {
  int x = 20;
  int y = 20;
  int width = 300;   // 1.0 m side
  int height = 360;  // 1.2 m side

  Rect cell_rect(Cell c) const noexcept {
    const int cw = width / 3;
    const int ch = height / 3;
    Rect r{x + c.col() * cw, y + c.row() * ch, cw, ch};
    if (c.col() == 2) r.width = width - 2 * cw;
    if (c.row() == 2) r.height = height - 2 * ch;
    return r;
  }

  // Cell containing an image pixel, if it lies on the board.
  std::optional<Cell> cell_at(int px, int py) const {
    for (Cell c : game::kAllCells)
      if (cell_rect(c).contains(px, py)) return c;
    return std::nullopt;
  }

  // Image size that frames the board with an equal margin on every side.
  int canvas_width() const noexcept { return 2 * x + width; }
  int canvas_height() const noexcept { return 2 * y + height; }

  friend constexpr bool operator==(const BoardGeometry&, const BoardGeometry&) = default;
};

template <class Img>
Img crop(const Img& img, const Rect& r) {
  Img out(r.width, r.height);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x) out(x, y) = img(r.x + x, r.y + y);
  return out;
}

// Nine crops ordered by cell index 1..9.
inline std::array<BinaryImage, 9> crop_cells(const BinaryImage& img, const BoardGeometry& geom) {
  if (geom.x < 0 || geom.y < 0 || geom.width < 3 || geom.height < 3 || geom.x + geom.width > img.width() ||
      geom.y + geom.height > img.height())
    throw std::out_of_range("crop_cells: board geometry outside the image");
  std::array<BinaryImage, 9> out;
  for (Cell c : game::kAllCells) out[c.offset()] = crop(img, geom.cell_rect(c));
  return out;
}

// Background pixels not 4-connected to the crop border become foreground, so
// a closed outline turns into a solid blob.
inline BinaryImage fill_contours(const BinaryImage& img) {
  const int w = img.width();
  const int h = img.height();
  std::vector<std::uint8_t> outside(img.size(), 0);
  std::vector<std::pair<int, int>> stack;
  auto seed = [&](int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
    if (!img(x, y) && !outside[i]) {
      outside[i] = 1;
      stack.emplace_back(x, y);
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    if (x > 0) seed(x - 1, y);
    if (x + 1 < w) seed(x + 1, y);
    if (y > 0) seed(x, y - 1);
    if (y + 1 < h) seed(x, y + 1);
  }
  BinaryImage out(w, h);
  for (std::size_t i = 0; i < img.size(); ++i) out.data()[i] = outside[i] ? 0 : 1;
  return out;
}

inline double density(const BinaryImage& img) {
  if (img.size() == 0) throw std::invalid_argument("density: zero-area crop");
  return static_cast<double>(foreground_count(img)) / static_cast<double>(img.size());
}

enum class CellClass { Empty, Circle, Drone };

constexpr std::string_view to_string(CellClass k) noexcept {
  switch (k) {
    case CellClass::Empty: return "Empty";
    case CellClass::Circle: return "Circle";
    case CellClass::Drone: return "Drone";
  }
  return "?";
}

struct DensityThresholds {
  double lo = 0.15;
  double hi = 0.55;
};

inline CellClass classify(double d, DensityThresholds t = {}) {
  if (!(0.0 <= t.lo && t.lo < t.hi && t.hi <= 1.0))
    throw std::invalid_argument("classify: thresholds must satisfy 0 <= lo < hi <= 1");
  if (d < t.lo) return CellClass::Empty;
  if (d < t.hi) return CellClass::Circle;
  return CellClass::Drone;
}

struct CellObservation {
  Cell cell{1};
  double density = 0.0;
  CellClass klass = CellClass::Empty;
};

using Observations = std::array<CellObservation, 9>;

struct PipelineConfig {
  std::uint8_t gray_threshold = 128;
  DensityThresholds density{};
  BoardGeometry geometry{};
};

inline Observations observe_cells(const RgbImage& frame, const PipelineConfig& cfg = {}) {
  const BinaryImage eroded = erode(threshold(to_grayscale(frame), cfg.gray_threshold));
  const auto crops = crop_cells(eroded, cfg.geometry);
  Observations obs;
  for (Cell c : game::kAllCells) {
    const double d = density(fill_contours(crops[c.offset()]));
    obs[c.offset()] = {c, d, classify(d, cfg.density)};
  }
  return obs;
}

// Circles read as O, drones as X.
inline Board board_from_observations(const Observations& obs) {
  Board b;
  for (const CellObservation& o : obs) {
    if (o.klass == CellClass::Circle) b.set(o.cell, Mark::O);
    if (o.klass == CellClass::Drone) b.set(o.cell, Mark::X);
  }
  return b;
}

inline Board read_board(const RgbImage& frame, const PipelineConfig& cfg = {}) {
  return board_from_observations(observe_cells(frame, cfg));
}

class InconsistentFrame : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The human's newly placed circle, if any. Drone cells are taken from `prev`;
// a circle seen on a drone cell or more than one new circle means the frame
// cannot be trusted and should be retaken.
inline std::optional<Cell> detect_human_move(const Board& prev, const Observations& obs) {
  std::optional<Cell> found;
  for (const CellObservation& o : obs) {
    if (o.klass != CellClass::Circle) continue;
    const Mark m = prev[o.cell];
    if (m == Mark::X)
      throw InconsistentFrame("circle detected on drone cell " + std::to_string(o.cell.index()));
    if (m == Mark::O) continue;
    if (found)
      throw InconsistentFrame("more than one new circle (cells " + std::to_string(found->index()) + " and " +
                              std::to_string(o.cell.index()) + ")");
    found = o.cell;
  }
  return found;
}

}  // namespace swarmtoe::vision
