#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmtoe::vision {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend constexpr bool operator==(Rgb, Rgb) = default;
};

// Row-major raster. `Tag` keeps gray and binary images distinct types even
// though both store bytes; `MinSide` is the smallest admissible dimension.
template <class Pixel, class Tag, int MinSide = 1>
class Image {
 public:
  using pixel_type = Pixel;
  static constexpr int kMinSide = MinSide;

  Image() = default;
  Image(int width, int height, Pixel fill = Pixel{}) : width_(width), height_(height) {
    if (width < MinSide || height < MinSide)
      throw std::invalid_argument("image must be at least " + std::to_string(MinSide) + "x" +
                                  std::to_string(MinSide) + ", got " + std::to_string(width) + "x" +
                                  std::to_string(height));
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  Pixel& operator()(int x, int y) noexcept { return pixels_[index(x, y)]; }
  const Pixel& operator()(int x, int y) const noexcept { return pixels_[index(x, y)]; }

  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::vector<Pixel>& data() noexcept { return pixels_; }
  const std::vector<Pixel>& data() const noexcept { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Pixel> pixels_;
};

struct RgbTag;
struct GrayTag;
struct BinaryTag;

// 45 px is the smallest side whose nine crops are 15 px, room for a 5x5 kernel.
using RgbImage = Image<Rgb, RgbTag, 45>;
using GrayImage = Image<std::uint8_t, GrayTag>;
// 1 = foreground (dark), 0 = background.
using BinaryImage = Image<std::uint8_t, BinaryTag>;

inline std::size_t foreground_count(const BinaryImage& img) noexcept {
  std::size_t n = 0;
  for (std::uint8_t v : img.data()) n += v != 0;
  return n;
}

}  // namespace swarmtoe::vision
