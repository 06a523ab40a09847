#pragma once

// Binary portable pixmap (P6) and graymap (P5) I/O, maxval 255 only.

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "swarmtoe/vision/image.hpp"

namespace swarmtoe::vision {

class PnmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void skip_space_and_comments(std::istream& is) {
  for (;;) {
    const int c = is.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(is, ignored);
    } else if (c != EOF && std::isspace(c)) {
      is.get();
    } else {
      return;
    }
  }
}

inline int read_header_int(std::istream& is) {
  skip_space_and_comments(is);
  int v = -1;
  if (!(is >> v) || v < 0) throw PnmError("malformed PNM header");
  return v;
}

struct PnmHeader {
  char kind = 0;
  int width = 0;
  int height = 0;
};

inline PnmHeader read_header(std::istream& is) {
  char magic[2] = {};
  if (!is.read(magic, 2) || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
    throw PnmError("not a binary PGM/PPM file");
  PnmHeader h;
  h.kind = magic[1];
  h.width = read_header_int(is);
  h.height = read_header_int(is);
  if (read_header_int(is) != 255) throw PnmError("only maxval 255 is supported");
  // Exactly one whitespace byte separates the header from the raster.
  if (!std::isspace(is.get())) throw PnmError("malformed PNM header terminator");
  return h;
}

}  // namespace detail

inline void write_ppm(std::ostream& os, const RgbImage& img) {
  os << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  for (const Rgb& p : img.data()) {
    const char px[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
    os.write(px, 3);
  }
}

inline void write_pgm(std::ostream& os, const GrayImage& img) {
  os << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.data().data()), static_cast<std::streamsize>(img.size()));
}

inline RgbImage read_ppm(std::istream& is) {
  const detail::PnmHeader h = detail::read_header(is);
  if (h.kind != '6') throw PnmError("expected P6 pixmap");
  RgbImage img(h.width, h.height);
  for (Rgb& p : img.data()) {
    char px[3];
    if (!is.read(px, 3)) throw PnmError("truncated PPM raster");
    p = {static_cast<std::uint8_t>(px[0]), static_cast<std::uint8_t>(px[1]), static_cast<std::uint8_t>(px[2])};
  }
  return img;
}

inline GrayImage read_pgm(std::istream& is) {
  const detail::PnmHeader h = detail::read_header(is);
  if (h.kind != '5') throw PnmError("expected P5 graymap");
  GrayImage img(h.width, h.height);
  if (!is.read(reinterpret_cast<char*>(img.data().data()), static_cast<std::streamsize>(img.size())))
    throw PnmError("truncated PGM raster");
  return img;
}

// Reads either format; graymaps are expanded to RGB.
inline RgbImage read_image_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PnmError("cannot open " + path);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  in.seekg(0);
  if (magic == "P6") return read_ppm(in);
  const GrayImage g = read_pgm(in);
  RgbImage out(g.width(), g.height());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::uint8_t v = g.data()[i];
    out.data()[i] = {v, v, v};
  }
  return out;
}

inline void write_ppm_file(const std::string& path, const RgbImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PnmError("cannot write " + path);
  write_ppm(out, img);
}

}  // namespace swarmtoe::vision
