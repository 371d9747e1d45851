#ifndef CTXLABEL_RASTER_HPP
#define CTXLABEL_RASTER_HPP

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctxlabel/error.hpp"

namespace ctxlabel {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB image.
class Raster {
 public:
  Raster(int width, int height, Rgb fill = {}) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw Error(ErrorKind::InvalidArgument, "raster dimensions must be positive");
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  Rgb& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  const Rgb& at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// Binary PPM (P6, maxval 255).
inline std::string encode_ppm(const Raster& raster) {
  std::string out = "P6\n" + std::to_string(raster.width()) + " " + std::to_string(raster.height()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(raster.width()) * raster.height() * 3);
  for (int y = 0; y < raster.height(); ++y)
    for (int x = 0; x < raster.width(); ++x) {
      const Rgb& p = raster.at(x, y);
      out.push_back(static_cast<char>(p.r));
      out.push_back(static_cast<char>(p.g));
      out.push_back(static_cast<char>(p.b));
    }
  return out;
}

inline Raster decode_ppm(std::string_view bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    int value = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      value = value * 10 + (bytes[pos++] - '0');
      any = true;
      if (value > (1 << 20)) throw Error(ErrorKind::Malformed, "ppm header value too large");
    }
    if (!any) throw Error(ErrorKind::Malformed, "ppm header truncated");
    return value;
  };
  if (bytes.substr(0, 2) != "P6") throw Error(ErrorKind::Malformed, "only binary P6 ppm is supported");
  pos = 2;
  const int width = read_int();
  const int height = read_int();
  const int maxval = read_int();
  if (maxval != 255) throw Error(ErrorKind::Malformed, "ppm maxval must be 255");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw Error(ErrorKind::Malformed, "ppm header not terminated");
  ++pos;
  Raster raster(width, height);
  if (bytes.size() - pos < static_cast<std::size_t>(width) * height * 3) throw Error(ErrorKind::Malformed, "ppm pixel data truncated");
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      Rgb& p = raster.at(x, y);
      p.r = static_cast<std::uint8_t>(bytes[pos++]);
      p.g = static_cast<std::uint8_t>(bytes[pos++]);
      p.b = static_cast<std::uint8_t>(bytes[pos++]);
    }
  return raster;
}

}  // namespace ctxlabel

#endif
