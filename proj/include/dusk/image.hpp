#pragma once

#include <string>

#include "dusk/types.hpp"

namespace dusk {

// Planar RGB image, values nominally in [0,1], row 0 at the top.
struct Image {
  Mat r, g, b;

  int rows() const { return static_cast<int>(r.rows()); }
  int cols() const { return static_cast<int>(r.cols()); }

  static Image zero(int rows, int cols) {
    return {Mat::Zero(rows, cols), Mat::Zero(rows, cols), Mat::Zero(rows, cols)};
  }
  static Image constant(int rows, int cols, real v) {
    return {Mat::Constant(rows, cols, v), Mat::Constant(rows, cols, v),
            Mat::Constant(rows, cols, v)};
  }

  Vec3 pixel(int row, int col) const {
    return {r(row, col), g(row, col), b(row, col)};
  }
  void set_pixel(int row, int col, const Vec3& v) {
    r(row, col) = v.x();
    g(row, col) = v.y();
    b(row, col) = v.z();
  }

  Image clamped() const {
    auto cl = [](const Mat& m) {
      return m.cwiseMax(real(0)).cwiseMin(real(1)).eval();
    };
    return {cl(r), cl(g), cl(b)};
  }
};

inline Mat grayscale(const Image& img) {
  return real(0.299) * img.r + real(0.587) * img.g + real(0.114) * img.b;
}

// Quantizes to the nearest 8-bit level, as an on-disk write would.
Image quantize8(const Image& img);

// 8-bit PNG I/O; values are clamped and quantized on write.
void write_png(const std::string& path, const Image& img);
void write_png_gray(const std::string& path, const Mat& gray);
Image read_png(const std::string& path);
Mat read_png_gray(const std::string& path);

}  // namespace dusk
