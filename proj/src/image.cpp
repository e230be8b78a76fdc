#include "dusk/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace dusk {

namespace {

uint8_t to_byte(real v) {
  const real c = std::min(real(1), std::max(real(0), v));
  return static_cast<uint8_t>(std::lround(double(c) * 255.0));
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_png_impl(const std::string& path, int rows, int cols, int channels,
                    const std::vector<uint8_t>& data) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("png: cannot open " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png: write failed for " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(cols),
               static_cast<png_uint_32>(rows), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> row_ptrs(static_cast<size_t>(rows));
  for (int i = 0; i < rows; ++i)
    row_ptrs[static_cast<size_t>(i)] =
        const_cast<png_bytep>(data.data() + size_t(i) * cols * channels);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::vector<uint8_t> read_png_impl(const std::string& path, int& rows,
                                   int& cols, int want_channels) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("png: cannot open " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("png: read failed for " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_packing(png);
  png_set_strip_alpha(png);
  const png_byte color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (want_channels == 3 &&
      (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA))
    png_set_gray_to_rgb(png);
  if (want_channels == 1 &&
      (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA))
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);

  rows = static_cast<int>(png_get_image_height(png, info));
  cols = static_cast<int>(png_get_image_width(png, info));
  std::vector<uint8_t> data(size_t(rows) * cols * want_channels);
  std::vector<png_bytep> row_ptrs(static_cast<size_t>(rows));
  for (int i = 0; i < rows; ++i)
    row_ptrs[static_cast<size_t>(i)] =
        data.data() + size_t(i) * cols * want_channels;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return data;
}

}  // namespace

Image quantize8(const Image& img) {
  auto q = [](const Mat& m) {
    return m.unaryExpr([](real v) { return real(to_byte(v)) / real(255); })
        .eval();
  };
  return {q(img.r), q(img.g), q(img.b)};
}

void write_png(const std::string& path, const Image& img) {
  const int rows = img.rows(), cols = img.cols();
  std::vector<uint8_t> data(size_t(rows) * cols * 3);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const size_t o = (size_t(i) * cols + j) * 3;
      data[o] = to_byte(img.r(i, j));
      data[o + 1] = to_byte(img.g(i, j));
      data[o + 2] = to_byte(img.b(i, j));
    }
  write_png_impl(path, rows, cols, 3, data);
}

void write_png_gray(const std::string& path, const Mat& gray) {
  const int rows = static_cast<int>(gray.rows());
  const int cols = static_cast<int>(gray.cols());
  std::vector<uint8_t> data(size_t(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      data[size_t(i) * cols + j] = to_byte(gray(i, j));
  write_png_impl(path, rows, cols, 1, data);
}

Image read_png(const std::string& path) {
  int rows, cols;
  std::vector<uint8_t> data = read_png_impl(path, rows, cols, 3);
  Image img = Image::zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const size_t o = (size_t(i) * cols + j) * 3;
      img.r(i, j) = real(data[o]) / 255;
      img.g(i, j) = real(data[o + 1]) / 255;
      img.b(i, j) = real(data[o + 2]) / 255;
    }
  return img;
}

Mat read_png_gray(const std::string& path) {
  int rows, cols;
  std::vector<uint8_t> data = read_png_impl(path, rows, cols, 1);
  Mat gray(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      gray(i, j) = real(data[size_t(i) * cols + j]) / 255;
  return gray;
}

}  // namespace dusk
