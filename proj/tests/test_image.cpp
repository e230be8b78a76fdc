#include <doctest.h>

#include <cstdio>
#include <random>

#include "dusk/image.hpp"
#include "dusk/metrics.hpp"

using namespace dusk;

namespace {

Image random_image(int rows, int cols, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img = Image::zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      img.set_pixel(i, j, Vec3(real(u(rng)), real(u(rng)), real(u(rng))));
  return img;
}

struct TempFile {
  std::string path;
  explicit TempFile(const char* name) : path(std::string("/tmp/dusk_") + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("grayscale weights") {
  Image img = Image::zero(2, 2);
  img.set_pixel(0, 0, Vec3(1, 0, 0));
  img.set_pixel(0, 1, Vec3(0, 1, 0));
  img.set_pixel(1, 0, Vec3(0, 0, 1));
  img.set_pixel(1, 1, Vec3(1, 1, 1));
  Mat y = grayscale(img);
  CHECK(y(0, 0) == doctest::Approx(0.299).epsilon(1e-12));
  CHECK(y(0, 1) == doctest::Approx(0.587).epsilon(1e-12));
  CHECK(y(1, 0) == doctest::Approx(0.114).epsilon(1e-12));
  CHECK(y(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quantize8 snaps to 8-bit levels and is idempotent") {
  Image img = random_image(7, 9, 3);
  Image q = quantize8(img);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 9; ++j) {
      const Vec3 p = q.pixel(i, j);
      for (int c = 0; c < 3; ++c) {
        const real level = std::round(p[c] * 255);
        CHECK(std::abs(p[c] * 255 - level) < 1e-9);
        CHECK(std::abs(p[c] - img.pixel(i, j)[c]) <= real(0.5) / 255 + 1e-12);
      }
    }
  Image qq = quantize8(q);
  CHECK((qq.r - q.r).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("png round trip is exact on quantized data") {
  TempFile f("roundtrip.png");
  Image img = quantize8(random_image(13, 17, 5));
  write_png(f.path, img);
  Image back = read_png(f.path);
  REQUIRE(back.rows() == 13);
  REQUIRE(back.cols() == 17);
  CHECK((back.r - img.r).cwiseAbs().maxCoeff() == 0);
  CHECK((back.g - img.g).cwiseAbs().maxCoeff() == 0);
  CHECK((back.b - img.b).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("grayscale png round trip") {
  TempFile f("gray.png");
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> u(0, 255);
  Mat gray(6, 8);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 8; ++j) gray(i, j) = real(u(rng)) / 255;
  write_png_gray(f.path, gray);
  Mat back = read_png_gray(f.path);
  CHECK((back - gray).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("write clamps out-of-range values") {
  TempFile f("clamp.png");
  Image img = Image::constant(4, 4, real(2.5));
  img.set_pixel(0, 0, Vec3(-1, real(0.5), real(1.5)));
  write_png(f.path, img);
  Image back = read_png(f.path);
  CHECK(back.pixel(0, 0).x() == 0);
  CHECK(back.pixel(0, 0).y() == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(back.pixel(0, 0).z() == 1);
  CHECK(back.pixel(3, 3).x() == 1);
}

TEST_CASE("reading a missing file throws") {
  CHECK_THROWS_AS(read_png("/tmp/dusk_definitely_missing.png"),
                  std::runtime_error);
}

TEST_CASE("psnr closed forms") {
  Image a = random_image(16, 16, 21);
  CHECK(psnr(a, a) == kPsnrCap);

  // uniform offset 0.1 everywhere: MSE = 0.01, PSNR = 20 dB
  Image b = Image::constant(16, 16, real(0.4));
  Image c = Image::constant(16, 16, real(0.5));
  CHECK(psnr(b, c) == doctest::Approx(20.0).epsilon(1e-10));
  CHECK(psnr(b, c) == psnr(c, b));

  Image d = Image::constant(8, 8, 0);
  CHECK_THROWS_AS(psnr(a, d), std::invalid_argument);
}

TEST_CASE("psnr decreases as error grows") {
  Image base = random_image(16, 16, 23);
  real prev = kPsnrCap;
  for (real off : {0.01, 0.05, 0.1, 0.2}) {
    Image noisy = base;
    noisy.r.array() += real(off);
    const real p = psnr(base, noisy);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("ssim behavior") {
  Image a = random_image(24, 24, 31);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  Image shifted = a;
  shifted.r.array() += real(0.2);
  shifted.g.array() += real(0.2);
  shifted.b.array() += real(0.2);
  const real s = ssim(a, shifted.clamped());
  CHECK(s < 1);
  CHECK(s > -1);

  Image tiny = Image::zero(8, 8);
  CHECK_THROWS_AS(ssim(tiny, tiny), std::invalid_argument);
}

TEST_CASE("evaluate aggregates per-view metrics") {
  std::vector<Image> renders{random_image(16, 16, 41), random_image(16, 16, 42)};
  std::vector<Image> refs = renders;
  refs[1].r.array() += real(0.1);
  refs[1] = refs[1].clamped();
  MetricReport rep = evaluate(renders, refs);
  REQUIRE(rep.psnr_per_view.size() == 2);
  CHECK(rep.psnr_per_view[0] == kPsnrCap);
  CHECK(rep.mean_psnr ==
        doctest::Approx((rep.psnr_per_view[0] + rep.psnr_per_view[1]) / 2));
  const std::string txt = format_report(rep);
  CHECK(txt.find("mean") != std::string::npos);

  refs.pop_back();
  CHECK_THROWS_AS(evaluate(renders, refs), std::invalid_argument);
}
