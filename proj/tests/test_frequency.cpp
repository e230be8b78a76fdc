#include <doctest.h>

#include <random>

#include "dusk/frequency.hpp"

using namespace dusk;

namespace {

// brute-force quadruple-loop DFT oracle, centered the same way
CMat dft2_oracle(const Mat& x) {
  const int m = static_cast<int>(x.rows()), n = static_cast<int>(x.cols());
  CMat y(m, n);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < n; ++v) {
      std::complex<real> acc = 0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          const real ang = -2 * real(EIGEN_PI) *
                           (real(u) * i / m + real(v) * j / n);
          acc += x(i, j) * std::complex<real>(std::cos(ang), std::sin(ang));
        }
      y((u + m / 2) % m, (v + n / 2) % n) = acc;
    }
  return y;
}

}  // namespace

TEST_CASE("dft2 closed-form spectra") {
  SUBCASE("constant image concentrates at DC") {
    const real v = real(0.37);
    CMat y = dft2(Mat::Constant(6, 10, v));
    for (int u = 0; u < 6; ++u)
      for (int w = 0; w < 10; ++w) {
        if (u == 3 && w == 5)
          CHECK(std::abs(y(u, w) - std::complex<real>(60 * v)) < 1e-9);
        else
          CHECK(std::abs(y(u, w)) < 1e-9);
      }
  }

  SUBCASE("unit impulse at the origin is flat with magnitude 1") {
    Mat x = Mat::Zero(8, 8);
    x(0, 0) = 1;
    CMat y = dft2(x);
    for (int u = 0; u < 8; ++u)
      for (int v = 0; v < 8; ++v) CHECK(std::abs(std::abs(y(u, v)) - 1) < 1e-12);
  }

  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(dft2(Mat()), std::invalid_argument);
  }
}

TEST_CASE("dft2 matches the quadruple-loop oracle") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto [m, n] : {std::pair{8, 8}, std::pair{16, 12}}) {
    Mat x(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) x(i, j) = real(u(rng));
    CMat got = dft2(x);
    CMat want = dft2_oracle(x);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("round trip reproduces the input") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat x(16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) x(i, j) = real(u(rng));
  CHECK((idft2(dft2(x)) - x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("lowpass radius behavior") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat x(12, 16);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 16; ++j) x(i, j) = real(u(rng));
  CMat y = dft2(x);

  SUBCASE("radius past the diagonal is all-pass") {
    CMat f = lowpass(y, 100);
    CHECK((f - y).cwiseAbs().maxCoeff() == 0);
  }

  SUBCASE("radius 0 keeps only DC; inverse is the channel mean") {
    Mat back = idft2(lowpass(y, 0));
    CHECK((back.array() - x.mean()).abs().maxCoeff() < 1e-9);
  }

  SUBCASE("energy outside the radius is exactly zero") {
    const real r = 3;
    CMat f = lowpass(y, r);
    for (int uu = 0; uu < 12; ++uu)
      for (int vv = 0; vv < 16; ++vv) {
        const real du = real(uu - 6), dv = real(vv - 8);
        if (std::sqrt(du * du + dv * dv) > r) CHECK(std::abs(f(uu, vv)) == 0);
      }
  }

  SUBCASE("idempotence") {
    CMat once = lowpass(y, 4);
    CMat twice = lowpass(once, 4);
    CHECK((once - twice).cwiseAbs().maxCoeff() == 0);
  }

  SUBCASE("negative radius rejected") {
    CHECK_THROWS_AS(lowpass(y, -1), std::invalid_argument);
  }
}

TEST_CASE("ctp_mask flat fields") {
  Image bright = Image::constant(16, 16, real(200) / 255);
  Mat m1 = ctp_mask(bright, 5, 48);
  CHECK((m1.array() == 1).all());

  Image dark = Image::constant(16, 16, real(10) / 255);
  Mat m0 = ctp_mask(dark, 5, 48);
  CHECK((m0.array() == 0).all());

  CHECK_THROWS_AS(ctp_mask(bright, 5, 300), std::invalid_argument);
}

TEST_CASE("mask is monotone in the threshold") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img = Image::zero(20, 24);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 24; ++j)
      img.set_pixel(i, j, Vec3(real(u(rng)), real(u(rng)), real(u(rng))));
  Mat lo = ctp_mask(img, 6, 40);
  Mat hi = ctp_mask(img, 6, 80);
  // raising T never turns a 0 into a 1
  CHECK(((hi.array() == 1) && (lo.array() == 0)).count() == 0);
}

TEST_CASE("frequency mask excludes bright high-frequency noise") {
  // dark field with salt noise plus one smooth bright disk
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 48;
  Image img = Image::constant(n, n, real(10) / 255);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const real di = real(i - 14), dj = real(j - 14);
      if (std::sqrt(di * di + dj * dj) < 8)
        img.set_pixel(i, j, Vec3::Constant(real(200) / 255));
      else if (u(rng) < 0.08)
        img.set_pixel(i, j, Vec3::Constant(1));
    }
  Mat plain = intensity_mask(img, 48);
  Mat freq = ctp_mask(img, 8, 48);
  int pass_plain = 0, excluded = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (plain(i, j) == 1) {
        ++pass_plain;
        if (freq(i, j) == 0) ++excluded;
      }
  CHECK(pass_plain > 0);
  CHECK(real(excluded) / real(pass_plain) >= real(0.2));
}
