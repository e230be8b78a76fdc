#include "dusk/frequency.hpp"

#include <cmath>
#include <stdexcept>

namespace dusk {

namespace {

using Complex = std::complex<real>;

// F(u, m) = exp(-2 pi i u m / n)
CMat fourier_matrix(int n, bool inverse) {
  CMat f(n, n);
  const real sign = inverse ? real(1) : real(-1);
  for (int u = 0; u < n; ++u)
    for (int m = 0; m < n; ++m) {
      const real ang = sign * 2 * real(EIGEN_PI) * real(u) * real(m) / real(n);
      f(u, m) = Complex(std::cos(ang), std::sin(ang));
    }
  return f;
}

CMat shift_center(const CMat& y) {
  const int m = static_cast<int>(y.rows()), n = static_cast<int>(y.cols());
  CMat out(m, n);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < n; ++v)
      out((u + m / 2) % m, (v + n / 2) % n) = y(u, v);
  return out;
}

CMat unshift_center(const CMat& y) {
  const int m = static_cast<int>(y.rows()), n = static_cast<int>(y.cols());
  CMat out(m, n);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < n; ++v)
      out(u, v) = y((u + m / 2) % m, (v + n / 2) % n);
  return out;
}

}  // namespace

CMat dft2(const Mat& x) {
  if (x.size() == 0) throw std::invalid_argument("dft2: empty array");
  const int m = static_cast<int>(x.rows()), n = static_cast<int>(x.cols());
  const CMat fm = fourier_matrix(m, false);
  const CMat fn = fourier_matrix(n, false);
  return shift_center(fm * x.cast<Complex>() * fn.transpose());
}

Mat idft2(const CMat& y) {
  const int m = static_cast<int>(y.rows()), n = static_cast<int>(y.cols());
  const CMat fm = fourier_matrix(m, true);
  const CMat fn = fourier_matrix(n, true);
  const CMat x = fm * unshift_center(y) * fn.transpose() / real(m * n);
  return x.real();
}

CMat lowpass(const CMat& y, real radius) {
  if (radius < 0) throw std::invalid_argument("lowpass: negative radius");
  const int m = static_cast<int>(y.rows()), n = static_cast<int>(y.cols());
  CMat out = y;
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < n; ++v) {
      const real du = real(u - m / 2), dv = real(v - n / 2);
      if (std::sqrt(du * du + dv * dv) > radius) out(u, v) = 0;
    }
  return out;
}

Mat ctp_mask(const Image& img, real radius, real threshold) {
  if (threshold < 0 || threshold > 255)
    throw std::invalid_argument("ctp_mask: threshold outside [0,255]");
  const Mat low = idft2(lowpass(dft2(grayscale(img)), radius));
  return low.unaryExpr([threshold](real v) {
    return v * 255 >= threshold ? real(1) : real(0);
  });
}

Mat intensity_mask(const Image& img, real threshold) {
  return grayscale(img).unaryExpr([threshold](real v) {
    return v * 255 >= threshold ? real(1) : real(0);
  });
}

}  // namespace dusk
