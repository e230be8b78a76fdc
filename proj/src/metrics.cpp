#include "dusk/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dusk {

namespace {

void check_sizes(const Image& a, const Image& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(who) + ": image size mismatch");
}

Vec gaussian_kernel(int size, real sigma) {
  Vec k(size);
  const int c = size / 2;
  for (int i = 0; i < size; ++i)
    k[i] = std::exp(-real((i - c) * (i - c)) / (2 * sigma * sigma));
  return k / k.sum();
}

// separable valid-region filtering
Mat filter_valid(const Mat& x, const Vec& k) {
  const int n = static_cast<int>(k.size());
  Mat tmp(x.rows(), x.cols() - n + 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < tmp.cols(); ++j)
      tmp(i, j) = x.row(i).segment(j, n).dot(k);
  Mat out(x.rows() - n + 1, tmp.cols());
  for (Eigen::Index j = 0; j < tmp.cols(); ++j)
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      out(i, j) = tmp.col(j).segment(i, n).dot(k);
  return out;
}

real ssim_channel(const Mat& x, const Mat& y, const Vec& k) {
  constexpr real c1 = real(0.01) * real(0.01);
  constexpr real c2 = real(0.03) * real(0.03);
  const Mat mx = filter_valid(x, k);
  const Mat my = filter_valid(y, k);
  const Mat mx2 = mx.cwiseProduct(mx);
  const Mat my2 = my.cwiseProduct(my);
  const Mat mxy = mx.cwiseProduct(my);
  const Mat sx2 = filter_valid(x.cwiseProduct(x), k) - mx2;
  const Mat sy2 = filter_valid(y.cwiseProduct(y), k) - my2;
  const Mat sxy = filter_valid(x.cwiseProduct(y), k) - mxy;
  const Mat num =
      (2 * mxy.array() + c1) * (2 * sxy.array() + c2);
  const Mat den =
      (mx2.array() + my2.array() + c1) * (sx2.array() + sy2.array() + c2);
  return (num.array() / den.array()).mean();
}

}  // namespace

real psnr(const Image& a, const Image& b) {
  check_sizes(a, b, "psnr");
  const real n = real(3) * a.rows() * a.cols();
  const real mse = ((a.r - b.r).squaredNorm() + (a.g - b.g).squaredNorm() +
                    (a.b - b.b).squaredNorm()) /
                   n;
  if (mse <= 0) return kPsnrCap;
  return std::min(kPsnrCap, real(10) * std::log10(real(1) / mse));
}

real ssim(const Image& a, const Image& b) {
  check_sizes(a, b, "ssim");
  if (a.rows() < 11 || a.cols() < 11)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");
  const Vec k = gaussian_kernel(11, real(1.5));
  return (ssim_channel(a.r, b.r, k) + ssim_channel(a.g, b.g, k) +
          ssim_channel(a.b, b.b, k)) /
         3;
}

MetricReport evaluate(const std::vector<Image>& renders,
                      const std::vector<Image>& references) {
  if (renders.size() != references.size())
    throw std::invalid_argument("evaluate: view count mismatch");
  MetricReport rep;
  for (size_t i = 0; i < renders.size(); ++i) {
    rep.psnr_per_view.push_back(psnr(renders[i], references[i]));
    rep.ssim_per_view.push_back(ssim(renders[i], references[i]));
    rep.mean_psnr += rep.psnr_per_view.back();
    rep.mean_ssim += rep.ssim_per_view.back();
  }
  if (!renders.empty()) {
    rep.mean_psnr /= real(renders.size());
    rep.mean_ssim /= real(renders.size());
  }
  return rep;
}

std::string format_report(const MetricReport& report) {
  std::ostringstream os;
  os << "view\tpsnr\tssim\n";
  os.precision(4);
  os << std::fixed;
  for (size_t i = 0; i < report.psnr_per_view.size(); ++i)
    os << i << "\t" << report.psnr_per_view[i] << "\t"
       << report.ssim_per_view[i] << "\n";
  os << "mean\t" << report.mean_psnr << "\t" << report.mean_ssim << "\n";
  return os.str();
}

}  // namespace dusk
