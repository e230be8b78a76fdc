#pragma once

#include <string>
#include <vector>

#include "dusk/image.hpp"

namespace dusk {

inline constexpr real kPsnrCap = real(99);

// 10 log10(1 / MSE) on [0,1] images, capped at 99 dB for zero error.
real psnr(const Image& a, const Image& b);

// Mean SSIM over an 11x11 Gaussian window (sigma 1.5), standard stabilizers
// C1 = 0.01^2, C2 = 0.03^2, averaged over channels.
real ssim(const Image& a, const Image& b);

struct MetricReport {
  std::vector<real> psnr_per_view;
  std::vector<real> ssim_per_view;
  real mean_psnr = 0;
  real mean_ssim = 0;
};

MetricReport evaluate(const std::vector<Image>& renders,
                      const std::vector<Image>& references);

std::string format_report(const MetricReport& report);

}  // namespace dusk
