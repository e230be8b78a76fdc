#pragma once

#include "dusk/image.hpp"
#include "dusk/types.hpp"

namespace dusk {

// Centered 2D spectra: dft2 is the unnormalized forward transform with the
// DC coefficient shifted to (rows/2, cols/2); idft2 undoes the shift and
// applies the 1/(MN) normalization, returning the real part.

CMat dft2(const Mat& x);
Mat idft2(const CMat& y);

// Zeroes every centered coefficient farther than `radius` index units from
// the DC bin.
CMat lowpass(const CMat& y, real radius);

// Binary informative-region mask: grayscale -> dft2 -> lowpass(radius) ->
// idft2, then 1 where value*255 >= threshold. threshold is on the 0..255
// scale.
Mat ctp_mask(const Image& img, real radius, real threshold);

// Plain intensity-threshold mask on the grayscale image (no frequency
// filtering), for comparison.
Mat intensity_mask(const Image& img, real threshold);

}  // namespace dusk
