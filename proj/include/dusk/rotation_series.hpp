#pragma once

#include <cmath>

#include "dusk/types.hpp"

namespace dusk {

// Rodrigues / SE(3) left-Jacobian coefficients as entire functions of
// s = theta^2:
//   rot_a = sin(t)/t,  rot_b = (1-cos(t))/t^2,  rot_c = (t-sin(t))/t^3.
// The closed forms cancel catastrophically for small s (1-cos t loses
// ~s digits), so a truncated series takes over below the cut; at s = 1e-2
// the series truncation error is ~1e-18 while the closed forms are exact
// to machine precision, so the branches agree across the cut.
inline constexpr real kRotSeriesCut = real(1e-2);

inline real rot_a_f(real s) {
  if (s < kRotSeriesCut)
    return real(1) - s / 6 + s * s / 120 - s * s * s / 5040 +
           s * s * s * s / 362880;
  const real t = std::sqrt(s);
  return std::sin(t) / t;
}
inline real rot_a_d(real s) {
  if (s < kRotSeriesCut)
    return real(-1) / 6 + s / 60 - s * s / 1680 + s * s * s / 90720;
  const real t = std::sqrt(s);
  return (t * std::cos(t) - std::sin(t)) / (2 * t * t * t);
}
inline real rot_b_f(real s) {
  if (s < kRotSeriesCut)
    return real(0.5) - s / 24 + s * s / 720 - s * s * s / 40320 +
           s * s * s * s / 3628800;
  const real t = std::sqrt(s);
  return (real(1) - std::cos(t)) / s;
}
inline real rot_b_d(real s) {
  if (s < kRotSeriesCut)
    return real(-1) / 24 + s / 360 - s * s / 13440 + s * s * s / 907200;
  const real t = std::sqrt(s);
  return (t * std::sin(t) - 2 * (real(1) - std::cos(t))) / (2 * s * s);
}
inline real rot_c_f(real s) {
  if (s < kRotSeriesCut)
    return real(1) / 6 - s / 120 + s * s / 5040 - s * s * s / 362880 +
           s * s * s * s / 39916800;
  const real t = std::sqrt(s);
  return (t - std::sin(t)) / (s * t);
}
inline real rot_c_d(real s) {
  if (s < kRotSeriesCut)
    return real(-1) / 120 + s / 2520 - s * s / 120960 + s * s * s / 9979200;
  const real t = std::sqrt(s);
  return (t * (real(1) - std::cos(t)) - 3 * (t - std::sin(t))) / (2 * s * s * t);
}

}  // namespace dusk
