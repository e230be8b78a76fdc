#pragma once

#include "dusk/tape.hpp"
#include "dusk/types.hpp"

namespace dusk {

// NeRF-style frequency encoding: per frequency j in [0, n_freq) the pair
// (sin(2^j pi p), cos(2^j pi p)), optionally prefixed by p itself.
struct EncodingConfig {
  int n_freq = 10;
  bool include_input = true;

  int encoded_width(int input_dim) const {
    return input_dim * (2 * n_freq + (include_input ? 1 : 0));
  }
};

// Batched: P is N x d, result N x encoded_width(d).
inline Mat positional_encode(const Mat& p, const EncodingConfig& cfg) {
  const int d = static_cast<int>(p.cols());
  Mat out(p.rows(), cfg.encoded_width(d));
  int c = 0;
  if (cfg.include_input) {
    out.leftCols(d) = p;
    c = d;
  }
  for (int j = 0; j < cfg.n_freq; ++j) {
    const real f = std::pow(real(2), j) * real(EIGEN_PI);
    out.middleCols(c, d) = (f * p).array().sin();
    out.middleCols(c + d, d) = (f * p).array().cos();
    c += 2 * d;
  }
  return out;
}

inline Vec positional_encode(const Vec& p, const EncodingConfig& cfg) {
  return positional_encode(Mat(p.transpose()), cfg).transpose();
}

inline Tape::Id positional_encode(Tape& t, Tape::Id p, const EncodingConfig& cfg) {
  Tape::Id out = -1;
  auto append = [&](Tape::Id x) { out = out < 0 ? x : t.concat_cols(out, x); };
  if (cfg.include_input) append(p);
  for (int j = 0; j < cfg.n_freq; ++j) {
    const real f = std::pow(real(2), j) * real(EIGEN_PI);
    const Tape::Id fp = t.scale_const(p, f);
    append(t.sin(fp));
    append(t.cos(fp));
  }
  if (out < 0) out = t.block(p, 0, 0, t.rows(p), 0);
  return out;
}

}  // namespace dusk
