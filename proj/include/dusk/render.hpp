#pragma once

#include <random>

#include "dusk/tape.hpp"
#include "dusk/types.hpp"

namespace dusk {

// One distance per equal-width bin of [near, far]: bin midpoints without
// jitter, uniform within each bin with jitter.
Vec stratified_samples(real near, real far, int n, bool jitter,
                       std::mt19937_64& rng);

// Inverse-CDF draws from the piecewise-constant density given by the coarse
// per-bin weights over [near, far]. All-zero weights fall back to uniform.
Vec hierarchical_resample(const Vec& weights, real near, real far, int n_fine,
                          std::mt19937_64& rng);

// Ascending merge of two sorted sample vectors.
Vec merge_sorted(const Vec& a, const Vec& b);

inline Vec interval_widths(const Vec& t, real far) {
  const int n = static_cast<int>(t.size());
  Vec delta(n);
  for (int i = 0; i + 1 < n; ++i) delta[i] = t[i + 1] - t[i];
  delta[n - 1] = far - t[n - 1];
  return delta;
}

struct RenderResult {
  Vec3 color = Vec3::Zero();
  Vec weights;
  Vec transmittance;
};

// Emission-absorption compositing:
//   T_i = exp(-sum_{j<i} sigma_j delta_j), w_i = T_i (1 - exp(-sigma_i delta_i))
RenderResult volume_render(const Vec& t, real far, const Mat& colors,
                           const Vec& sigma);

// Same compositing on the tape, batched over rays. sigma is (R*N) x 1 and
// color (R*N) x 3 in ray-major sample order; delta is the R x N width matrix.
// Returns the R x 3 pixel colors; optionally exposes the R x N weights node.
Tape::Id volume_render_graph(Tape& t, Tape::Id sigma, Tape::Id color,
                             const Mat& delta, Tape::Id* weights_out = nullptr);

}  // namespace dusk
