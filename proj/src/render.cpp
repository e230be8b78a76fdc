#include "dusk/render.hpp"

#include <cmath>
#include <stdexcept>

namespace dusk {

Vec stratified_samples(real near, real far, int n, bool jitter,
                       std::mt19937_64& rng) {
  if (!(near < far) || n < 1)
    throw std::invalid_argument("stratified_samples: bad arguments");
  const real w = (far - near) / real(n);
  Vec t(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const real frac = jitter ? real(u(rng)) : real(0.5);
    t[i] = near + (real(i) + frac) * w;
  }
  return t;
}

Vec hierarchical_resample(const Vec& weights, real near, real far, int n_fine,
                          std::mt19937_64& rng) {
  const int nb = static_cast<int>(weights.size());
  if (nb < 1 || n_fine < 1)
    throw std::invalid_argument("hierarchical_resample: bad arguments");
  if ((weights.array() < 0).any())
    throw std::invalid_argument("hierarchical_resample: negative weight");

  Vec pdf;
  const real total = weights.sum();
  if (total <= 0) {
    pdf = Vec::Constant(nb, real(1) / real(nb));
  } else {
    pdf = weights / total;
  }
  Vec cdf(nb + 1);
  cdf[0] = 0;
  for (int i = 0; i < nb; ++i) cdf[i + 1] = cdf[i] + pdf[i];
  cdf[nb] = 1;

  const real bin_w = (far - near) / real(nb);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Vec out(n_fine);
  for (int k = 0; k < n_fine; ++k) {
    const real u = real(dist(rng));
    int lo = 0, hi = nb;
    while (lo + 1 < hi) {
      const int mid = (lo + hi) / 2;
      (cdf[mid] <= u ? lo : hi) = mid;
    }
    const real span = cdf[lo + 1] - cdf[lo];
    const real frac = span > 0 ? (u - cdf[lo]) / span : real(0.5);
    out[k] = near + (real(lo) + frac) * bin_w;
  }
  std::sort(out.data(), out.data() + out.size());
  return out;
}

Vec merge_sorted(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  std::merge(a.data(), a.data() + a.size(), b.data(), b.data() + b.size(),
             out.data());
  return out;
}

RenderResult volume_render(const Vec& t, real far, const Mat& colors,
                           const Vec& sigma) {
  const int n = static_cast<int>(t.size());
  if (colors.rows() != n || sigma.size() != n)
    throw std::invalid_argument("volume_render: shape mismatch");
  const Vec delta = interval_widths(t, far);
  RenderResult out;
  out.weights.resize(n);
  out.transmittance.resize(n);
  real acc = 0;
  for (int i = 0; i < n; ++i) {
    const real trans = std::exp(-acc);
    const real alpha = real(1) - std::exp(-sigma[i] * delta[i]);
    out.transmittance[i] = trans;
    out.weights[i] = trans * alpha;
    out.color += out.weights[i] * colors.row(i).transpose();
    acc += sigma[i] * delta[i];
  }
  return out;
}

Tape::Id volume_render_graph(Tape& t, Tape::Id sigma, Tape::Id color,
                             const Mat& delta, Tape::Id* weights_out) {
  const int rays = static_cast<int>(delta.rows());
  const int n = static_cast<int>(delta.cols());
  if (t.rows(sigma) != rays * n || t.cols(sigma) != 1 ||
      t.rows(color) != rays * n || t.cols(color) != 3)
    throw std::invalid_argument("volume_render_graph: shape mismatch");

  const Tape::Id sig = t.reshape(sigma, rays, n);
  const Tape::Id a = t.mul(sig, t.constant(delta));
  const Tape::Id trans = t.exp(t.scale_const(t.cumsum_excl_rows(a), -1));
  const Tape::Id alpha =
      t.sub(t.constant(Mat::Ones(rays, n)), t.exp(t.scale_const(a, -1)));
  const Tape::Id w = t.mul(trans, alpha);
  if (weights_out) *weights_out = w;

  Tape::Id out = -1;
  for (int ch = 0; ch < 3; ++ch) {
    const Tape::Id cch = t.reshape(t.block(color, 0, ch, rays * n, 1), rays, n);
    const Tape::Id pix = t.row_sum(t.mul(w, cch));
    out = ch == 0 ? pix : t.concat_cols(out, pix);
  }
  return out;
}

}  // namespace dusk
