#include "dusk/degrade.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dusk {

namespace {

struct Hit {
  real t = std::numeric_limits<real>::infinity();
  Vec3 normal = Vec3::Zero();
  Vec3 color = Vec3::Zero();
  bool valid() const { return std::isfinite(t); }
};

void hit_sphere(const ToyScene::Sphere& s, const Vec3& o, const Vec3& d,
                Hit& best) {
  const Vec3 oc = o - s.center;
  const real b = oc.dot(d);
  const real c = oc.squaredNorm() - s.radius * s.radius;
  const real disc = b * b - c;
  if (disc < 0) return;
  const real sq = std::sqrt(disc);
  real t = -b - sq;
  if (t <= real(1e-6)) t = -b + sq;
  if (t <= real(1e-6) || t >= best.t) return;
  best.t = t;
  best.normal = (o + t * d - s.center).normalized();
  best.color = s.color;
}

void hit_box(const ToyScene::Box& box, const Vec3& o, const Vec3& d,
             Hit& best) {
  real t0 = real(1e-6), t1 = best.t;
  int axis = -1;
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0) {
      if (o[a] < box.lo[a] || o[a] > box.hi[a]) return;
      continue;
    }
    real ta = (box.lo[a] - o[a]) / d[a];
    real tb = (box.hi[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    if (ta > t0) {
      t0 = ta;
      axis = a;
    }
    t1 = std::min(t1, tb);
    if (t0 > t1) return;
  }
  if (axis < 0) return;
  best.t = t0;
  best.normal = Vec3::Zero();
  const Vec3 p = o + t0 * d;
  best.normal[axis] =
      p[axis] > (box.lo[axis] + box.hi[axis]) / 2 ? real(1) : real(-1);
  best.color = box.color;
}

void hit_plane(const ToyScene& scene, const Vec3& o, const Vec3& d, Hit& best) {
  if (d.z() == 0) return;
  const real t = (scene.plane_z - o.z()) / d.z();
  if (t <= real(1e-6) || t >= best.t) return;
  const Vec3 p = o + t * d;
  const int parity =
      (static_cast<int>(std::floor(p.x() / scene.checker_size)) +
       static_cast<int>(std::floor(p.y() / scene.checker_size))) &
      1;
  best.t = t;
  best.normal = Vec3(0, 0, 1);
  best.color = parity ? scene.plane_color_b : scene.plane_color_a;
}

Mat darken_channel(const Mat& v, real gamma_d, real gain) {
  return gain * v.cwiseMax(real(0)).array().pow(gamma_d).matrix();
}

Mat equalize_channel(const Mat& v) {
  constexpr int kBins = 256;
  int hist[kBins] = {};
  const Eigen::Index n = v.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    int b = static_cast<int>(v(i) * kBins);
    hist[std::min(std::max(b, 0), kBins - 1)]++;
  }
  real cdf[kBins];
  long acc = 0;
  for (int b = 0; b < kBins; ++b) {
    acc += hist[b];
    cdf[b] = real(acc) / real(n);
  }
  Mat out = v;
  for (Eigen::Index i = 0; i < n; ++i) {
    int b = static_cast<int>(v(i) * kBins);
    out(i) = cdf[std::min(std::max(b, 0), kBins - 1)];
  }
  return out;
}

}  // namespace

ToyScene ToyScene::standard() {
  ToyScene s;
  s.spheres.push_back({Vec3(real(-0.5), real(0.2), real(0.35)), real(0.35),
                       Vec3(real(0.9), real(0.25), real(0.2))});
  s.spheres.push_back({Vec3(real(0.55), real(-0.3), real(0.25)), real(0.25),
                       Vec3(real(0.2), real(0.45), real(0.9))});
  s.spheres.push_back({Vec3(real(0.1), real(0.55), real(0.2)), real(0.2),
                       Vec3(real(0.95), real(0.85), real(0.3))});
  s.boxes.push_back({Vec3(real(-0.15), real(-0.55), real(0)),
                     Vec3(real(0.25), real(-0.15), real(0.5)),
                     Vec3(real(0.3), real(0.8), real(0.35))});
  return s;
}

real ToyScene::diameter() const {
  Vec3 lo = Vec3::Constant(-1), hi = Vec3::Constant(1);
  for (const Sphere& s : spheres) {
    lo = lo.cwiseMin(s.center - Vec3::Constant(s.radius));
    hi = hi.cwiseMax(s.center + Vec3::Constant(s.radius));
  }
  for (const Box& b : boxes) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  return (hi - lo).norm();
}

void render_toy_scene(const ToyScene& scene, const Camera& cam, Image& rgb,
                      Mat& depth) {
  rgb = Image::zero(cam.height, cam.width);
  depth = Mat::Constant(cam.height, cam.width, cam.far);
  const Mat3 rt = cam.rotation().transpose();
  for (int i = 0; i < cam.height; ++i)
    for (int j = 0; j < cam.width; ++j) {
      const Ray ray = camera_ray(cam, real(i) + real(0.5), real(j) + real(0.5));
      Hit hit;
      for (const ToyScene::Sphere& s : scene.spheres)
        hit_sphere(s, ray.origin, ray.dir, hit);
      for (const ToyScene::Box& b : scene.boxes)
        hit_box(b, ray.origin, ray.dir, hit);
      hit_plane(scene, ray.origin, ray.dir, hit);
      if (!hit.valid()) {
        rgb.set_pixel(i, j, scene.background);
        continue;
      }
      const real lambert =
          std::max(real(0.25), hit.normal.dot(scene.light_dir));
      rgb.set_pixel(i, j, (lambert * hit.color).cwiseMin(real(1)));
      const Vec3 p_cam = rt * (ray.origin + hit.t * ray.dir - cam.center());
      depth(i, j) = -p_cam.z();
    }
}

Image scale_up(const Image& img, real gamma, bool equalize) {
  if (gamma <= 0) throw std::invalid_argument("scale_up: gamma must be > 0");
  auto one = [&](const Mat& v) {
    Mat out = v.cwiseMax(real(0)).array().pow(gamma).matrix();
    if (equalize) out = equalize_channel(out);
    return out.cwiseMax(real(0)).cwiseMin(real(1)).eval();
  };
  return {one(img.r), one(img.g), one(img.b)};
}

real auto_gamma(const Image& img, real target_mean) {
  auto mean_at = [&](real g) {
    return (img.r.cwiseMax(real(0)).array().pow(g).mean() +
            img.g.cwiseMax(real(0)).array().pow(g).mean() +
            img.b.cwiseMax(real(0)).array().pow(g).mean()) /
           3;
  };
  // mean is decreasing in gamma on [0,1] images
  real lo = real(0.01), hi = 10;
  for (int it = 0; it < 80; ++it) {
    const real mid = (lo + hi) / 2;
    if (mean_at(mid) > target_mean)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

Image synth_degrade(const std::vector<Image>& frames, const DegradeSpec& spec,
                    uint64_t seed) {
  if (frames.empty())
    throw std::invalid_argument("synth_degrade: no exposure frames");
  const int rows = frames[0].rows(), cols = frames[0].cols();
  for (const Image& f : frames)
    if (f.rows() != rows || f.cols() != cols)
      throw std::invalid_argument("synth_degrade: frame size mismatch");

  Image out = Image::zero(rows, cols);
  for (const Image& f : frames) {
    out.r += darken_channel(f.r, spec.gamma_d, spec.gain);
    out.g += darken_channel(f.g, spec.gamma_d, spec.gain);
    out.b += darken_channel(f.b, spec.gamma_d, spec.gain);
  }
  const real inv_p = real(1) / real(frames.size());
  out.r *= inv_p;
  out.g *= inv_p;
  out.b *= inv_p;

  // white noise on the blurred signal: variance sigma_g^2 + sigma_p * v
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto add_noise = [&](Mat& v) {
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const real var = spec.sigma_g * spec.sigma_g +
                         spec.sigma_p * std::max(v(i, j), real(0));
        v(i, j) += std::sqrt(var) * real(gauss(rng));
      }
  };
  if (spec.sigma_g > 0 || spec.sigma_p > 0) {
    add_noise(out.r);
    add_noise(out.g);
    add_noise(out.b);
  }
  if (spec.sigma_lf > 0) {
    if (spec.lf_cells < 2)
      throw std::invalid_argument(
          "synth_degrade: the low-frequency grid needs at least 2 cells");
    const int c = spec.lf_cells;
    auto add_blotch = [&](Mat& v) {
      Mat coarse(c, c);
      for (int a = 0; a < c; ++a)
        for (int b = 0; b < c; ++b)
          coarse(a, b) = spec.sigma_lf * real(gauss(rng));
      for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
          const real y = real(i) / real(v.rows() - 1) * real(c - 1);
          const real x = real(j) / real(v.cols() - 1) * real(c - 1);
          const int y0 = std::min(static_cast<int>(y), c - 2);
          const int x0 = std::min(static_cast<int>(x), c - 2);
          const real fy = y - real(y0), fx = x - real(x0);
          v(i, j) += (1 - fy) * ((1 - fx) * coarse(y0, x0) +
                                 fx * coarse(y0, x0 + 1)) +
                     fy * ((1 - fx) * coarse(y0 + 1, x0) +
                           fx * coarse(y0 + 1, x0 + 1));
        }
    };
    add_blotch(out.r);
    add_blotch(out.g);
    add_blotch(out.b);
  }
  return out.clamped();
}

ScrewMotion random_screw(real max_rot, real max_trans, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto ball = [&] {
    Vec3 v;
    do {
      v = Vec3(real(u(rng)), real(u(rng)), real(u(rng)));
    } while (v.squaredNorm() > 1);
    return v;
  };
  ScrewMotion s;
  s.r = max_rot * ball();
  s.v = max_trans * ball();
  return s;
}

std::vector<Camera> shake_trajectory(const Camera& cam,
                                     const ScrewMotion& screw, int frames) {
  if (frames < 1)
    throw std::invalid_argument("shake_trajectory: need at least one frame");
  std::vector<Camera> out;
  out.reserve(static_cast<size_t>(frames));
  for (int p = 0; p < frames; ++p) {
    const real f =
        frames == 1 ? 0 : real(p) / real(frames - 1) - real(0.5);
    ScrewMotion scaled;
    scaled.r = f * screw.r;
    scaled.v = f * screw.v;
    const RigidTransform tf = se3_exp(scaled);
    Camera shaken = cam;
    shaken.pose.leftCols<3>() = tf.rot * cam.rotation();
    shaken.pose.col(3) = tf.apply_point(cam.center());
    out.push_back(shaken);
  }
  return out;
}

}  // namespace dusk
