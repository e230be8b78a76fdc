#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dusk/geometry.hpp"
#include "dusk/image.hpp"

namespace dusk {

// Small analytic scene: lambert-shaded spheres and boxes over a checkered
// ground plane. Deterministic given camera and scene.
struct ToyScene {
  struct Sphere {
    Vec3 center = Vec3::Zero();
    real radius = 1;
    Vec3 color = Vec3::Ones();
  };
  struct Box {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Ones();
    Vec3 color = Vec3::Ones();
  };

  std::vector<Sphere> spheres;
  std::vector<Box> boxes;
  real plane_z = 0;  // ground plane z = plane_z, normal +z
  Vec3 plane_color_a = Vec3(real(0.85), real(0.8), real(0.7));
  Vec3 plane_color_b = Vec3(real(0.25), real(0.3), real(0.35));
  real checker_size = real(0.5);
  Vec3 background = Vec3(real(0.55), real(0.65), real(0.8));
  Vec3 light_dir = Vec3(real(0.4), real(0.3), real(1)).normalized();

  static ToyScene standard();
  real diameter() const;
};

// Depth holds per-pixel z-depth at the hit point (the convention of
// project()); misses get the background color and depth = far.
void render_toy_scene(const ToyScene& scene, const Camera& cam, Image& rgb,
                      Mat& depth);

// Brightening preprocessing: per-channel power law, then optional
// 256-bin per-channel histogram equalization; clamped to [0,1].
Image scale_up(const Image& img, real gamma, bool equalize);

// Bisects the exponent so the post-gamma mean intensity hits `target_mean`.
real auto_gamma(const Image& img, real target_mean = real(0.4));

inline Image scale_up_auto(const Image& img, bool equalize = true) {
  return scale_up(img, auto_gamma(img), equalize);
}

struct DegradeSpec {
  real gamma_d = real(2.2);  // > 1 darkens
  real gain = real(0.12);    // multiplicative exposure loss
  real sigma_g = real(0.02);     // constant noise std
  real sigma_p = real(0.01);     // signal-dependent variance coefficient
  real sigma_lf = 0;             // low-frequency per-view noise std
  int lf_cells = 6;              // coarse grid behind the low-frequency field
  std::vector<Camera> trajectory;  // exposure path of the shaken view
};

// Darken each frame, average over the exposure (blur), then add white
// noise so it stays sharp, plus an optional smooth per-view component
// (bilinear upsample of a coarse Gaussian grid) mimicking the blotchy
// low-frequency chroma error of low-light camera pipelines; clamped to
// [0,1].
Image synth_degrade(const std::vector<Image>& frames, const DegradeSpec& spec,
                    uint64_t seed);

ScrewMotion random_screw(real max_rot, real max_trans, std::mt19937_64& rng);

// Exposure path centered on the nominal pose: frame p applies the screw
// scaled by p/(frames-1) - 1/2.
std::vector<Camera> shake_trajectory(const Camera& cam,
                                     const ScrewMotion& screw, int frames);

}  // namespace dusk
