#include <doctest.h>

#include <cmath>
#include <random>

#include "dusk/degrade.hpp"

using namespace dusk;

namespace {

Camera down_camera(const Vec3& center, int w = 32, int h = 32, real focal = 24) {
  Camera cam;
  cam.pose.leftCols<3>() = Mat3::Identity();
  cam.pose.col(3) = center;
  cam.focal = focal;
  cam.cx = real(w) / 2;
  cam.cy = real(h) / 2;
  cam.width = w;
  cam.height = h;
  cam.near = real(0.1);
  cam.far = 10;
  return cam;
}

Image random_image(int rows, int cols, uint64_t seed, real lo = 0, real hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Image img = Image::zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      img.set_pixel(i, j, Vec3(real(u(rng)), real(u(rng)), real(u(rng))));
  return img;
}

real lag1_autocorr(const Mat& x) {
  const Mat c = x.array() - x.mean();
  real num = 0, den = 0;
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j + 1 < c.cols(); ++j) {
      num += c(i, j) * c(i, j + 1);
      den += c(i, j) * c(i, j);
    }
  return num / den;
}

}  // namespace

TEST_CASE("power-law brightening") {
  Image img = Image::constant(4, 4, real(0.25));
  Image out = scale_up(img, real(0.5), false);
  CHECK(out.r(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(scale_up(img, 0, false), std::invalid_argument);
}

TEST_CASE("brightening is pixelwise monotone without equalization") {
  Image a = random_image(8, 8, 3);
  Image b = a;
  b.r.array() += real(0.05);
  b = b.clamped();
  Image ua = scale_up(a, real(0.45), false);
  Image ub = scale_up(b, real(0.45), false);
  CHECK(((ub.r - ua.r).array() >= -1e-12).all());
}

TEST_CASE("equalization fixes a uniform histogram") {
  // 256 pixels, one per bin
  Image img = Image::zero(16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const real v = (real(16 * i + j) + real(0.5)) / 256;
      img.set_pixel(i, j, Vec3::Constant(v));
    }
  Image out = scale_up(img, 1, true);
  CHECK((out.r - img.r).cwiseAbs().maxCoeff() <= real(1) / 255);
}

TEST_CASE("auto exponent lifts a dark image to the target mean") {
  Image dark = random_image(24, 24, 7, real(0.01), real(0.09));
  const real g = auto_gamma(dark);
  CHECK(g < 1);
  Image out = scale_up(dark, g, false);
  const real mean = (out.r.mean() + out.g.mean() + out.b.mean()) / 3;
  CHECK(std::abs(mean - real(0.4)) < real(0.05));
}

TEST_CASE("degradation identity case") {
  Image frame = random_image(10, 12, 11);
  DegradeSpec spec;
  spec.gamma_d = 1;
  spec.gain = 1;
  spec.sigma_g = 0;
  spec.sigma_p = 0;
  Image out = synth_degrade({frame}, spec, 0);
  CHECK((out.r - frame.r).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((out.g - frame.g).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((out.b - frame.b).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("averaging identical constant frames leaves the darkened constant") {
  const real v = real(0.6);
  DegradeSpec spec;
  spec.gamma_d = 2;
  spec.gain = real(0.3);
  spec.sigma_g = 0;
  spec.sigma_p = 0;
  std::vector<Image> frames(3, Image::constant(6, 6, v));
  Image out = synth_degrade(frames, spec, 1);
  const real want = spec.gain * v * v;
  CHECK(out.r(2, 3) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("flat-field noise statistics") {
  DegradeSpec spec;
  spec.gamma_d = 1;
  spec.gain = 1;
  spec.sigma_g = real(0.02);
  spec.sigma_p = 0;
  Image out = synth_degrade({Image::constant(100, 100, real(0.5))}, spec, 17);
  const real mean = out.r.mean();
  const real stdev = std::sqrt((out.r.array() - mean).square().mean());
  CHECK(std::abs(stdev - real(0.02)) < real(0.02) * real(0.05));
}

TEST_CASE("low frequency noise component is smooth and off by default") {
  DegradeSpec spec;
  spec.gamma_d = 1;
  spec.gain = 1;
  spec.sigma_g = 0;
  spec.sigma_p = 0;
  const Image flat = Image::constant(64, 64, real(0.5));

  Image plain = synth_degrade({flat}, spec, 4);
  CHECK((plain.r.array() == real(0.5)).all());

  spec.sigma_lf = real(0.05);
  Image out = synth_degrade({flat}, spec, 4);
  Mat resid = out.r - flat.r;
  const real stdev =
      std::sqrt((resid.array() - resid.mean()).square().mean());
  // bilinear interpolation attenuates the grid variance between the nodes
  CHECK(stdev > real(0.015));
  CHECK(stdev < real(0.06));
  // neighbor differences of a smooth field are far below its amplitude;
  // white noise of the same std would put them near std * sqrt(2)
  real diff = 0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j + 1 < 64; ++j)
      diff += std::abs(resid(i, j + 1) - resid(i, j));
  diff /= real(64 * 63);
  CHECK(diff < real(0.25) * stdev);

  spec.lf_cells = 1;
  CHECK_THROWS_AS(synth_degrade({flat}, spec, 4), std::invalid_argument);
}

TEST_CASE("degradation is seed deterministic") {
  Image frame = random_image(12, 12, 19);
  DegradeSpec spec;
  Image a = synth_degrade({frame}, spec, 7);
  Image b = synth_degrade({frame}, spec, 7);
  Image c = synth_degrade({frame}, spec, 8);
  CHECK((a.r - b.r).cwiseAbs().maxCoeff() == 0);
  CHECK((a.g - b.g).cwiseAbs().maxCoeff() == 0);
  CHECK((a.r - c.r).cwiseAbs().maxCoeff() > 0);

  std::vector<Image> bad{frame, Image::constant(5, 5, 0)};
  CHECK_THROWS_AS(synth_degrade(bad, spec, 0), std::invalid_argument);
}

TEST_CASE("noise stays sharp while the image blurs") {
  // exposure frames slide an edge pattern sideways; the injected noise is
  // added after the average so its spatial correlation stays near zero
  const int rows = 48, cols = 64;
  std::vector<Image> frames;
  for (int p = 0; p < 4; ++p) {
    Image f = Image::zero(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        const real v = ((j + p) / 8) % 2 ? real(0.75) : real(0.3);
        f.set_pixel(i, j, Vec3::Constant(v));
      }
    frames.push_back(f);
  }
  DegradeSpec spec;
  spec.gamma_d = 1;
  spec.gain = real(0.8);
  spec.sigma_g = real(0.03);
  spec.sigma_p = 0;

  DegradeSpec clean_spec = spec;
  clean_spec.sigma_g = 0;
  Image noisy = synth_degrade(frames, spec, 23);
  Image blurred = synth_degrade(frames, clean_spec, 23);
  const Mat residual = noisy.r - blurred.r;

  CHECK(std::abs(lag1_autocorr(residual)) < real(0.2));
  CHECK(lag1_autocorr(blurred.r) > real(0.5));
}

TEST_CASE("toy render hits the background with far depth") {
  ToyScene scene = ToyScene::standard();
  Camera cam = down_camera(Vec3(0, 0, 2));
  cam.pose.leftCols<3>() << 1, 0, 0, 0, -1, 0, 0, 0, -1;  // looking up +z
  Image rgb;
  Mat depth;
  render_toy_scene(scene, cam, rgb, depth);
  CHECK((rgb.pixel(5, 5) - scene.background).cwiseAbs().maxCoeff() == 0);
  CHECK(depth(5, 5) == cam.far);
}

TEST_CASE("axial sphere depth equals distance minus radius") {
  ToyScene scene;
  scene.plane_z = -10;
  scene.spheres.push_back({Vec3::Zero(), real(0.5), Vec3(1, 0, 0)});
  Camera cam = down_camera(Vec3(0, 0, 3), 33, 33);
  cam.cx = real(16.5);
  cam.cy = real(16.5);
  Image rgb;
  Mat depth;
  render_toy_scene(scene, cam, rgb, depth);
  // pixel (16,16) center sits exactly on the principal point
  CHECK(depth(16, 16) == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(rgb.pixel(16, 16).x() > 0);
}

TEST_CASE("toy render is deterministic") {
  ToyScene scene = ToyScene::standard();
  Camera cam = down_camera(Vec3(real(0.3), real(-0.2), real(2.5)));
  Image a, b;
  Mat da, db;
  render_toy_scene(scene, cam, a, da);
  render_toy_scene(scene, cam, b, db);
  CHECK((a.r - b.r).cwiseAbs().maxCoeff() == 0);
  CHECK((da - db).cwiseAbs().maxCoeff() == 0);
  CHECK(scene.diameter() > 2);
}

TEST_CASE("shake trajectory brackets the nominal pose") {
  std::mt19937_64 rng(29);
  const real max_rot = real(0.5) * real(EIGEN_PI) / 180;
  const ScrewMotion screw = random_screw(max_rot, real(0.02), rng);
  CHECK(screw.r.norm() <= max_rot);
  CHECK(screw.v.norm() <= real(0.02));

  Camera cam = down_camera(Vec3(0, 0, 2));
  std::vector<Camera> traj = shake_trajectory(cam, screw, 8);
  REQUIRE(traj.size() == 8);
  // ends swing to opposite sides of the nominal center, up to the
  // rotation-translation coupling (second order in the screw)
  const Vec3 d0 = traj.front().center() - cam.center();
  const Vec3 d7 = traj.back().center() - cam.center();
  CHECK((d0 + d7).norm() < screw.r.norm() * screw.v.norm());
  for (const Camera& c : traj)
    CHECK((c.center() - cam.center()).norm() <= real(0.011));
  CHECK_THROWS_AS(shake_trajectory(cam, screw, 0), std::invalid_argument);
}
