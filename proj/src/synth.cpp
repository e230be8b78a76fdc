#include "dusk/synth.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dusk {

namespace {

Mat34 look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - eye).normalized();
  const Vec3 right = forward.cross(up).normalized();
  const Vec3 cam_up = right.cross(forward);
  Mat34 pose;
  pose.col(0) = right;
  pose.col(1) = cam_up;
  pose.col(2) = -forward;  // camera looks down its -z axis
  pose.col(3) = eye;
  return pose;
}

}  // namespace

DatasetManifest synth_dataset(const std::string& dir,
                              const SynthParams& params, uint64_t seed) {
  if (params.views < 1 || params.width < 1 || params.height < 1 ||
      params.frames < 1)
    throw std::invalid_argument("synth: views, size and frames must be >= 1");
  if (params.shake_fraction < 0 || params.shake_fraction > 1)
    throw std::invalid_argument("synth: shake_fraction must be in [0,1]");

  const ToyScene scene = ToyScene::standard();
  const real diameter = scene.diameter();
  const Vec3 target(0, 0, real(0.4));
  const real radius = real(3.2);
  const real height = real(1.8);

  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(seed);
  const int n_shaken = static_cast<int>(
      std::lround(double(params.shake_fraction) * params.views));

  // spread the unshaken views across the orbit
  std::vector<bool> shaken(static_cast<size_t>(params.views), false);
  int have = 0;
  for (int v = 0; v < params.views && have < n_shaken; ++v)
    if ((v + 1) % 5 != 0) {
      shaken[static_cast<size_t>(v)] = true;
      ++have;
    }
  for (int v = params.views - 1; v >= 0 && have < n_shaken; --v)
    if (!shaken[static_cast<size_t>(v)]) {
      shaken[static_cast<size_t>(v)] = true;
      ++have;
    }

  DatasetManifest manifest;
  for (int v = 0; v < params.views; ++v) {
    const real angle =
        real(2) * real(EIGEN_PI) * real(v) / real(params.views);
    Camera cam;
    cam.pose = look_at(
        Vec3(radius * std::cos(angle), radius * std::sin(angle), height),
        target, Vec3(0, 0, 1));
    cam.focal = real(1.1) * real(params.width);
    cam.cx = real(params.width) / 2;
    cam.cy = real(params.height) / 2;
    cam.width = params.width;
    cam.height = params.height;
    const real dist = (cam.center() - target).norm();
    cam.near = std::max(real(0.2), dist - diameter);
    cam.far = dist + diameter;

    DegradeSpec spec;
    spec.gamma_d = params.gamma_d;
    spec.gain = params.gain;
    spec.sigma_g = params.sigma_g;
    spec.sigma_p = params.sigma_p;
    spec.sigma_lf = params.sigma_lf;
    spec.lf_cells = params.lf_cells;
    if (shaken[static_cast<size_t>(v)]) {
      const ScrewMotion screw =
          random_screw(params.max_rot_deg * real(EIGEN_PI) / 180,
                       params.max_trans_fraction * diameter, rng);
      spec.trajectory = shake_trajectory(cam, screw, params.frames);
    } else {
      spec.trajectory = {cam};
    }

    std::vector<Image> frames;
    for (const Camera& frame_cam : spec.trajectory) {
      Image rgb;
      Mat d;
      render_toy_scene(scene, frame_cam, rgb, d);
      frames.push_back(std::move(rgb));
    }
    Image clean;
    Mat depth;
    render_toy_scene(scene, cam, clean, depth);
    const Image degraded =
        synth_degrade(frames, spec, seed * 1000003ULL + uint64_t(v));

    std::ostringstream tag;
    tag << (v < 10 ? "0" : "") << v;
    DatasetView view;
    view.image_path = "view_" + tag.str() + ".png";
    view.depth_path = "depth_" + tag.str() + ".bin";
    view.clean_path = "clean_" + tag.str() + ".png";
    view.camera = cam;
    view.split = default_split_tag(v);
    write_png(dir + "/" + view.image_path, degraded);
    write_png(dir + "/" + view.clean_path, clean);
    write_depth(dir + "/" + view.depth_path, depth);
    manifest.views.push_back(view);
  }

  manifest.near = manifest.views.front().camera.near;
  manifest.far = manifest.views.front().camera.far;
  for (const DatasetView& view : manifest.views) {
    manifest.near = std::min(manifest.near, view.camera.near);
    manifest.far = std::max(manifest.far, view.camera.far);
  }
  save_manifest(dir, manifest);
  return manifest;
}

}  // namespace dusk
