#pragma once

#include <stdexcept>

#include "dusk/rotation_series.hpp"
#include "dusk/types.hpp"

namespace dusk {

// Right-handed camera looking down -z, row-major pixels, origin at the
// top-left corner. `pose` maps camera coordinates to world coordinates.
struct Camera {
  Mat34 pose = Mat34::Zero();
  real focal = 0;
  real cx = 0, cy = 0;
  int width = 0, height = 0;
  real near = 0, far = 0;

  Mat3 rotation() const { return pose.leftCols<3>(); }
  Vec3 center() const { return pose.col(3); }
};

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 dir = Vec3::Zero();
  int view = -1;
  int row = -1, col = -1;
};

// Axis-angle rotation plus translation; exp of the zero screw is identity.
struct ScrewMotion {
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

struct RigidTransform {
  Mat3 rot = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Vec3 apply_point(const Vec3& p) const { return rot * p + t; }
  RigidTransform inverse() const {
    RigidTransform inv;
    inv.rot = rot.transpose();
    inv.t = -inv.rot * t;
    return inv;
  }
};

inline Mat3 skew(const Vec3& w) {
  Mat3 k;
  k << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return k;
}

// SE(3) exponential: Rodrigues rotation plus left-Jacobian translation.
inline RigidTransform se3_exp(const ScrewMotion& s, bool raw_translation = false) {
  const real sq = s.r.squaredNorm();
  const Mat3 k = skew(s.r);
  const Mat3 k2 = k * k;
  RigidTransform out;
  out.rot = Mat3::Identity() + rot_a_f(sq) * k + rot_b_f(sq) * k2;
  if (raw_translation) {
    out.t = s.v;
  } else {
    const Mat3 vj = Mat3::Identity() + rot_b_f(sq) * k + rot_c_f(sq) * k2;
    out.t = vj * s.v;
  }
  return out;
}

// Sub-pixel ray through image coordinates (row, col); integer pixel centers
// are at (row + 0.5, col + 0.5).
inline Ray camera_ray(const Camera& cam, real row, real col) {
  if (row < 0 || col < 0 || row > real(cam.height) || col > real(cam.width))
    throw std::invalid_argument("camera_ray: pixel outside image bounds");
  Vec3 d_cam((col - cam.cx) / cam.focal, -(row - cam.cy) / cam.focal, real(-1));
  Ray ray;
  ray.origin = cam.center();
  ray.dir = (cam.rotation() * d_cam).normalized();
  return ray;
}

inline Ray pixel_ray(const Camera& cam, int view, int row, int col) {
  Ray ray = camera_ray(cam, real(row) + real(0.5), real(col) + real(0.5));
  ray.view = view;
  ray.row = row;
  ray.col = col;
  return ray;
}

inline Ray rigid_transform_ray(const Ray& ray, const RigidTransform& tf) {
  Ray out = ray;
  out.origin = tf.apply_point(ray.origin);
  out.dir = (tf.rot * ray.dir).normalized();
  return out;
}

// Projects a world point into the camera; returns false when behind it.
inline bool project(const Camera& cam, const Vec3& p, real& row, real& col,
                    real& depth) {
  const Vec3 pc = cam.rotation().transpose() * (p - cam.center());
  if (pc.z() >= 0) return false;
  depth = -pc.z();
  col = cam.cx + cam.focal * pc.x() / depth;
  row = cam.cy - cam.focal * pc.y() / depth;
  return true;
}

}  // namespace dusk
