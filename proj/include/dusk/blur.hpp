#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dusk/geometry.hpp"
#include "dusk/mlp.hpp"
#include "dusk/param_store.hpp"
#include "dusk/tape.hpp"

namespace dusk {

struct BlurKernelConfig {
  int k = 4;  // rigid motions per view
  int latent_dim = 32;
  int embed_depth = 2;
  int embed_width = 64;
  real head_scale = real(1e-4);  // screws start near the identity
  bool raw_translation = false;  // skip the left-Jacobian coupling
};

// Differentiable rotation/translation from a 1x6 screw row (r | v).
struct RigidGraph {
  Tape::Id rot;    // 3 x 3
  Tape::Id trans;  // 1 x 3
};

RigidGraph se3_exp_graph(Tape& t, Tape::Id screw_row, bool raw_translation);
// row-batched points P x 3 -> R p + t
Tape::Id transform_points_graph(Tape& t, Tape::Id pts, const RigidGraph& rt);
// row-batched unit directions P x 3 -> normalize(R d)
Tape::Id rotate_dirs_graph(Tape& t, Tape::Id dirs, const RigidGraph& rt);

// Per-view camera-shake model: a latent code per view feeds an embedding
// MLP whose heads emit k screws and k+1 composition weights (softmax, the
// extra weight belongs to the untransformed ray).
class BlurKernelNet {
 public:
  BlurKernelNet() = default;
  BlurKernelNet(ParameterStore& store, const std::string& prefix, int n_views,
                const BlurKernelConfig& cfg, std::mt19937_64& rng);

  int n_views() const { return n_views_; }
  const BlurKernelConfig& config() const { return cfg_; }

  void motions(int view, std::vector<ScrewMotion>& screws, Vec& weights) const;

  struct MotionGraph {
    Tape::Id screws;   // k x 6
    Tape::Id weights;  // 1 x (k+1)
  };
  MotionGraph motions_graph(Tape& t, int view) const;

  long param_count() const;

 private:
  BlurKernelConfig cfg_;
  int n_views_ = 0;
  int latent_block_ = -1;
  ParameterStore* store_ = nullptr;
  Mlp embed_, rot_head_, trans_head_, weight_head_;

  void check_view(int view) const;
};

// Weighted sum of the sharp render over the identity ray and its k rigidly
// transformed copies.
using RenderFn = std::function<Vec3(const Ray&)>;
Vec3 blur_compose(const Ray& ray, const std::vector<ScrewMotion>& motions,
                  const Vec& weights, const RenderFn& render,
                  bool raw_translation = false);

// Indices of batch rays under mask 1 (clear) and mask 0 (noisy). Noisy rays
// keep their loss contribution but the pipeline severs their gradient into
// the blur kernel parameters.
struct RayPartition {
  std::vector<int> clear;
  std::vector<int> noisy;
};

RayPartition partition_rays(const std::vector<Ray>& batch, const Mat& mask);

}  // namespace dusk
