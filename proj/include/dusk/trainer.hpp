#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "dusk/dataset.hpp"
#include "dusk/pipeline.hpp"

namespace dusk {

struct TrainConfig {
  long total_iters = 30000;
  real stage1_fraction = real(0.6);  // consistency off before the boundary
  real alpha = 1;
  real beta_stage2 = real(1e-2);
  int batch_rays = 1024;
  real lr_init = real(5e-4);
  real lr_final = real(5e-5);
  // per-module multipliers on the shared rate; the shake screws only need to
  // travel a few hundredths of a radian, so the blur kernel can run slower
  // than the scene without stalling
  real blur_lr_scale = 1;
  real noise_lr_scale = 1;

  SampleConfig samples;
  SceneFieldConfig scene;
  NoiseFieldConfig noise;
  BlurKernelConfig blur;

  bool equalize = true;  // histogram step of the brightening preprocessing
  real mask_radius = 30;
  real mask_threshold = 48;
  real theta = real(0.8);
  int group_cap = 20;
  int max_groups_per_step = 8;
  long match_refresh = 2000;
  MatchBackend match_backend = MatchBackend::GroundTruth;

  bool noise_before_blur = false;
  bool baseline = false;  // scene field only, no degradation model
  uint64_t seed = 1;
  bool deterministic = false;
  long checkpoint_every = 5000;
  long log_every = 100;
};

struct Schedule {
  real alpha = 1;
  real beta = 0;
  real lr = 0;
};

inline long stage_boundary(const TrainConfig& cfg) {
  return static_cast<long>(
      std::ceil(cfg.stage1_fraction * real(cfg.total_iters)));
}

Schedule schedule(long iteration, const TrainConfig& cfg);

// Mean over rays and channels of the squared deviation.
real reconstruction_loss(const Mat& predicted, const Mat& target);

inline real total_loss(real l_construction, real l_consistency, real alpha,
                       real beta) {
  return alpha * l_construction + beta * l_consistency;
}

// Adaptive-moment optimizer whose moments live in the ParameterStore as
// non-trainable blocks, so checkpoints carry the whole optimizer state.
class Adam {
 public:
  Adam() = default;
  explicit Adam(ParameterStore& store, real beta1 = real(0.9),
                real beta2 = real(0.999), real eps = real(1e-8));

  // t is the 1-based update count for bias correction
  void step(real lr, long t);

  // multiplies the rate of every block whose name starts with `prefix`
  void scale_group(const std::string& prefix, real scale);

 private:
  ParameterStore* store_ = nullptr;
  real beta1_ = 0, beta2_ = 0, eps_ = 0;
  struct Slot {
    int param, m, v;
    real scale = 1;
  };
  std::vector<Slot> slots_;
};

// Owns the models, optimizer, cached masks and match tables, and the
// iteration counter for one training run.
class TrainSession {
 public:
  TrainSession(Dataset dataset, const TrainConfig& cfg);

  struct StepStats {
    real recon = 0;
    real consistency = 0;
    real lr = 0;
  };
  StepStats step();

  // steps until total_iters, writing log rows and periodic checkpoints
  void run(std::ostream* log, const std::string& checkpoint_dir);

  void save_checkpoint(const std::string& path) const;
  void load_checkpoint(const std::string& path);

  Image render_view(const Camera& cam) const;

  long iteration() const { return iteration_; }
  Schedule current_schedule() const { return schedule(iteration_, cfg_); }
  const ParameterStore& store() const { return store_; }
  ParameterStore& store() { return store_; }
  const SceneField& scene() const { return scene_; }
  const TrainConfig& config() const { return cfg_; }
  const Dataset& dataset() const { return dataset_; }
  const std::vector<Image>& preprocessed() const { return preprocessed_; }
  const std::vector<Mat>& masks() const { return masks_; }
  bool has_match_table() const { return have_table_; }
  const MatchTable& match_table() const { return table_; }

 private:
  TrainConfig cfg_;
  Dataset dataset_;
  std::vector<int> train_views_;
  std::vector<Camera> cameras_;
  std::vector<Image> preprocessed_;  // brightened training targets
  std::vector<Mat> masks_;

  ParameterStore store_;
  SceneField scene_;
  NoiseField noise_;
  BlurKernelNet blur_;
  PipelineModels models_;
  Adam adam_;

  MatchTable table_;
  bool have_table_ = false;
  long iteration_ = 0;

  // steps are pure functions of (parameters, iteration, seed): the batch and
  // jitter rng is derived per step, so a checkpoint round trip replays
  // bit-exactly
  std::mt19937_64 step_rng() const;
  void refresh_matches();
  std::vector<Ray> sample_batch(Mat& targets, std::mt19937_64& rng);
};

}  // namespace dusk
