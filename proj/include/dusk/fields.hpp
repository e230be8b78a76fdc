#pragma once

#include <random>
#include <string>
#include <utility>

#include "dusk/encoding.hpp"
#include "dusk/mlp.hpp"
#include "dusk/param_store.hpp"
#include "dusk/tape.hpp"

namespace dusk {

struct SceneFieldConfig {
  int depth = 8;
  int width = 128;
  int skip = 4;  // trunk layer that re-injects the encoded position
  EncodingConfig pos_enc{10, true};
  EncodingConfig dir_enc{4, true};
};

// Radiance field: position -> density (softplus), position + view direction
// -> color (sigmoid). Density never sees the view direction.
class SceneField {
 public:
  SceneField() = default;
  SceneField(ParameterStore& store, const std::string& prefix,
             const SceneFieldConfig& cfg, std::mt19937_64& rng);

  // points, dirs: P x 3 row batches; dirs unit length.
  void eval(const Mat& points, const Mat& dirs, Mat& color, Vec& sigma) const;
  // {color (P x 3), sigma (P x 1)}
  std::pair<Tape::Id, Tape::Id> eval_graph(Tape& t, Tape::Id points,
                                           Tape::Id dirs) const;

  const SceneFieldConfig& config() const { return cfg_; }
  long param_count() const;

 private:
  SceneFieldConfig cfg_;
  Mlp trunk_a_, trunk_b_, sigma_head_, feat_head_, color_head_;
  bool has_skip_ = false;
};

struct NoiseFieldConfig {
  int depth = 4;
  int width = 64;
  EncodingConfig pos_enc{10, true};
  EncodingConfig dir_enc{4, true};
};

// Per-ray sharp noise head: one unbounded RGB triple from the mid sample
// point and the view direction, no volume rendering.
class NoiseField {
 public:
  NoiseField() = default;
  NoiseField(ParameterStore& store, const std::string& prefix,
             const NoiseFieldConfig& cfg, std::mt19937_64& rng);

  Mat eval(const Mat& mid_points, const Mat& dirs) const;  // P x 3 noise
  Tape::Id eval_graph(Tape& t, Tape::Id mid_points, Tape::Id dirs) const;

  const NoiseFieldConfig& config() const { return cfg_; }
  long param_count() const { return mlp_.param_count(); }

 private:
  NoiseFieldConfig cfg_;
  Mlp mlp_;
};

}  // namespace dusk
