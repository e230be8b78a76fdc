#pragma once

#include <random>
#include <vector>

#include "dusk/blur.hpp"
#include "dusk/fields.hpp"
#include "dusk/match.hpp"
#include "dusk/render.hpp"

namespace dusk {

struct PipelineModels {
  SceneField* scene = nullptr;
  NoiseField* noise = nullptr;
  BlurKernelNet* blur = nullptr;
  bool raw_translation = false;
  // ablation: inject the noise prediction before the blur weighting instead
  // of after it
  bool noise_before_blur = false;
};

struct SampleConfig {
  int n_coarse = 64;
  int n_fine = 64;
  bool jitter = true;
};

// Frozen sampling state for one training step. Sample distances are chosen
// by an undifferentiated coarse pass and cached, so rebuilding the graph
// from the same cache is a pure function of the parameters; finite
// differences and analytic gradients then see the same samples.
struct PipelineCache {
  std::vector<Ray> rays;
  Mat targets;                  // R x 3 preprocessed pixels
  std::vector<Vec> t_samples;   // per ray, sorted coarse+fine distances
  std::vector<int> clear, noisy;
  real far = 0;
  int mid_index = 0;            // noise features use this sample

  // consistency groups: member rays with their own cached samples
  std::vector<AlignedRayGroup> groups;
  std::vector<std::vector<Vec>> group_samples;
};

// Coarse-render importance sampling plus mask partition and (when a match
// table is supplied) aligned-group lookup for up to `max_groups` anchors.
PipelineCache build_pipeline_cache(
    const PipelineModels& models, const SampleConfig& scfg,
    const std::vector<Ray>& batch, const Mat& targets, real near, real far,
    const std::vector<Mat>& masks, const MatchTable* table,
    const std::vector<Camera>& cameras, real theta, int group_cap,
    int max_groups, std::mt19937_64& rng);

struct PipelineGraph {
  Tape::Id predicted = -1;      // R x 3 in cache order (clear then noisy)
  std::vector<int> ray_order;   // batch index per predicted row
  Tape::Id recon_loss = -1;
  Tape::Id consistency = -1;
  Tape::Id total = -1;
};

// Simulated degraded pixel per ray: weighted blur composition of the sharp
// scene renders over the per-view rigid motions, plus the per-ray noise
// prediction; mean squared error against the preprocessed targets plus the
// weighted group consistency term. Rays tagged noisy render through
// detached motion nodes, severing only the blur kernel gradients.
PipelineGraph build_pipeline_graph(Tape& t, const PipelineModels& models,
                                   const PipelineCache& cache, real alpha,
                                   real beta);

// Baseline path: every ray rendered sharp through the scene field alone,
// mean squared error against the targets. No blur, noise, or detach.
PipelineGraph build_sharp_graph(Tape& t, const SceneField& scene,
                                const PipelineCache& cache);

// Undegraded per-pixel render for evaluation: coarse+fine sampling, scene
// field only, clamped to [0,1].
Image render_novel(const SceneField& scene, const Camera& cam,
                   const SampleConfig& scfg, std::mt19937_64& rng);

}  // namespace dusk
