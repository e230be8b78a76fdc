#pragma once

#include <vector>

#include "dusk/geometry.hpp"
#include "dusk/image.hpp"
#include "dusk/tape.hpp"
#include "dusk/types.hpp"

namespace dusk {

// Dense correspondence from every pixel of view a to sub-pixel image
// coordinates in view b. Coordinates are pixel-center based (integer pixel
// (i,j) sits at (i+0.5, j+0.5)); certainty 0 marks an invalid entry.
struct ViewPairMatch {
  Mat row_map, col_map;
  Mat certainty;

  bool empty() const { return certainty.size() == 0; }
};

// Immutable snapshot of all ordered view pairs; rebuilt wholesale at refresh
// boundaries so readers never see a partial table.
struct MatchTable {
  int n_views = 0;
  std::vector<ViewPairMatch> pairs;  // indexed a * n_views + b, diagonal unused

  const ViewPairMatch& at(int a, int b) const {
    return pairs.at(static_cast<size_t>(a) * n_views + b);
  }
  ViewPairMatch& at(int a, int b) {
    return pairs.at(static_cast<size_t>(a) * n_views + b);
  }
};

// One view as seen by the matchers. `depth` holds per-pixel z-depth at the
// pixel center (distance along the camera's -z axis, the convention of
// project()); it may be empty for the correlation backend.
struct MatchView {
  Image image;
  Camera camera;
  Mat depth;
};

enum class MatchBackend {
  GroundTruth,  // reproject through known depth, binary certainty
  BlockNcc,     // normalized cross-correlation search, graded certainty
};

struct BlockMatchConfig {
  int block_radius = 3;
  int search_radius = 8;
};

ViewPairMatch match_views(const MatchView& a, const MatchView& b,
                          MatchBackend backend,
                          const BlockMatchConfig& cfg = {});

MatchTable build_match_table(const std::vector<MatchView>& views,
                             MatchBackend backend,
                             const BlockMatchConfig& cfg = {});

// Anchor ray plus matched rays from other views; rays[0] is the anchor with
// certainty 1, later members keep the certainty of their match.
struct AlignedRayGroup {
  std::vector<Ray> rays;
  std::vector<real> certainty;

  int size() const { return static_cast<int>(rays.size()); }
};

// For each other view, accepts the match at the anchor pixel when its
// certainty exceeds `theta`, builds the ray through the rounded matched
// pixel, and stops once the group holds `cap` rays counting the anchor.
AlignedRayGroup aligned_rays(const Ray& anchor, const MatchTable& table,
                             const std::vector<Camera>& cameras, real theta,
                             int cap);

// Mean absolute deviation from the group mean color, averaged over channels.
real consistency_loss(const Mat& colors);                  // K x 3
Tape::Id consistency_loss(Tape& t, Tape::Id colors);       // K x 3 -> 1 x 1

// Simulated noisy pixel: sharpness-degraded scene color plus predicted
// noise, unclamped so the noise branch can be negative.
inline Vec3 compose_noisy_pixel(const Vec3& scene_color, const Vec3& noise) {
  return scene_color + noise;
}
inline Tape::Id compose_noisy_pixel(Tape& t, Tape::Id scene_color,
                                    Tape::Id noise) {
  return t.add(scene_color, noise);
}

}  // namespace dusk
