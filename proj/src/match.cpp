#include "dusk/match.hpp"

#include <cmath>
#include <stdexcept>

namespace dusk {

namespace {

ViewPairMatch invalid_pair(int rows, int cols) {
  ViewPairMatch m;
  m.row_map = Mat::Constant(rows, cols, -1);
  m.col_map = Mat::Constant(rows, cols, -1);
  m.certainty = Mat::Zero(rows, cols);
  return m;
}

ViewPairMatch match_ground_truth(const MatchView& a, const MatchView& b) {
  if (a.depth.size() == 0 || b.depth.size() == 0)
    throw std::invalid_argument("match_views: ground-truth backend needs depth");
  if (a.depth.rows() != a.image.rows() || a.depth.cols() != a.image.cols() ||
      b.depth.rows() != b.image.rows() || b.depth.cols() != b.image.cols())
    throw std::invalid_argument("match_views: depth/image size mismatch");

  const int rows = a.image.rows(), cols = a.image.cols();
  ViewPairMatch m = invalid_pair(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const real z = a.depth(i, j);
      if (z <= 0) continue;
      // pixel-center direction in camera coordinates, scaled to z-depth z
      const Vec3 d_cam((real(j) + real(0.5) - a.camera.cx) / a.camera.focal,
                       -(real(i) + real(0.5) - a.camera.cy) / a.camera.focal,
                       real(-1));
      const Vec3 world = a.camera.center() + a.camera.rotation() * (d_cam * z);
      real rb, cb, zb;
      if (!project(b.camera, world, rb, cb, zb)) continue;
      const int ri = static_cast<int>(std::floor(rb));
      const int ci = static_cast<int>(std::floor(cb));
      if (ri < 0 || ci < 0 || ri >= b.image.rows() || ci >= b.image.cols())
        continue;
      const real zb_surface = b.depth(ri, ci);
      const bool occluded =
          zb_surface > 0 && zb > zb_surface * (1 + real(1e-3)) + real(1e-6);
      if (occluded) continue;
      m.row_map(i, j) = rb;
      m.col_map(i, j) = cb;
      m.certainty(i, j) = 1;
    }
  return m;
}

ViewPairMatch match_block_ncc(const MatchView& a, const MatchView& b,
                              const BlockMatchConfig& cfg) {
  const Mat ga = grayscale(a.image);
  const Mat gb = grayscale(b.image);
  const int rows = static_cast<int>(ga.rows()), cols = static_cast<int>(ga.cols());
  const int br = cfg.block_radius, sr = cfg.search_radius;
  ViewPairMatch m = invalid_pair(rows, cols);

  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      real best = -2;
      int best_di = 0, best_dj = 0;
      for (int di = -sr; di <= sr; ++di)
        for (int dj = -sr; dj <= sr; ++dj) {
          const int ti = i + di, tj = j + dj;
          if (ti < 0 || tj < 0 || ti >= rows || tj >= cols) continue;
          // overlap of both blocks with their images
          real sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
          int n = 0;
          for (int u = -br; u <= br; ++u)
            for (int v = -br; v <= br; ++v) {
              const int ai = i + u, aj = j + v, bi = ti + u, bj = tj + v;
              if (ai < 0 || aj < 0 || ai >= rows || aj >= cols) continue;
              if (bi < 0 || bj < 0 || bi >= rows || bj >= cols) continue;
              const real va = ga(ai, aj), vb = gb(bi, bj);
              sa += va;
              sb += vb;
              saa += va * va;
              sbb += vb * vb;
              sab += va * vb;
              ++n;
            }
          if (n < 2) continue;
          const real var_a = saa - sa * sa / n;
          const real var_b = sbb - sb * sb / n;
          if (var_a <= real(1e-12) || var_b <= real(1e-12)) continue;
          const real score = (sab - sa * sb / n) / std::sqrt(var_a * var_b);
          if (score > best) {
            best = score;
            best_di = di;
            best_dj = dj;
          }
        }
      if (best <= -2) continue;  // textureless everywhere in the window
      m.row_map(i, j) = real(i + best_di) + real(0.5);
      m.col_map(i, j) = real(j + best_dj) + real(0.5);
      m.certainty(i, j) = std::min(real(1), std::max(real(0), best));
    }
  return m;
}

}  // namespace

ViewPairMatch match_views(const MatchView& a, const MatchView& b,
                          MatchBackend backend, const BlockMatchConfig& cfg) {
  if (a.image.rows() != b.image.rows() || a.image.cols() != b.image.cols())
    throw std::invalid_argument("match_views: image size mismatch");
  switch (backend) {
    case MatchBackend::GroundTruth:
      return match_ground_truth(a, b);
    case MatchBackend::BlockNcc:
      return match_block_ncc(a, b, cfg);
  }
  throw std::invalid_argument("match_views: unknown backend");
}

MatchTable build_match_table(const std::vector<MatchView>& views,
                             MatchBackend backend,
                             const BlockMatchConfig& cfg) {
  MatchTable table;
  table.n_views = static_cast<int>(views.size());
  table.pairs.resize(static_cast<size_t>(table.n_views) * table.n_views);
  for (int a = 0; a < table.n_views; ++a)
    for (int b = 0; b < table.n_views; ++b) {
      if (a == b) continue;
      table.at(a, b) = match_views(views[a], views[b], backend, cfg);
    }
  return table;
}

AlignedRayGroup aligned_rays(const Ray& anchor, const MatchTable& table,
                             const std::vector<Camera>& cameras, real theta,
                             int cap) {
  if (anchor.view < 0 || anchor.view >= table.n_views)
    throw std::invalid_argument("aligned_rays: anchor view not in the table");
  AlignedRayGroup group;
  group.rays.push_back(anchor);
  group.certainty.push_back(1);
  for (int b = 0; b < table.n_views && group.size() < cap; ++b) {
    if (b == anchor.view) continue;
    const ViewPairMatch& m = table.at(anchor.view, b);
    if (m.empty()) continue;
    const real c = m.certainty(anchor.row, anchor.col);
    if (!(c > theta)) continue;
    const int ri =
        static_cast<int>(std::lround(m.row_map(anchor.row, anchor.col) - real(0.5)));
    const int ci =
        static_cast<int>(std::lround(m.col_map(anchor.row, anchor.col) - real(0.5)));
    const Camera& cam = cameras.at(static_cast<size_t>(b));
    if (ri < 0 || ci < 0 || ri >= cam.height || ci >= cam.width) continue;
    group.rays.push_back(pixel_ray(cam, b, ri, ci));
    group.certainty.push_back(c);
  }
  return group;
}

real consistency_loss(const Mat& colors) {
  if (colors.rows() < 1 || colors.cols() != 3)
    throw std::invalid_argument("consistency_loss: expected K x 3 colors");
  const Mat mean = colors.colwise().mean();
  return (colors.rowwise() - mean.row(0)).cwiseAbs().mean();
}

Tape::Id consistency_loss(Tape& t, Tape::Id colors) {
  const int k = t.rows(colors);
  const Tape::Id mean = t.scale_const(t.col_sum(colors), real(1) / k);
  const Tape::Id dev = t.abs(t.sub_row(colors, mean));
  return t.scale_const(t.sum(dev), real(1) / (real(3) * k));
}

}  // namespace dusk
