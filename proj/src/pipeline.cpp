#include "dusk/pipeline.hpp"

#include <map>
#include <stdexcept>

namespace dusk {

namespace {

Vec sample_ray(const PipelineModels& models, const SampleConfig& scfg,
               const Ray& ray, real near, real far, std::mt19937_64& rng) {
  Vec coarse = stratified_samples(near, far, scfg.n_coarse, scfg.jitter, rng);
  if (scfg.n_fine <= 0) return coarse;

  const int n = scfg.n_coarse;
  Mat pts(n, 3), dirs(n, 3);
  for (int i = 0; i < n; ++i) {
    pts.row(i) = (ray.origin + coarse[i] * ray.dir).transpose();
    dirs.row(i) = ray.dir.transpose();
  }
  Mat color;
  Vec sigma;
  models.scene->eval(pts, dirs, color, sigma);
  const RenderResult rr = volume_render(coarse, far, color, sigma);
  const Vec fine = hierarchical_resample(rr.weights, near, far, scfg.n_fine, rng);
  return merge_sorted(coarse, fine);
}

struct SubsetConstants {
  Mat origins;    // Rs x 3
  Mat dirs;       // Rs x 3
  Mat t_col;      // (Rs*N) x 1, ray-major
  Mat t_mid;      // Rs x 1
  Mat delta;      // Rs x N
  Mat points0;    // (Rs*N) x 3 along the untransformed rays
  Mat dirs_rep;   // (Rs*N) x 3
  Mat mid_points; // Rs x 3
  Mat target;     // Rs x 3
};

SubsetConstants subset_constants(const PipelineCache& cache,
                                 const std::vector<int>& idx, int n) {
  const int rs = static_cast<int>(idx.size());
  SubsetConstants c;
  c.origins.resize(rs, 3);
  c.dirs.resize(rs, 3);
  c.t_col.resize(rs * n, 1);
  c.t_mid.resize(rs, 1);
  c.delta.resize(rs, n);
  c.points0.resize(rs * n, 3);
  c.dirs_rep.resize(rs * n, 3);
  c.mid_points.resize(rs, 3);
  c.target.resize(rs, 3);
  for (int r = 0; r < rs; ++r) {
    const Ray& ray = cache.rays[static_cast<size_t>(idx[r])];
    const Vec& ts = cache.t_samples[static_cast<size_t>(idx[r])];
    c.origins.row(r) = ray.origin.transpose();
    c.dirs.row(r) = ray.dir.transpose();
    c.delta.row(r) = interval_widths(ts, cache.far).transpose();
    c.t_mid(r, 0) = ts[cache.mid_index];
    c.mid_points.row(r) =
        (ray.origin + ts[cache.mid_index] * ray.dir).transpose();
    c.target.row(r) = cache.targets.row(idx[r]);
    for (int i = 0; i < n; ++i) {
      c.t_col(r * n + i, 0) = ts[i];
      c.points0.row(r * n + i) = (ray.origin + ts[i] * ray.dir).transpose();
      c.dirs_rep.row(r * n + i) = ray.dir.transpose();
    }
  }
  return c;
}

}  // namespace

PipelineCache build_pipeline_cache(
    const PipelineModels& models, const SampleConfig& scfg,
    const std::vector<Ray>& batch, const Mat& targets, real near, real far,
    const std::vector<Mat>& masks, const MatchTable* table,
    const std::vector<Camera>& cameras, real theta, int group_cap,
    int max_groups, std::mt19937_64& rng) {
  if (targets.rows() != static_cast<Eigen::Index>(batch.size()) ||
      targets.cols() != 3)
    throw std::invalid_argument("pipeline cache: targets must be R x 3");

  PipelineCache cache;
  cache.rays = batch;
  cache.targets = targets;
  cache.far = far;
  cache.mid_index = (scfg.n_coarse + std::max(scfg.n_fine, 0)) / 2;
  for (const Ray& ray : batch)
    cache.t_samples.push_back(
        sample_ray(models, scfg, ray, near, far, rng));

  for (size_t i = 0; i < batch.size(); ++i) {
    const Ray& ray = batch[i];
    bool is_clear = true;
    if (!masks.empty()) {
      const Mat& mask = masks.at(static_cast<size_t>(ray.view));
      if (ray.row < 0 || ray.col < 0 || ray.row >= mask.rows() ||
          ray.col >= mask.cols())
        throw std::invalid_argument("pipeline cache: ray outside its mask");
      is_clear = mask(ray.row, ray.col) == 1;
    }
    (is_clear ? cache.clear : cache.noisy).push_back(static_cast<int>(i));
  }

  if (table != nullptr) {
    for (const Ray& ray : batch) {
      if (static_cast<int>(cache.groups.size()) >= max_groups) break;
      AlignedRayGroup group =
          aligned_rays(ray, *table, cameras, theta, group_cap);
      if (group.size() < 2) continue;
      std::vector<Vec> samples;
      for (const Ray& member : group.rays)
        samples.push_back(sample_ray(models, scfg, member, near, far, rng));
      cache.groups.push_back(std::move(group));
      cache.group_samples.push_back(std::move(samples));
    }
  }
  return cache;
}

PipelineGraph build_pipeline_graph(Tape& t, const PipelineModels& models,
                                   const PipelineCache& cache, real alpha,
                                   real beta) {
  if (cache.rays.empty())
    throw std::invalid_argument("pipeline graph: empty batch");
  const int n = static_cast<int>(cache.t_samples.front().size());
  for (const Vec& ts : cache.t_samples)
    if (static_cast<int>(ts.size()) != n)
      throw std::invalid_argument("pipeline graph: ragged sample counts");

  const int k = models.blur->config().k;

  // per view: undetached and detached motion nodes, built once
  struct ViewMotions {
    Tape::Id screws, weights;
    Tape::Id screws_det, weights_det;
  };
  std::map<int, ViewMotions> motions;
  auto view_motions = [&](int view) -> ViewMotions& {
    auto it = motions.find(view);
    if (it != motions.end()) return it->second;
    const BlurKernelNet::MotionGraph g = models.blur->motions_graph(t, view);
    ViewMotions vm;
    vm.screws = g.screws;
    vm.weights = g.weights;
    vm.screws_det = t.detach(g.screws);
    vm.weights_det = t.detach(g.weights);
    return motions.emplace(view, vm).first->second;
  };

  PipelineGraph out;
  Tape::Id sq_total = -1;

  auto render_subset = [&](const std::vector<int>& idx, bool detached) {
    if (idx.empty()) return;
    // contiguous per-view runs keep one motion graph per (view, subset)
    size_t start = 0;
    while (start < idx.size()) {
      size_t end = start;
      const int view = cache.rays[static_cast<size_t>(idx[start])].view;
      while (end < idx.size() &&
             cache.rays[static_cast<size_t>(idx[end])].view == view)
        ++end;
      std::vector<int> run(idx.begin() + static_cast<long>(start),
                           idx.begin() + static_cast<long>(end));
      start = end;

      const SubsetConstants c = subset_constants(cache, run, n);
      const ViewMotions& vm = view_motions(view);
      const Tape::Id screws = detached ? vm.screws_det : vm.screws;
      const Tape::Id weights = detached ? vm.weights_det : vm.weights;

      const Tape::Id o_const = t.constant(c.origins);
      const Tape::Id d_const = t.constant(c.dirs);
      const Tape::Id t_col = t.constant(c.t_col);
      const Tape::Id t_mid = t.constant(c.t_mid);

      Tape::Id blurry = -1;
      Tape::Id noise0 = -1;
      for (int q = 0; q <= k; ++q) {
        Tape::Id pts, dirs_in, o_q, d_q;
        if (q == 0) {
          pts = t.constant(c.points0);
          dirs_in = t.constant(c.dirs_rep);
          o_q = o_const;
          d_q = d_const;
        } else {
          const RigidGraph rt = se3_exp_graph(
              t, t.block(screws, q - 1, 0, 1, 6), models.raw_translation);
          o_q = transform_points_graph(t, o_const, rt);
          d_q = rotate_dirs_graph(t, d_const, rt);
          pts = t.add(t.repeat_rows(o_q, n),
                      t.mul_col(t.repeat_rows(d_q, n), t_col));
          dirs_in = t.repeat_rows(d_q, n);
        }
        auto [color, sigma] = models.scene->eval_graph(t, pts, dirs_in);
        Tape::Id c_q = volume_render_graph(t, sigma, color, c.delta);

        if (models.noise_before_blur) {
          const Tape::Id mid =
              q == 0 ? t.constant(c.mid_points)
                     : t.add(o_q, t.mul_col(d_q, t_mid));
          c_q = t.add(c_q, models.noise->eval_graph(t, mid, d_q));
        } else if (q == 0) {
          noise0 = models.noise->eval_graph(t, t.constant(c.mid_points),
                                            d_const);
        }

        const Tape::Id w_q = t.block(weights, 0, q, 1, 1);
        const Tape::Id term = t.scale(w_q, c_q);
        blurry = q == 0 ? term : t.add(blurry, term);
      }

      const Tape::Id pred =
          models.noise_before_blur ? blurry : t.add(blurry, noise0);
      out.predicted =
          out.predicted < 0 ? pred : t.concat_rows(out.predicted, pred);
      for (int i : run) out.ray_order.push_back(i);

      const Tape::Id diff = t.sub(pred, t.constant(c.target));
      const Tape::Id sq = t.sum(t.mul(diff, diff));
      sq_total = sq_total < 0 ? sq : t.add(sq_total, sq);
    }
  };

  render_subset(cache.clear, false);
  render_subset(cache.noisy, true);

  out.recon_loss =
      t.scale_const(sq_total, real(1) / (real(3) * real(cache.rays.size())));

  if (cache.groups.empty()) {
    out.consistency = t.scalar(0);
  } else {
    Tape::Id acc = -1;
    for (size_t g = 0; g < cache.groups.size(); ++g) {
      const AlignedRayGroup& group = cache.groups[g];
      Tape::Id colors = -1;
      for (int m = 0; m < group.size(); ++m) {
        const Ray& ray = group.rays[static_cast<size_t>(m)];
        const Vec& ts = cache.group_samples[g][static_cast<size_t>(m)];
        const int nm = static_cast<int>(ts.size());
        Mat pts(nm, 3), dirs(nm, 3);
        for (int i = 0; i < nm; ++i) {
          pts.row(i) = (ray.origin + ts[i] * ray.dir).transpose();
          dirs.row(i) = ray.dir.transpose();
        }
        auto [color, sigma] =
            models.scene->eval_graph(t, t.constant(pts), t.constant(dirs));
        const Mat delta = interval_widths(ts, cache.far).transpose();
        const Tape::Id c_m = volume_render_graph(t, sigma, color, delta);
        colors = colors < 0 ? c_m : t.concat_rows(colors, c_m);
      }
      const Tape::Id l_g = consistency_loss(t, colors);
      acc = acc < 0 ? l_g : t.add(acc, l_g);
    }
    out.consistency =
        t.scale_const(acc, real(1) / real(cache.groups.size()));
  }

  out.total = t.add(t.scale_const(out.recon_loss, alpha),
                    t.scale_const(out.consistency, beta));
  return out;
}

PipelineGraph build_sharp_graph(Tape& t, const SceneField& scene,
                                const PipelineCache& cache) {
  if (cache.rays.empty())
    throw std::invalid_argument("sharp graph: empty batch");
  const int n = static_cast<int>(cache.t_samples.front().size());
  std::vector<int> all(cache.rays.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  const SubsetConstants c = subset_constants(cache, all, n);

  PipelineGraph out;
  out.ray_order = all;
  auto [color, sigma] = scene.eval_graph(t, t.constant(c.points0),
                                         t.constant(c.dirs_rep));
  out.predicted = volume_render_graph(t, sigma, color, c.delta);
  const Tape::Id diff = t.sub(out.predicted, t.constant(c.target));
  out.recon_loss = t.scale_const(
      t.sum(t.mul(diff, diff)),
      real(1) / (real(3) * real(cache.rays.size())));
  out.consistency = t.scalar(0);
  out.total = out.recon_loss;
  return out;
}

Image render_novel(const SceneField& scene, const Camera& cam,
                   const SampleConfig& scfg, std::mt19937_64& rng) {
  PipelineModels models;
  models.scene = const_cast<SceneField*>(&scene);
  Image img = Image::zero(cam.height, cam.width);
  for (int i = 0; i < cam.height; ++i)
    for (int j = 0; j < cam.width; ++j) {
      const Ray ray = pixel_ray(cam, 0, i, j);
      const Vec ts =
          sample_ray(models, scfg, ray, cam.near, cam.far, rng);
      const int nm = static_cast<int>(ts.size());
      Mat pts(nm, 3), dirs(nm, 3);
      for (int s = 0; s < nm; ++s) {
        pts.row(s) = (ray.origin + ts[s] * ray.dir).transpose();
        dirs.row(s) = ray.dir.transpose();
      }
      Mat color;
      Vec sigma;
      scene.eval(pts, dirs, color, sigma);
      const RenderResult rr = volume_render(ts, cam.far, color, sigma);
      img.set_pixel(i, j, rr.color.cwiseMax(real(0)).cwiseMin(real(1)));
    }
  return img;
}

}  // namespace dusk
