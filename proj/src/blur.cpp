#include "dusk/blur.hpp"

#include <cmath>
#include <stdexcept>

namespace dusk {

namespace {

// rows of the skew matrix, row-major, as a linear map of (x, y, z)
Mat skew_selector() {
  Mat s = Mat::Zero(9, 3);
  s(1, 2) = -1;
  s(2, 1) = 1;
  s(3, 2) = 1;
  s(5, 0) = -1;
  s(6, 1) = -1;
  s(7, 0) = 1;
  return s;
}

}  // namespace

RigidGraph se3_exp_graph(Tape& t, Tape::Id screw_row, bool raw_translation) {
  if (t.rows(screw_row) != 1 || t.cols(screw_row) != 6)
    throw std::invalid_argument("se3_exp_graph: expected a 1x6 screw row");
  const Tape::Id r = t.block(screw_row, 0, 0, 1, 3);
  const Tape::Id v = t.block(screw_row, 0, 3, 1, 3);
  const Tape::Id s = t.sum(t.mul(r, r));
  const Tape::Id k = t.reshape(t.matmul(t.constant(skew_selector()),
                                        t.transpose(r)),
                               3, 3);
  const Tape::Id k2 = t.matmul(k, k);
  const Tape::Id eye = t.constant(Mat::Identity(3, 3));

  RigidGraph out;
  out.rot = t.add(eye, t.add(t.scale(t.rot_a(s), k), t.scale(t.rot_b(s), k2)));
  if (raw_translation) {
    out.trans = v;
  } else {
    const Tape::Id vj =
        t.add(eye, t.add(t.scale(t.rot_b(s), k), t.scale(t.rot_c(s), k2)));
    out.trans = t.transpose(t.matmul(vj, t.transpose(v)));
  }
  return out;
}

Tape::Id transform_points_graph(Tape& t, Tape::Id pts, const RigidGraph& rt) {
  return t.add_row(t.matmul(pts, t.transpose(rt.rot)), rt.trans);
}

Tape::Id rotate_dirs_graph(Tape& t, Tape::Id dirs, const RigidGraph& rt) {
  const Tape::Id d = t.matmul(dirs, t.transpose(rt.rot));
  const Tape::Id norm = t.sqrt(t.row_sum(t.mul(d, d)));
  return t.div_col(d, norm);
}

BlurKernelNet::BlurKernelNet(ParameterStore& store, const std::string& prefix,
                             int n_views, const BlurKernelConfig& cfg,
                             std::mt19937_64& rng)
    : cfg_(cfg), n_views_(n_views), store_(&store) {
  if (n_views < 1 || cfg.k < 1 || cfg.latent_dim < 1)
    throw std::invalid_argument("blur kernel: bad view/motion/latent count");
  latent_block_ = store.add(prefix + "/latent", n_views, cfg.latent_dim);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  Mat& latent = store.block(latent_block_).value;
  for (Eigen::Index i = 0; i < latent.rows(); ++i)
    for (Eigen::Index j = 0; j < latent.cols(); ++j)
      latent(i, j) = real(u(rng));

  std::vector<LayerSpec> layers;
  layers.push_back({cfg.latent_dim, cfg.embed_width, Activation::Relu});
  for (int i = 1; i < cfg.embed_depth; ++i)
    layers.push_back({cfg.embed_width, cfg.embed_width, Activation::Relu});
  embed_ = Mlp(store, prefix + "/embed", layers, rng);

  rot_head_ = Mlp(store, prefix + "/rot",
                  {{cfg.embed_width, 3 * cfg.k, Activation::None}}, rng,
                  cfg.head_scale);
  trans_head_ = Mlp(store, prefix + "/trans",
                    {{cfg.embed_width, 3 * cfg.k, Activation::None}}, rng,
                    cfg.head_scale);
  weight_head_ = Mlp(store, prefix + "/weights",
                     {{cfg.embed_width, cfg.k + 1, Activation::None}}, rng,
                     cfg.head_scale);
}

void BlurKernelNet::check_view(int view) const {
  if (view < 0 || view >= n_views_)
    throw std::invalid_argument("blur kernel: unknown view");
}

void BlurKernelNet::motions(int view, std::vector<ScrewMotion>& screws,
                            Vec& weights) const {
  check_view(view);
  const Mat latent = store_->block(latent_block_).value.row(view);
  const Mat h = embed_.forward(latent);
  const Mat r = rot_head_.forward(h);
  const Mat v = trans_head_.forward(h);
  const Mat logits = weight_head_.forward(h);

  screws.resize(static_cast<size_t>(cfg_.k));
  for (int q = 0; q < cfg_.k; ++q) {
    screws[static_cast<size_t>(q)].r =
        Vec3(r(0, 3 * q), r(0, 3 * q + 1), r(0, 3 * q + 2));
    screws[static_cast<size_t>(q)].v =
        Vec3(v(0, 3 * q), v(0, 3 * q + 1), v(0, 3 * q + 2));
  }

  weights.resize(cfg_.k + 1);
  const real peak = logits.maxCoeff();
  for (int q = 0; q <= cfg_.k; ++q)
    weights[q] = std::exp(logits(0, q) - peak);
  weights /= weights.sum();
}

BlurKernelNet::MotionGraph BlurKernelNet::motions_graph(Tape& t,
                                                        int view) const {
  check_view(view);
  const Tape::Id latent =
      t.block(t.param(latent_block_), view, 0, 1, cfg_.latent_dim);
  const Tape::Id h = embed_.forward(t, latent);
  const Tape::Id r = t.reshape(rot_head_.forward(t, h), cfg_.k, 3);
  const Tape::Id v = t.reshape(trans_head_.forward(t, h), cfg_.k, 3);
  const Tape::Id logits = weight_head_.forward(t, h);
  const Tape::Id e = t.exp(logits);

  MotionGraph out;
  out.screws = t.concat_cols(r, v);
  out.weights = t.div_col(e, t.row_sum(e));
  return out;
}

long BlurKernelNet::param_count() const {
  return long(n_views_) * cfg_.latent_dim + embed_.param_count() +
         rot_head_.param_count() + trans_head_.param_count() +
         weight_head_.param_count();
}

Vec3 blur_compose(const Ray& ray, const std::vector<ScrewMotion>& motions,
                  const Vec& weights, const RenderFn& render,
                  bool raw_translation) {
  if (weights.size() != static_cast<Eigen::Index>(motions.size()) + 1)
    throw std::invalid_argument("blur_compose: weights must number k + 1");
  Vec3 out = weights[0] * render(ray);
  for (size_t q = 0; q < motions.size(); ++q) {
    const RigidTransform tf = se3_exp(motions[q], raw_translation);
    out += weights[static_cast<Eigen::Index>(q) + 1] *
           render(rigid_transform_ray(ray, tf));
  }
  return out;
}

RayPartition partition_rays(const std::vector<Ray>& batch, const Mat& mask) {
  RayPartition part;
  for (size_t i = 0; i < batch.size(); ++i) {
    const Ray& ray = batch[i];
    if (ray.row < 0 || ray.col < 0 || ray.row >= mask.rows() ||
        ray.col >= mask.cols())
      throw std::invalid_argument("partition_rays: ray pixel outside the mask");
    if (mask(ray.row, ray.col) == 1)
      part.clear.push_back(static_cast<int>(i));
    else
      part.noisy.push_back(static_cast<int>(i));
  }
  return part;
}

}  // namespace dusk
