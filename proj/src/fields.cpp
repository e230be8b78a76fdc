#include "dusk/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace dusk {

SceneField::SceneField(ParameterStore& store, const std::string& prefix,
                       const SceneFieldConfig& cfg, std::mt19937_64& rng)
    : cfg_(cfg) {
  if (cfg.depth < 1 || cfg.width < 1)
    throw std::invalid_argument("scene field: bad depth/width");
  const int ex = cfg.pos_enc.encoded_width(3);
  const int ed = cfg.dir_enc.encoded_width(3);
  has_skip_ = cfg.skip > 0 && cfg.skip < cfg.depth;

  std::vector<LayerSpec> a;
  const int a_depth = has_skip_ ? cfg.skip : cfg.depth;
  a.push_back({ex, cfg.width, Activation::Relu});
  for (int i = 1; i < a_depth; ++i)
    a.push_back({cfg.width, cfg.width, Activation::Relu});
  trunk_a_ = Mlp(store, prefix + "/trunk_a", a, rng);

  if (has_skip_) {
    std::vector<LayerSpec> b;
    b.push_back({cfg.width + ex, cfg.width, Activation::Relu});
    for (int i = cfg.skip + 1; i < cfg.depth; ++i)
      b.push_back({cfg.width, cfg.width, Activation::Relu});
    trunk_b_ = Mlp(store, prefix + "/trunk_b", b, rng);
  }

  sigma_head_ = Mlp(store, prefix + "/sigma",
                    {{cfg.width, 1, Activation::None}}, rng);
  feat_head_ = Mlp(store, prefix + "/feat",
                   {{cfg.width, cfg.width, Activation::None}}, rng);
  const int cw = std::max(cfg.width / 2, 1);
  color_head_ = Mlp(store, prefix + "/color",
                    {{cfg.width + ed, cw, Activation::Relu},
                     {cw, 3, Activation::None}},
                    rng);
}

void SceneField::eval(const Mat& points, const Mat& dirs, Mat& color,
                      Vec& sigma) const {
  const Mat ex = positional_encode(points, cfg_.pos_enc);
  const Mat ed = positional_encode(dirs, cfg_.dir_enc);
  Mat h = trunk_a_.forward(ex);
  if (has_skip_) {
    Mat cat(h.rows(), h.cols() + ex.cols());
    cat << h, ex;
    h = trunk_b_.forward(cat);
  }
  sigma = sigma_head_.forward(h)
              .unaryExpr([](real x) {
                return x > real(30) ? x : std::log1p(std::exp(x));
              })
              .col(0);
  const Mat feat = feat_head_.forward(h);
  Mat cat(feat.rows(), feat.cols() + ed.cols());
  cat << feat, ed;
  color = color_head_.forward(cat).unaryExpr([](real x) {
    return x >= 0 ? real(1) / (real(1) + std::exp(-x))
                  : std::exp(x) / (real(1) + std::exp(x));
  });
}

std::pair<Tape::Id, Tape::Id> SceneField::eval_graph(Tape& t, Tape::Id points,
                                                     Tape::Id dirs) const {
  const Tape::Id ex = positional_encode(t, points, cfg_.pos_enc);
  const Tape::Id ed = positional_encode(t, dirs, cfg_.dir_enc);
  Tape::Id h = trunk_a_.forward(t, ex);
  if (has_skip_) h = trunk_b_.forward(t, t.concat_cols(h, ex));
  const Tape::Id sigma = t.softplus(sigma_head_.forward(t, h));
  const Tape::Id feat = feat_head_.forward(t, h);
  const Tape::Id color =
      t.sigmoid(color_head_.forward(t, t.concat_cols(feat, ed)));
  return {color, sigma};
}

long SceneField::param_count() const {
  long n = trunk_a_.param_count() + sigma_head_.param_count() +
           feat_head_.param_count() + color_head_.param_count();
  if (has_skip_) n += trunk_b_.param_count();
  return n;
}

NoiseField::NoiseField(ParameterStore& store, const std::string& prefix,
                       const NoiseFieldConfig& cfg, std::mt19937_64& rng)
    : cfg_(cfg) {
  const int in = cfg.pos_enc.encoded_width(3) + cfg.dir_enc.encoded_width(3);
  std::vector<LayerSpec> layers;
  layers.push_back({in, cfg.width, Activation::Relu});
  for (int i = 1; i < cfg.depth; ++i)
    layers.push_back({cfg.width, cfg.width, Activation::Relu});
  // linear output head, near-zero init: early training puts all signal in
  // the scene field
  layers.push_back({cfg.width, 3, Activation::None});
  mlp_ = Mlp(store, prefix, layers, rng, real(1e-2));
}

Mat NoiseField::eval(const Mat& mid_points, const Mat& dirs) const {
  const Mat ex = positional_encode(mid_points, cfg_.pos_enc);
  const Mat ed = positional_encode(dirs, cfg_.dir_enc);
  Mat cat(ex.rows(), ex.cols() + ed.cols());
  cat << ex, ed;
  return mlp_.forward(cat);
}

Tape::Id NoiseField::eval_graph(Tape& t, Tape::Id mid_points,
                                Tape::Id dirs) const {
  const Tape::Id ex = positional_encode(t, mid_points, cfg_.pos_enc);
  const Tape::Id ed = positional_encode(t, dirs, cfg_.dir_enc);
  return mlp_.forward(t, t.concat_cols(ex, ed));
}

}  // namespace dusk
