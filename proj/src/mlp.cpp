#include "dusk/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace dusk {

Mlp::Mlp(ParameterStore& store, const std::string& prefix,
         std::vector<LayerSpec> layers, std::mt19937_64& rng,
         real final_weight_scale)
    : store_(&store), layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("mlp: empty layer spec");
  for (size_t i = 1; i < layers_.size(); ++i)
    if (layers_[i].in != layers_[i - 1].out)
      throw std::invalid_argument("mlp: inconsistent layer widths");

  for (size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    const int wid = store.add(prefix + "/W" + std::to_string(i), l.in, l.out);
    const int bid = store.add(prefix + "/b" + std::to_string(i), 1, l.out);
    real bound = real(1) / std::sqrt(real(l.in));
    if (i + 1 == layers_.size()) bound *= final_weight_scale;
    std::uniform_real_distribution<double> dist(-double(bound), double(bound));
    Mat& w = store.block(wid).value;
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = real(dist(rng));
    w_blocks_.push_back(wid);
    b_blocks_.push_back(bid);
  }
}

static Mat apply_act(Mat x, Activation act) {
  switch (act) {
    case Activation::None:
      return x;
    case Activation::Relu:
      return x.cwiseMax(real(0));
    case Activation::Sigmoid:
      return x.unaryExpr([](real v) {
        return v >= 0 ? real(1) / (real(1) + std::exp(-v))
                      : std::exp(v) / (real(1) + std::exp(v));
      });
    case Activation::Softplus:
      return x.unaryExpr(
          [](real v) { return v > real(30) ? v : std::log1p(std::exp(v)); });
  }
  return x;
}

Mat Mlp::forward(const Mat& x) const {
  if (x.cols() != layers_.front().in)
    throw std::invalid_argument("mlp forward: input width mismatch");
  Mat h = x;
  for (size_t i = 0; i < layers_.size(); ++i) {
    const Mat& w = store_->block(w_blocks_[i]).value;
    const Mat& b = store_->block(b_blocks_[i]).value;
    h = ((h * w).rowwise() + b.row(0)).eval();
    h = apply_act(std::move(h), layers_[i].act);
  }
  return h;
}

Tape::Id Mlp::forward(Tape& t, Tape::Id x) const {
  if (t.cols(x) != layers_.front().in)
    throw std::invalid_argument("mlp forward: input width mismatch");
  Tape::Id h = x;
  for (size_t i = 0; i < layers_.size(); ++i) {
    h = t.add_row(t.matmul(h, t.param(w_blocks_[i])), t.param(b_blocks_[i]));
    switch (layers_[i].act) {
      case Activation::None:
        break;
      case Activation::Relu:
        h = t.relu(h);
        break;
      case Activation::Sigmoid:
        h = t.sigmoid(h);
        break;
      case Activation::Softplus:
        h = t.softplus(h);
        break;
    }
  }
  return h;
}

long Mlp::param_count() const {
  long n = 0;
  for (size_t i = 0; i < layers_.size(); ++i)
    n += store_->block(w_blocks_[i]).value.size() +
         store_->block(b_blocks_[i]).value.size();
  return n;
}

}  // namespace dusk
