#pragma once

#include <random>
#include <string>
#include <vector>

#include "dusk/param_store.hpp"
#include "dusk/tape.hpp"
#include "dusk/types.hpp"

namespace dusk {

enum class Activation { None, Relu, Sigmoid, Softplus };

struct LayerSpec {
  int in = 0;
  int out = 0;
  Activation act = Activation::Relu;
};

// A plain dense chain. Weights live in the ParameterStore as
// "<prefix>/W<i>" (in x out) and "<prefix>/b<i>" (1 x out); inputs are
// row-batched (N x in). Initialization is uniform with fan-in scaling.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParameterStore& store, const std::string& prefix,
      std::vector<LayerSpec> layers, std::mt19937_64& rng,
      real final_weight_scale = 1);

  Mat forward(const Mat& x) const;
  Tape::Id forward(Tape& t, Tape::Id x) const;

  int input_dim() const { return layers_.front().in; }
  int output_dim() const { return layers_.back().out; }
  long param_count() const;
  const std::vector<int>& weight_blocks() const { return w_blocks_; }
  const std::vector<int>& bias_blocks() const { return b_blocks_; }

 private:
  ParameterStore* store_ = nullptr;
  std::vector<LayerSpec> layers_;
  std::vector<int> w_blocks_, b_blocks_;
};

}  // namespace dusk
