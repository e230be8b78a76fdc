#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dusk/types.hpp"

namespace dusk {

// Named parameter blocks. Every trainable quantity of the model lives here;
// gradients are accumulated into `grad` by Tape::backward.
struct ParamBlock {
  std::string name;
  bool trainable = true;
  Mat value;
  Mat grad;
};

class ParameterStore {
 public:
  int add(const std::string& name, int rows, int cols, bool trainable = true) {
    if (find(name) >= 0)
      throw std::invalid_argument("duplicate parameter block: " + name);
    ParamBlock b;
    b.name = name;
    b.trainable = trainable;
    b.value = Mat::Zero(rows, cols);
    b.grad = Mat::Zero(rows, cols);
    blocks_.push_back(std::move(b));
    return static_cast<int>(blocks_.size()) - 1;
  }

  int find(const std::string& name) const {
    for (size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i].name == name) return static_cast<int>(i);
    return -1;
  }

  ParamBlock& block(int id) { return blocks_.at(static_cast<size_t>(id)); }
  const ParamBlock& block(int id) const { return blocks_.at(static_cast<size_t>(id)); }

  ParamBlock& block(const std::string& name) {
    int id = find(name);
    if (id < 0) throw std::invalid_argument("no such parameter block: " + name);
    return blocks_[static_cast<size_t>(id)];
  }

  int size() const { return static_cast<int>(blocks_.size()); }

  void zero_grad() {
    for (auto& b : blocks_) b.grad.setZero();
  }

  long scalar_count(bool trainable_only = true) const {
    long n = 0;
    for (const auto& b : blocks_)
      if (!trainable_only || b.trainable) n += b.value.size();
    return n;
  }

 private:
  std::vector<ParamBlock> blocks_;
};

}  // namespace dusk
