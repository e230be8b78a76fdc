#pragma once

#include <vector>

#include "dusk/param_store.hpp"
#include "dusk/types.hpp"

namespace dusk {

// Reverse-mode tape over matrix-valued nodes. Nodes are created eagerly
// (forward values computed at record time) in topological order; backward
// walks the tape in reverse and accumulates gradients of a scalar loss into
// the trainable blocks of the attached ParameterStore.
class Tape {
 public:
  using Id = int;

  explicit Tape(ParameterStore* store = nullptr) : store_(store) {}

  // leaves
  Id constant(Mat v);
  Id scalar(real v) { return constant(Mat::Constant(1, 1, v)); }
  Id param(int block_id);

  // binary, same shape
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id mul(Id a, Id b);  // elementwise
  Id matmul(Id a, Id b);
  // broadcast: b is 1 x C, applied to every row of a
  Id add_row(Id a, Id b);
  Id sub_row(Id a, Id b);
  // broadcast: b is R x 1, applied to every column of a
  Id mul_col(Id a, Id b);
  Id div_col(Id a, Id b);
  // s is 1 x 1
  Id scale(Id s, Id a);

  // unary
  Id scale_const(Id a, real c);
  Id add_const(Id a, real c);
  Id sin(Id a);
  Id cos(Id a);
  Id exp(Id a);
  Id sqrt(Id a);
  Id relu(Id a);
  Id sigmoid(Id a);
  Id softplus(Id a);
  Id abs(Id a);
  Id detach(Id a);  // identity forward, gradient barrier
  Id transpose(Id a);

  // reductions / structure
  Id sum(Id a);      // -> 1 x 1
  Id row_sum(Id a);  // R x C -> R x 1
  Id col_sum(Id a);  // R x C -> 1 x C
  Id cumsum_excl_rows(Id a);  // exclusive prefix sum along each row
  Id concat_cols(Id a, Id b);
  Id concat_rows(Id a, Id b);
  Id block(Id a, int r0, int c0, int rows, int cols);
  Id reshape(Id a, int rows, int cols);      // row-major reinterpretation
  Id repeat_rows(Id a, int n);               // each row repeated n times

  // entire-function rotation coefficients in s = theta^2:
  //   rot_a(s) = sin(t)/t, rot_b(s) = (1-cos(t))/t^2, rot_c(s) = (t-sin(t))/t^3
  // with t = sqrt(s); smooth at s = 0 via series.
  Id rot_a(Id a);
  Id rot_b(Id a);
  Id rot_c(Id a);

  const Mat& val(Id id) const { return nodes_[static_cast<size_t>(id)].val; }
  real scalar_val(Id id) const { return val(id)(0, 0); }
  int rows(Id id) const { return static_cast<int>(val(id).rows()); }
  int cols(Id id) const { return static_cast<int>(val(id).cols()); }
  size_t size() const { return nodes_.size(); }

  // Reverse sweep from a 1x1 loss node. Accumulates into store gradients
  // (trainable blocks only). Throws if the loss is not scalar.
  void backward(Id loss);

  // Gradient of the last backward() w.r.t. an arbitrary node (testing aid).
  const Mat& node_grad(Id id) const { return nodes_[static_cast<size_t>(id)].grad; }

 private:
  enum class Op {
    Constant, Param, Add, Sub, Mul, MatMul, AddRow, SubRow, MulCol, DivCol,
    Scale, ScaleConst, AddConst, Sin, Cos, Exp, Sqrt, Relu, Sigmoid, Softplus,
    Abs, Detach, Transpose, Sum, RowSum, ColSum, CumsumExcl, ConcatCols,
    ConcatRows, Block, Reshape, RepeatRows, RotA, RotB, RotC
  };

  struct Node {
    Op op;
    Id a = -1, b = -1;
    Mat val;
    Mat grad;
    real c = 0;                // scalar payload
    int i0 = 0, i1 = 0, i2 = 0, i3 = 0;  // block/reshape geometry
    int pblock = -1;           // parameter block id
  };

  Id push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size()) - 1;
  }
  Node& at(Id id) { return nodes_[static_cast<size_t>(id)]; }

  ParameterStore* store_;
  std::vector<Node> nodes_;
};

}  // namespace dusk
