#include "dusk/tape.hpp"

#include <cmath>
#include <stdexcept>

#include "dusk/rotation_series.hpp"

namespace dusk {

namespace {

real softplus1(real x) {
  if (x > real(30)) return x;
  return std::log1p(std::exp(x));
}

real sigmoid1(real x) {
  if (x >= 0) {
    const real e = std::exp(-x);
    return real(1) / (real(1) + e);
  }
  const real e = std::exp(x);
  return e / (real(1) + e);
}

}  // namespace

Tape::Id Tape::constant(Mat v) {
  Node n;
  n.op = Op::Constant;
  n.val = std::move(v);
  return push(std::move(n));
}

Tape::Id Tape::param(int block_id) {
  if (!store_) throw std::logic_error("tape has no parameter store");
  Node n;
  n.op = Op::Param;
  n.pblock = block_id;
  n.val = store_->block(block_id).value;
  return push(std::move(n));
}

#define DUSK_BINARY_SAME_SHAPE(name, OPK, expr)                              \
  Tape::Id Tape::name(Id a, Id b) {                                          \
    const Mat& A = val(a);                                                   \
    const Mat& B = val(b);                                                   \
    if (A.rows() != B.rows() || A.cols() != B.cols())                        \
      throw std::invalid_argument(#name ": shape mismatch");                 \
    Node n;                                                                  \
    n.op = Op::OPK;                                                          \
    n.a = a;                                                                 \
    n.b = b;                                                                 \
    n.val = (expr);                                                         \
    return push(std::move(n));                                               \
  }

DUSK_BINARY_SAME_SHAPE(add, Add, A + B)
DUSK_BINARY_SAME_SHAPE(sub, Sub, A - B)
DUSK_BINARY_SAME_SHAPE(mul, Mul, A.cwiseProduct(B))
#undef DUSK_BINARY_SAME_SHAPE

Tape::Id Tape::matmul(Id a, Id b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (A.cols() != B.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Node n;
  n.op = Op::MatMul;
  n.a = a;
  n.b = b;
  n.val = A * B;
  return push(std::move(n));
}

Tape::Id Tape::add_row(Id a, Id b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (B.rows() != 1 || B.cols() != A.cols())
    throw std::invalid_argument("add_row: broadcast shape mismatch");
  Node n;
  n.op = Op::AddRow;
  n.a = a;
  n.b = b;
  n.val = A.rowwise() + B.row(0);
  return push(std::move(n));
}

Tape::Id Tape::sub_row(Id a, Id b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (B.rows() != 1 || B.cols() != A.cols())
    throw std::invalid_argument("sub_row: broadcast shape mismatch");
  Node n;
  n.op = Op::SubRow;
  n.a = a;
  n.b = b;
  n.val = A.rowwise() - B.row(0);
  return push(std::move(n));
}

Tape::Id Tape::mul_col(Id a, Id b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (B.cols() != 1 || B.rows() != A.rows())
    throw std::invalid_argument("mul_col: broadcast shape mismatch");
  Node n;
  n.op = Op::MulCol;
  n.a = a;
  n.b = b;
  n.val = A.array().colwise() * B.col(0).array();
  return push(std::move(n));
}

Tape::Id Tape::div_col(Id a, Id b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (B.cols() != 1 || B.rows() != A.rows())
    throw std::invalid_argument("div_col: broadcast shape mismatch");
  Node n;
  n.op = Op::DivCol;
  n.a = a;
  n.b = b;
  n.val = A.array().colwise() / B.col(0).array();
  return push(std::move(n));
}

Tape::Id Tape::scale(Id s, Id a) {
  const Mat& S = val(s);
  if (S.rows() != 1 || S.cols() != 1)
    throw std::invalid_argument("scale: scalar operand must be 1x1");
  Node n;
  n.op = Op::Scale;
  n.a = s;
  n.b = a;
  n.val = S(0, 0) * val(a);
  return push(std::move(n));
}

#define DUSK_UNARY(name, OPK, expr)         \
  Tape::Id Tape::name(Id a) {               \
    const Mat& A = val(a);                  \
    Node n;                                 \
    n.op = Op::OPK;                         \
    n.a = a;                                \
    n.val = (expr);                         \
    return push(std::move(n));              \
  }

DUSK_UNARY(sin, Sin, A.array().sin().matrix())
DUSK_UNARY(cos, Cos, A.array().cos().matrix())
DUSK_UNARY(exp, Exp, A.array().exp().matrix())
DUSK_UNARY(sqrt, Sqrt, A.array().sqrt().matrix())
DUSK_UNARY(relu, Relu, A.cwiseMax(real(0)))
DUSK_UNARY(sigmoid, Sigmoid, A.unaryExpr([](real x) { return sigmoid1(x); }))
DUSK_UNARY(softplus, Softplus, A.unaryExpr([](real x) { return softplus1(x); }))
DUSK_UNARY(abs, Abs, A.cwiseAbs())
DUSK_UNARY(detach, Detach, A)
DUSK_UNARY(transpose, Transpose, A.transpose())
DUSK_UNARY(rot_a, RotA, A.unaryExpr([](real x) { return rot_a_f(x); }))
DUSK_UNARY(rot_b, RotB, A.unaryExpr([](real x) { return rot_b_f(x); }))
DUSK_UNARY(rot_c, RotC, A.unaryExpr([](real x) { return rot_c_f(x); }))
#undef DUSK_UNARY

Tape::Id Tape::scale_const(Id a, real c) {
  Node n;
  n.op = Op::ScaleConst;
  n.a = a;
  n.c = c;
  n.val = c * val(a);
  return push(std::move(n));
}

Tape::Id Tape::add_const(Id a, real c) {
  Node n;
  n.op = Op::AddConst;
  n.a = a;
  n.c = c;
  n.val = val(a).array() + c;
  return push(std::move(n));
}

Tape::Id Tape::sum(Id a) {
  Node n;
  n.op = Op::Sum;
  n.a = a;
  n.val = Mat::Constant(1, 1, val(a).sum());
  return push(std::move(n));
}

Tape::Id Tape::row_sum(Id a) {
  Node n;
  n.op = Op::RowSum;
  n.a = a;
  n.val = val(a).rowwise().sum();
  return push(std::move(n));
}

Tape::Id Tape::col_sum(Id a) {
  Node n;
  n.op = Op::ColSum;
  n.a = a;
  n.val = val(a).colwise().sum();
  return push(std::move(n));
}

Tape::Id Tape::cumsum_excl_rows(Id a) {
  const Mat& A = val(a);
  Node n;
  n.op = Op::CumsumExcl;
  n.a = a;
  n.val = Mat::Zero(A.rows(), A.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    real acc = 0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      n.val(i, j) = acc;
      acc += A(i, j);
    }
  }
  return push(std::move(n));
}

Tape::Id Tape::concat_cols(Id a, Id b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (A.rows() != B.rows()) throw std::invalid_argument("concat_cols: row mismatch");
  Node n;
  n.op = Op::ConcatCols;
  n.a = a;
  n.b = b;
  n.val.resize(A.rows(), A.cols() + B.cols());
  n.val << A, B;
  n.i0 = static_cast<int>(A.cols());
  return push(std::move(n));
}

Tape::Id Tape::concat_rows(Id a, Id b) {
  const Mat& A = val(a);
  const Mat& B = val(b);
  if (A.cols() != B.cols()) throw std::invalid_argument("concat_rows: col mismatch");
  Node n;
  n.op = Op::ConcatRows;
  n.a = a;
  n.b = b;
  n.val.resize(A.rows() + B.rows(), A.cols());
  n.val << A, B;
  n.i0 = static_cast<int>(A.rows());
  return push(std::move(n));
}

Tape::Id Tape::block(Id a, int r0, int c0, int rows, int cols) {
  const Mat& A = val(a);
  if (r0 < 0 || c0 < 0 || r0 + rows > A.rows() || c0 + cols > A.cols())
    throw std::invalid_argument("block: out of range");
  Node n;
  n.op = Op::Block;
  n.a = a;
  n.i0 = r0;
  n.i1 = c0;
  n.i2 = rows;
  n.i3 = cols;
  n.val = A.block(r0, c0, rows, cols);
  return push(std::move(n));
}

Tape::Id Tape::reshape(Id a, int rows, int cols) {
  const Mat& A = val(a);
  if (static_cast<long>(rows) * cols != A.size())
    throw std::invalid_argument("reshape: element count mismatch");
  Node n;
  n.op = Op::Reshape;
  n.a = a;
  n.val.resize(rows, cols);
  const int sc = static_cast<int>(A.cols());
  for (long k = 0; k < A.size(); ++k)
    n.val(k / cols, k % cols) = A(k / sc, k % sc);
  return push(std::move(n));
}

Tape::Id Tape::repeat_rows(Id a, int rep) {
  const Mat& A = val(a);
  Node n;
  n.op = Op::RepeatRows;
  n.a = a;
  n.i0 = rep;
  n.val.resize(A.rows() * rep, A.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (int t = 0; t < rep; ++t) n.val.row(i * rep + t) = A.row(i);
  return push(std::move(n));
}

void Tape::backward(Id loss) {
  Node& top = at(loss);
  if (top.val.rows() != 1 || top.val.cols() != 1)
    throw std::invalid_argument("backward: loss must be scalar");

  for (auto& n : nodes_) n.grad.resize(0, 0);
  top.grad = Mat::Constant(1, 1, real(1));

  auto acc = [&](Id id, const Mat& g) {
    Node& n = at(id);
    if (n.grad.size() == 0)
      n.grad = Mat::Zero(n.val.rows(), n.val.cols());
    n.grad += g;
  };

  for (Id id = static_cast<Id>(nodes_.size()) - 1; id >= 0; --id) {
    Node& n = at(id);
    if (n.grad.size() == 0) continue;  // not on a path to the loss
    const Mat& G = n.grad;
    switch (n.op) {
      case Op::Constant:
        break;
      case Op::Param:
        if (store_) {
          ParamBlock& b = store_->block(n.pblock);
          if (b.trainable) b.grad += G;
        }
        break;
      case Op::Add:
        acc(n.a, G);
        acc(n.b, G);
        break;
      case Op::Sub:
        acc(n.a, G);
        acc(n.b, -G);
        break;
      case Op::Mul:
        acc(n.a, G.cwiseProduct(val(n.b)));
        acc(n.b, G.cwiseProduct(val(n.a)));
        break;
      case Op::MatMul:
        acc(n.a, G * val(n.b).transpose());
        acc(n.b, val(n.a).transpose() * G);
        break;
      case Op::AddRow:
        acc(n.a, G);
        acc(n.b, G.colwise().sum());
        break;
      case Op::SubRow:
        acc(n.a, G);
        acc(n.b, -G.colwise().sum());
        break;
      case Op::MulCol:
        acc(n.a, (G.array().colwise() * val(n.b).col(0).array()).matrix());
        acc(n.b, G.cwiseProduct(val(n.a)).rowwise().sum());
        break;
      case Op::DivCol: {
        const auto binv = val(n.b).col(0).array().inverse();
        acc(n.a, (G.array().colwise() * binv).matrix());
        acc(n.b, (-(G.cwiseProduct(n.val)).rowwise().sum().array() * binv).matrix());
        break;
      }
      case Op::Scale:
        acc(n.a, Mat::Constant(1, 1, G.cwiseProduct(val(n.b)).sum()));
        acc(n.b, val(n.a)(0, 0) * G);
        break;
      case Op::ScaleConst:
        acc(n.a, n.c * G);
        break;
      case Op::AddConst:
        acc(n.a, G);
        break;
      case Op::Sin:
        acc(n.a, G.cwiseProduct(val(n.a).array().cos().matrix()));
        break;
      case Op::Cos:
        acc(n.a, -G.cwiseProduct(val(n.a).array().sin().matrix()));
        break;
      case Op::Exp:
        acc(n.a, G.cwiseProduct(n.val));
        break;
      case Op::Sqrt:
        acc(n.a, (G.array() / (2 * n.val.array())).matrix());
        break;
      case Op::Relu:
        acc(n.a, G.cwiseProduct(val(n.a).unaryExpr(
                     [](real x) { return x > 0 ? real(1) : real(0); })));
        break;
      case Op::Sigmoid:
        acc(n.a, G.cwiseProduct(
                     (n.val.array() * (1 - n.val.array())).matrix()));
        break;
      case Op::Softplus:
        acc(n.a, G.cwiseProduct(val(n.a).unaryExpr(
                     [](real x) { return sigmoid1(x); })));
        break;
      case Op::Abs:
        acc(n.a, G.cwiseProduct(val(n.a).unaryExpr([](real x) {
              return x > 0 ? real(1) : (x < 0 ? real(-1) : real(0));
            })));
        break;
      case Op::Detach:
        break;
      case Op::Transpose:
        acc(n.a, G.transpose());
        break;
      case Op::Sum:
        acc(n.a, Mat::Constant(val(n.a).rows(), val(n.a).cols(), G(0, 0)));
        break;
      case Op::RowSum:
        acc(n.a, G.replicate(1, val(n.a).cols()));
        break;
      case Op::ColSum:
        acc(n.a, G.replicate(val(n.a).rows(), 1));
        break;
      case Op::CumsumExcl: {
        // d out(i,j')/d in(i,j) = 1 for j' > j: reverse exclusive suffix sum
        const Mat& A = val(n.a);
        Mat ga = Mat::Zero(A.rows(), A.cols());
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
          real acc2 = 0;
          for (Eigen::Index j = A.cols() - 1; j >= 0; --j) {
            ga(i, j) = acc2;
            acc2 += G(i, j);
          }
        }
        acc(n.a, ga);
        break;
      }
      case Op::ConcatCols:
        acc(n.a, G.leftCols(n.i0));
        acc(n.b, G.rightCols(G.cols() - n.i0));
        break;
      case Op::ConcatRows:
        acc(n.a, G.topRows(n.i0));
        acc(n.b, G.bottomRows(G.rows() - n.i0));
        break;
      case Op::Block: {
        Mat ga = Mat::Zero(val(n.a).rows(), val(n.a).cols());
        ga.block(n.i0, n.i1, n.i2, n.i3) = G;
        acc(n.a, ga);
        break;
      }
      case Op::Reshape: {
        const Mat& A = val(n.a);
        Mat ga(A.rows(), A.cols());
        const int sc = static_cast<int>(A.cols());
        const int dc = static_cast<int>(n.val.cols());
        for (long k = 0; k < A.size(); ++k)
          ga(k / sc, k % sc) = G(k / dc, k % dc);
        acc(n.a, ga);
        break;
      }
      case Op::RepeatRows: {
        const Mat& A = val(n.a);
        Mat ga = Mat::Zero(A.rows(), A.cols());
        for (Eigen::Index i = 0; i < A.rows(); ++i)
          for (int t = 0; t < n.i0; ++t) ga.row(i) += G.row(i * n.i0 + t);
        acc(n.a, ga);
        break;
      }
      case Op::RotA:
        acc(n.a, G.cwiseProduct(val(n.a).unaryExpr([](real x) { return rot_a_d(x); })));
        break;
      case Op::RotB:
        acc(n.a, G.cwiseProduct(val(n.a).unaryExpr([](real x) { return rot_b_d(x); })));
        break;
      case Op::RotC:
        acc(n.a, G.cwiseProduct(val(n.a).unaryExpr([](real x) { return rot_c_d(x); })));
        break;
    }
  }
}

}  // namespace dusk
