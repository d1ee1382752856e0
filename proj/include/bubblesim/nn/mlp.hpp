#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "bubblesim/random.hpp"

namespace bubblesim::nn {

/// Two tanh hidden layers feeding a policy head (logits) and a value head.
///
/// All weights live in one flat vector; the layer matrices are Eigen::Map
/// views into it, so optimizers and finite-difference checks work on the
/// flat vector directly. Inputs are column-major batches (features x batch).
template <typename Scalar>
class PolicyValueNet {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Vector>;
  using ConstVectorMap = Eigen::Map<const Vector>;

  struct Forward {
    Matrix input;
    Matrix h1;
    Matrix h2;
    Matrix logits;  // actions x batch
    RowVector values;
  };

  PolicyValueNet() = default;
  PolicyValueNet(int inputs, int hidden, int actions)
      : inputs_(inputs), hidden_(hidden), actions_(actions), params_(Vector::Zero(count(inputs, hidden, actions))) {}

  static Eigen::Index count(int in, int h, int a) { return h * in + h + h * h + h + a * h + a + h + 1; }

  int inputs() const { return inputs_; }
  int hidden() const { return hidden_; }
  int actions() const { return actions_; }
  Eigen::Index size() const { return params_.size(); }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  /// Scaled-normal init; the policy head starts near uniform.
  void init(RandomStream& rng) {
    auto fill = [&](auto&& m, double scale) {
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(rng.normal() * scale);
    };
    params_.setZero();
    fill(w1(), 1.0 / std::sqrt(static_cast<double>(inputs_)));
    fill(w2(), 1.0 / std::sqrt(static_cast<double>(hidden_)));
    fill(wp(), 0.01 / std::sqrt(static_cast<double>(hidden_)));
    fill(wv(), 1.0 / std::sqrt(static_cast<double>(hidden_)));
  }

  Forward forward(const Matrix& x) const {
    if (x.rows() != inputs_) throw std::invalid_argument("input width mismatch");
    Forward f;
    f.input = x;
    f.h1 = ((w1() * x).colwise() + b1()).array().tanh().matrix();
    f.h2 = ((w2() * f.h1).colwise() + b2()).array().tanh().matrix();
    f.logits = (wp() * f.h2).colwise() + bp();
    f.values = (wv() * f.h2).array() + bv()(0);
    return f;
  }

  /// Gradient of a loss with d loss/d logits = dlogits and d loss/d values =
  /// dvalues, written into `grad` (same layout as params()).
  void backward(const Forward& f, const Matrix& dlogits, const RowVector& dvalues, Vector& grad) const {
    grad.setZero(params_.size());
    Grads g(grad, inputs_, hidden_, actions_);
    g.wp = dlogits * f.h2.transpose();
    g.bp = dlogits.rowwise().sum();
    g.wv = dvalues * f.h2.transpose();
    g.bv(0) = dvalues.sum();
    Matrix dh2 = wp().transpose() * dlogits + wv().transpose() * dvalues;
    dh2.array() *= (Scalar(1) - f.h2.array().square());
    g.w2 = dh2 * f.h1.transpose();
    g.b2 = dh2.rowwise().sum();
    Matrix dh1 = w2().transpose() * dh2;
    dh1.array() *= (Scalar(1) - f.h1.array().square());
    g.w1 = dh1 * f.input.transpose();
    g.b1 = dh1.rowwise().sum();
  }

  // Layer views. Layout: W1 b1 W2 b2 Wp bp Wv bv.
  MatrixMap w1() { return {ptr(0), hidden_, inputs_}; }
  ConstMatrixMap w1() const { return {ptr(0), hidden_, inputs_}; }
  VectorMap b1() { return {ptr(off_b1()), hidden_}; }
  ConstVectorMap b1() const { return {ptr(off_b1()), hidden_}; }
  MatrixMap w2() { return {ptr(off_w2()), hidden_, hidden_}; }
  ConstMatrixMap w2() const { return {ptr(off_w2()), hidden_, hidden_}; }
  VectorMap b2() { return {ptr(off_b2()), hidden_}; }
  ConstVectorMap b2() const { return {ptr(off_b2()), hidden_}; }
  MatrixMap wp() { return {ptr(off_wp()), actions_, hidden_}; }
  ConstMatrixMap wp() const { return {ptr(off_wp()), actions_, hidden_}; }
  VectorMap bp() { return {ptr(off_bp()), actions_}; }
  ConstVectorMap bp() const { return {ptr(off_bp()), actions_}; }
  MatrixMap wv() { return {ptr(off_wv()), 1, hidden_}; }
  ConstMatrixMap wv() const { return {ptr(off_wv()), 1, hidden_}; }
  VectorMap bv() { return {ptr(off_bv()), 1}; }
  ConstVectorMap bv() const { return {ptr(off_bv()), 1}; }

 private:
  struct Grads {
    MatrixMap w1;
    VectorMap b1;
    MatrixMap w2;
    VectorMap b2;
    MatrixMap wp;
    VectorMap bp;
    MatrixMap wv;
    VectorMap bv;

    Grads(Vector& v, int in, int h, int a)
        : w1(v.data(), h, in),
          b1(v.data() + h * in, h),
          w2(v.data() + h * in + h, h, h),
          b2(v.data() + h * in + h + h * h, h),
          wp(v.data() + h * in + 2 * h + h * h, a, h),
          bp(v.data() + h * in + 2 * h + h * h + a * h, a),
          wv(v.data() + h * in + 2 * h + h * h + a * h + a, 1, h),
          bv(v.data() + h * in + 3 * h + h * h + a * h + a, 1) {}
  };

  Eigen::Index off_b1() const { return hidden_ * inputs_; }
  Eigen::Index off_w2() const { return off_b1() + hidden_; }
  Eigen::Index off_b2() const { return off_w2() + hidden_ * hidden_; }
  Eigen::Index off_wp() const { return off_b2() + hidden_; }
  Eigen::Index off_bp() const { return off_wp() + actions_ * hidden_; }
  Eigen::Index off_wv() const { return off_bp() + actions_; }
  Eigen::Index off_bv() const { return off_wv() + hidden_; }

  Scalar* ptr(Eigen::Index off) { return params_.data() + off; }
  const Scalar* ptr(Eigen::Index off) const { return params_.data() + off; }

  int inputs_{0};
  int hidden_{0};
  int actions_{0};
  Vector params_;
};

/// Column-wise softmax, shifted by the column max.
template <typename Derived>
auto softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = logits;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    out.col(c).array() -= out.col(c).maxCoeff();
    out.col(c) = out.col(c).array().exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

/// Column-wise log-softmax.
template <typename Derived>
auto log_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = logits;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const Scalar m = out.col(c).maxCoeff();
    const Scalar lse = m + std::log((out.col(c).array() - m).exp().sum());
    out.col(c).array() -= lse;
  }
  return out;
}

}  // namespace bubblesim::nn
