#include <cmath>
#include <string>

#include "transnet/tensor.hpp"

namespace transnet::compute {

namespace {

Tensor zero_scalar() { return Tensor::constant(Matrix::Zero(1, 1)); }

Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out = logits;
  for (Index r = 0; r < out.rows(); ++r) {
    const double m = out.row(r).maxCoeff();
    const double lse = m + std::log((out.row(r).array() - m).exp().sum());
    out.row(r).array() -= lse;
  }
  return out;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

Matrix softmax_rows(const Matrix& logits) { return log_softmax_rows(logits).array().exp().matrix(); }

Tensor softmax_cross_entropy(const Tensor& logits, const Matrix& target,
                             std::span<const double> mask) {
  if (target.rows() != logits.rows() || target.cols() != logits.cols()) {
    throw ShapeError("softmax_cross_entropy: target shape differs from logits");
  }
  if (static_cast<Index>(mask.size()) != logits.rows()) {
    throw ShapeError("softmax_cross_entropy: mask length differs from batch size");
  }
  double active = 0.0;
  for (std::size_t r = 0; r < mask.size(); ++r) {
    if (mask[r] == 0.0) continue;
    active += 1.0;
    const double total = target.row(static_cast<Index>(r)).sum();
    if (std::abs(total - 1.0) > 1e-6 || (target.row(static_cast<Index>(r)).array() < 0.0).any()) {
      throw std::invalid_argument("softmax_cross_entropy: target row " + std::to_string(r) +
                                  " is not a distribution");
    }
  }
  if (active == 0.0) return zero_scalar();

  const Matrix log_p = log_softmax_rows(logits.value());
  const Vector weights =
      Eigen::Map<const Vector>(mask.data(), static_cast<Index>(mask.size())) / active;
  Matrix out(1, 1);
  out(0, 0) = -(weights.asDiagonal() * target.cwiseProduct(log_p)).sum();
  return Tensor::make_result(std::move(out), {logits},
                             [log_p, target, weights](detail::Node& self) {
                               // d/dz of -sum_c t_c log softmax(z)_c = softmax(z) * sum_c t_c - t.
                               const Vector mass = target.rowwise().sum();
                               Matrix g = log_p.array().exp().matrix();
                               g = mass.asDiagonal() * g - target;
                               self.parents[0]->accumulate_expr(self.grad(0, 0) *
                                                                (weights.asDiagonal() * g));
                             });
}

Tensor mse(const Tensor& pred, const Vector& target, std::span<const double> mask) {
  if (pred.cols() != 1 || pred.rows() != target.size() ||
      static_cast<Index>(mask.size()) != target.size()) {
    throw ShapeError("mse: prediction, target and mask lengths must agree");
  }
  const Vector m = Eigen::Map<const Vector>(mask.data(), static_cast<Index>(mask.size()));
  const double active = m.sum();
  if (active == 0.0) return zero_scalar();
  const Vector residual = pred.value().col(0) - target;
  Matrix out(1, 1);
  out(0, 0) = m.dot(residual.cwiseAbs2()) / active;
  return Tensor::make_result(std::move(out), {pred}, [residual, m, active](detail::Node& self) {
    const Vector g = (2.0 * self.grad(0, 0) / active) * m.cwiseProduct(residual);
    self.parents[0]->accumulate(g);
  });
}

Tensor binary_cross_entropy_logits(const Tensor& logits, std::span<const double> targets) {
  if (logits.cols() != 1 || static_cast<Index>(targets.size()) != logits.rows()) {
    throw ShapeError("binary_cross_entropy_logits: logits must be [B x 1] with B targets");
  }
  if (targets.empty()) throw std::invalid_argument("binary_cross_entropy_logits: empty batch");
  const auto batch = static_cast<double>(targets.size());
  const Vector y = Eigen::Map<const Vector>(targets.data(), static_cast<Index>(targets.size()));
  double total = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    const double z = logits.value()(i, 0);
    // -[y log s(z) + (1 - y) log s(-z)] = y softplus(-z) + (1 - y) softplus(z)
    total += y(i) * softplus(-z) + (1.0 - y(i)) * softplus(z);
  }
  Matrix out(1, 1);
  out(0, 0) = total / batch;
  return Tensor::make_result(std::move(out), {logits}, [y, batch](detail::Node& self) {
    const auto& z = self.parents[0]->value;
    Vector g(y.size());
    for (Index i = 0; i < y.size(); ++i) {
      const double zi = z(i, 0);
      const double s = zi >= 0.0 ? 1.0 / (1.0 + std::exp(-zi)) : std::exp(zi) / (1.0 + std::exp(zi));
      g(i) = (s - y(i)) * self.grad(0, 0) / batch;
    }
    self.parents[0]->accumulate(g);
  });
}

}  // namespace transnet::compute
