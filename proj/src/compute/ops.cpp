#include <string>

#include "transnet/tensor.hpp"

namespace transnet::compute {

namespace {

std::string shape_of(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

detail::Node& parent(detail::Node& self, std::size_t i) { return *self.parents[i]; }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ (" + shape_of(a) + " * " + shape_of(b) + ")");
  }
  Matrix out = a.value() * b.value();
  return Tensor::make_result(std::move(out), {a, b}, [](detail::Node& self) {
    auto& lhs = parent(self, 0);
    auto& rhs = parent(self, 1);
    if (lhs.requires_grad) lhs.accumulate_expr(self.grad * rhs.value.transpose());
    if (rhs.requires_grad) rhs.accumulate_expr(lhs.value.transpose() * self.grad);
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (x.cols() != weight.rows()) {
    throw ShapeError("linear: input " + shape_of(x) + " does not match weight " + shape_of(weight));
  }
  if (bias.rows() != 1 || bias.cols() != weight.cols()) {
    throw ShapeError("linear: bias " + shape_of(bias) + " does not match weight " +
                     shape_of(weight));
  }
  Matrix out = x.value() * weight.value();
  out.rowwise() += bias.value().row(0);
  return Tensor::make_result(std::move(out), {x, weight, bias}, [](detail::Node& self) {
    auto& in = parent(self, 0);
    auto& w = parent(self, 1);
    auto& b = parent(self, 2);
    if (in.requires_grad) in.accumulate_expr(self.grad * w.value.transpose());
    if (w.requires_grad) w.accumulate_expr(in.value.transpose() * self.grad);
    if (b.requires_grad) b.accumulate_expr(self.grad.colwise().sum());
  });
}

Tensor linear(const Tensor& x, const Parameter& weight, const Parameter& bias) {
  return linear(x, weight.tensor(), bias.tensor());
}

Tensor propagate(std::shared_ptr<const SparseMatrix> a_hat, const Tensor& x) {
  if (a_hat->cols() != x.rows()) {
    throw ShapeError("propagate: operator is " + std::to_string(a_hat->rows()) + "x" +
                     std::to_string(a_hat->cols()) + " but input is " + shape_of(x));
  }
  Matrix out = (*a_hat) * x.value();
  return Tensor::make_result(std::move(out), {x}, [a_hat](detail::Node& self) {
    parent(self, 0).accumulate_expr(a_hat->transpose() * self.grad);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("add: shapes differ (" + shape_of(a) + " vs " + shape_of(b) + ")");
  }
  Matrix out = a.value() + b.value();
  return Tensor::make_result(std::move(out), {a, b}, [](detail::Node& self) {
    for (std::size_t i = 0; i < 2; ++i) {
      if (parent(self, i).requires_grad) parent(self, i).accumulate(self.grad);
    }
  });
}

Tensor scale(const Tensor& x, double factor) {
  Matrix out = x.value() * factor;
  return Tensor::make_result(std::move(out), {x}, [factor](detail::Node& self) {
    parent(self, 0).accumulate_expr(self.grad * factor);
  });
}

Tensor relu(const Tensor& x) {
  Matrix out = x.value().cwiseMax(0.0);
  return Tensor::make_result(std::move(out), {x}, [](detail::Node& self) {
    auto& in = parent(self, 0);
    in.accumulate_expr((in.value.array() > 0.0).select(self.grad, 0.0));
  });
}

Tensor sigmoid(const Tensor& x) {
  Matrix out = (1.0 + (-x.value().array()).exp()).inverse().matrix();
  return Tensor::make_result(std::move(out), {x}, [](detail::Node& self) {
    const auto s = self.value.array();
    parent(self, 0).accumulate_expr((self.grad.array() * s * (1.0 - s)).matrix());
  });
}

Tensor tanh(const Tensor& x) {
  Matrix out = x.value().array().tanh().matrix();
  return Tensor::make_result(std::move(out), {x}, [](detail::Node& self) {
    const auto t = self.value.array();
    parent(self, 0).accumulate_expr((self.grad.array() * (1.0 - t * t)).matrix());
  });
}

Tensor gradient_reversal(const Tensor& x, double mu) {
  if (mu < 0.0) throw std::invalid_argument("gradient_reversal: mu must be nonnegative");
  return Tensor::make_result(x.value(), {x}, [mu](detail::Node& self) {
    parent(self, 0).accumulate_expr(self.grad * (-mu));
  });
}

Tensor concat_rows(const Tensor& top, const Tensor& bottom) {
  if (top.cols() != bottom.cols()) {
    throw ShapeError("concat_rows: column counts differ (" + shape_of(top) + " vs " +
                     shape_of(bottom) + ")");
  }
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top.value();
  out.bottomRows(bottom.rows()) = bottom.value();
  const Index split = top.rows();
  return Tensor::make_result(std::move(out), {top, bottom}, [split](detail::Node& self) {
    auto& a = parent(self, 0);
    auto& b = parent(self, 1);
    if (a.requires_grad) a.accumulate_expr(self.grad.topRows(split));
    if (b.requires_grad) b.accumulate_expr(self.grad.bottomRows(self.grad.rows() - split));
  });
}

Tensor concat_cols(const Tensor& left, const Tensor& right) {
  if (left.rows() != right.rows()) {
    throw ShapeError("concat_cols: row counts differ (" + shape_of(left) + " vs " +
                     shape_of(right) + ")");
  }
  Matrix out(left.rows(), left.cols() + right.cols());
  out.leftCols(left.cols()) = left.value();
  out.rightCols(right.cols()) = right.value();
  const Index split = left.cols();
  return Tensor::make_result(std::move(out), {left, right}, [split](detail::Node& self) {
    auto& a = parent(self, 0);
    auto& b = parent(self, 1);
    if (a.requires_grad) a.accumulate_expr(self.grad.leftCols(split));
    if (b.requires_grad) b.accumulate_expr(self.grad.rightCols(self.grad.cols() - split));
  });
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Index>(rows[i]) >= x.rows()) {
      throw ShapeError("gather_rows: row " + std::to_string(rows[i]) + " out of range for " +
                       shape_of(x));
    }
    out.row(static_cast<Index>(i)) = x.value().row(static_cast<Index>(rows[i]));
  }
  std::vector<std::size_t> index(rows.begin(), rows.end());
  return Tensor::make_result(std::move(out), {x}, [index = std::move(index)](detail::Node& self) {
    auto& in = parent(self, 0);
    Matrix g = Matrix::Zero(in.value.rows(), in.value.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
      g.row(static_cast<Index>(index[i])) += self.grad.row(static_cast<Index>(i));
    }
    in.accumulate(g);
  });
}

Tensor mix_rows(const Tensor& a, const Tensor& b, std::span<const double> lambdas) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("mix_rows: shapes differ (" + shape_of(a) + " vs " + shape_of(b) + ")");
  }
  if (static_cast<Index>(lambdas.size()) != a.rows()) {
    throw ShapeError("mix_rows: need one lambda per row");
  }
  const Vector lam = Eigen::Map<const Vector>(lambdas.data(), static_cast<Index>(lambdas.size()));
  const Vector rest = (1.0 - lam.array()).matrix();
  Matrix out = lam.asDiagonal() * a.value() + rest.asDiagonal() * b.value();
  return Tensor::make_result(std::move(out), {a, b}, [lam, rest](detail::Node& self) {
    auto& pa = parent(self, 0);
    auto& pb = parent(self, 1);
    if (pa.requires_grad) pa.accumulate_expr(lam.asDiagonal() * self.grad);
    if (pb.requires_grad) pb.accumulate_expr(rest.asDiagonal() * self.grad);
  });
}

Tensor sum(const Tensor& x) {
  Matrix out(1, 1);
  out(0, 0) = x.value().sum();
  return Tensor::make_result(std::move(out), {x}, [](detail::Node& self) {
    auto& in = parent(self, 0);
    in.accumulate_expr(Matrix::Constant(in.value.rows(), in.value.cols(), self.grad(0, 0)));
  });
}

}  // namespace transnet::compute
