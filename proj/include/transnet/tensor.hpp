#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace transnet::compute {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Index = Eigen::Index;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

struct Node {
  Matrix value;
  Matrix grad;  // empty until a gradient has been accumulated
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents' grads.
  std::function<void(Node&)> backward;

  void accumulate(const Matrix& g);
  template <typename Expr>
  void accumulate_expr(const Expr& g) {
    if (grad.size() == 0) {
      grad = g;
    } else {
      grad += g;
    }
  }
};

}  // namespace detail

/// Handle to a node of the computation graph. Copies share the node.
///
/// All tensors are two-dimensional; vectors are stored as [B x 1] columns and
/// scalars as [1 x 1].
class Tensor {
 public:
  Tensor() = default;

  /// Leaf that never receives gradients.
  static Tensor constant(Matrix value);
  /// Leaf that accumulates gradients.
  static Tensor variable(Matrix value);

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  bool requires_grad() const { return node_->requires_grad; }

  bool has_grad() const { return node_->grad.size() != 0; }
  const Matrix& grad() const { return node_->grad; }
  /// Sets the gradient buffer to zeros of the value's shape.
  void zero_grad();
  /// Drops the gradient buffer entirely.
  void clear_grad() { node_->grad.resize(0, 0); }

  /// Value of a [1 x 1] tensor.
  double item() const;

  /// Result node with the given parents; requires_grad is inherited.
  static Tensor make_result(Matrix value, std::vector<Tensor> parents,
                            std::function<void(detail::Node&)> backward);

  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

struct AdamState {
  Matrix first_moment;
  Matrix second_moment;
  long step = 0;
};

/// Named trainable tensor with its own Adam moments.
class Parameter {
 public:
  Parameter() = default;
  Parameter(std::string name, Matrix value);
  Parameter(const Parameter&) = delete;
  Parameter& operator=(const Parameter&) = delete;
  Parameter(Parameter&&) = default;
  Parameter& operator=(Parameter&&) = default;

  const std::string& name() const { return name_; }
  Tensor& tensor() { return tensor_; }
  const Tensor& tensor() const { return tensor_; }
  const Matrix& value() const { return tensor_.value(); }
  AdamState& adam() { return adam_; }
  const AdamState& adam() const { return adam_; }
  void reset_adam();

 private:
  std::string name_;
  Tensor tensor_;
  AdamState adam_;
};

/// Reverse-mode accumulation from a [1 x 1] loss. Leaf gradients add to
/// whatever they already hold; intermediate gradients are released afterwards.
void backward(const Tensor& loss);

// ---- differentiable operations ---------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
/// x W + b with W [in x out] and b [1 x out].
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);
Tensor linear(const Tensor& x, const Parameter& weight, const Parameter& bias);
/// a_hat * x for a fixed sparse operator (no gradient to a_hat).
Tensor propagate(std::shared_ptr<const SparseMatrix> a_hat, const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
/// Identity forward; backward multiplies the incoming gradient by -mu.
Tensor gradient_reversal(const Tensor& x, double mu);

Tensor concat_rows(const Tensor& top, const Tensor& bottom);
Tensor concat_cols(const Tensor& left, const Tensor& right);
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows);
/// Row-wise convex combination: out_i = l_i * a_i + (1 - l_i) * b_i.
Tensor mix_rows(const Tensor& a, const Tensor& b, std::span<const double> lambdas);
Tensor sum(const Tensor& x);

// ---- losses ----------------------------------------------------------------

/// Mean over unmasked rows of -sum_c target * log softmax(logits).
/// Targets may be soft. Returns 0 with no gradient when every row is masked.
Tensor softmax_cross_entropy(const Tensor& logits, const Matrix& target,
                             std::span<const double> mask);
/// Mean over unmasked entries of (pred - target)^2; pred is [B x 1].
Tensor mse(const Tensor& pred, const Vector& target, std::span<const double> mask);
/// Mean of the logistic loss in log-sum-exp form; logits [B x 1], targets {0,1}.
Tensor binary_cross_entropy_logits(const Tensor& logits, std::span<const double> targets);

/// Row-wise softmax of a plain matrix.
Matrix softmax_rows(const Matrix& logits);

// ---- optimizer -------------------------------------------------------------

struct AdamOptions {
  double lr = 3e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update per parameter, then zeroes each gradient.
/// Throws if a parameter has no gradient buffer.
void adam_step(std::span<Parameter* const> params, const AdamOptions& options);

}  // namespace transnet::compute
