#include <unordered_set>

#include "transnet/tensor.hpp"

namespace transnet::compute {

void detail::Node::accumulate(const Matrix& g) { accumulate_expr(g); }

Tensor Tensor::constant(Matrix value) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  return Tensor(std::move(node));
}

Tensor Tensor::variable(Matrix value) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Tensor(std::move(node));
}

void Tensor::zero_grad() { node_->grad = Matrix::Zero(rows(), cols()); }

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) {
    throw ShapeError("item() on a tensor of shape " + std::to_string(rows()) + "x" +
                     std::to_string(cols()));
  }
  return node_->value(0, 0);
}

Tensor Tensor::make_result(Matrix value, std::vector<Tensor> parents,
                           std::function<void(detail::Node&)> backward) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  for (const auto& p : parents) node->requires_grad = node->requires_grad || p.requires_grad();
  if (node->requires_grad) {
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(p.node_);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

Parameter::Parameter(std::string name, Matrix value)
    : name_(std::move(name)), tensor_(Tensor::variable(std::move(value))) {
  tensor_.zero_grad();
  reset_adam();
}

void Parameter::reset_adam() {
  adam_.first_moment = Matrix::Zero(tensor_.rows(), tensor_.cols());
  adam_.second_moment = Matrix::Zero(tensor_.rows(), tensor_.cols());
  adam_.step = 0;
}

void backward(const Tensor& loss) {
  if (!loss.defined()) throw std::invalid_argument("backward on an undefined tensor");
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw ShapeError("backward requires a scalar loss, got shape " + std::to_string(loss.rows()) +
                     "x" + std::to_string(loss.cols()));
  }
  if (!loss.requires_grad()) return;

  // Post-order DFS gives a topological order (parents before children).
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next_parent] = stack.back();
    if (next_parent < node->parents.size()) {
      detail::Node* parent = node->parents[next_parent++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (!node->backward) continue;
    if (node->grad.size() != 0) node->backward(*node);
    node->grad.resize(0, 0);
  }
}

}  // namespace transnet::compute
