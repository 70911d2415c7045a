#include <cmath>
#include <stdexcept>

#include "transnet/trinity.hpp"

namespace transnet::trinity {

namespace {

Vector one_hot_or_zero(std::optional<int> label, std::size_t num_classes) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(num_classes));
  if (label) {
    if (*label < 0 || static_cast<std::size_t>(*label) >= num_classes) {
      throw std::out_of_range("label " + std::to_string(*label) + " outside " +
                              std::to_string(num_classes) + " classes");
    }
    v(*label) = 1.0;
  }
  return v;
}

}  // namespace

TrinityLabel make_label(std::optional<int> y_i, std::optional<int> y_j, double p,
                        std::size_t num_classes) {
  TrinityLabel label;
  label.y1 = one_hot_or_zero(y_i, num_classes);
  label.y2 = one_hot_or_zero(y_j, num_classes);
  label.p = p;
  label.y1_mask = y_i.has_value();
  label.y2_mask = y_j.has_value();
  return label;
}

std::size_t TrinityBatch::num_classes() const {
  return labels.empty() ? 0 : static_cast<std::size_t>(labels.front().y1.size());
}

TrinitySignal TrinityBatch::signal(std::size_t r) const {
  const std::size_t row[] = {r};
  return TrinitySignal{compute::gather_rows(latent, row), labels.at(r), domains.at(r)};
}

TrinitySignal build_trinity(const Tensor& e_i, const Tensor& e_j, std::optional<int> y_i,
                            std::optional<int> y_j, double p, const Linear& trinity_layer,
                            std::size_t num_classes, Domain domain) {
  if (e_i.rows() != 1 || e_j.rows() != 1 || e_i.cols() != e_j.cols()) {
    throw compute::ShapeError("build_trinity: embeddings must be two [1 x d] rows of equal width");
  }
  if (static_cast<std::size_t>(e_i.cols() + e_j.cols()) != trinity_layer.in_dim()) {
    throw compute::ShapeError("build_trinity: trinity layer expects input width " +
                              std::to_string(trinity_layer.in_dim()));
  }
  return TrinitySignal{trinity_layer(compute::concat_cols(e_i, e_j)),
                       make_label(y_i, y_j, p, num_classes), domain};
}

double sample_lambda(double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sample_lambda: alpha must be positive");
  std::gamma_distribution<double> gamma(alpha, 1.0);
  const double a = gamma(rng);
  const double b = gamma(rng);
  if (a + b == 0.0) return 0.5;  // both draws underflowed (tiny alpha)
  return a / (a + b);
}

Tensor mixup_signals(const TrinitySignal& t, const TrinitySignal& t_prime, double lambda) {
  if (t.latent.cols() != t_prime.latent.cols() || t.latent.rows() != t_prime.latent.rows()) {
    throw compute::ShapeError("mixup_signals: latent dimensions differ");
  }
  std::vector<double> lambdas(static_cast<std::size_t>(t.latent.rows()), lambda);
  return compute::mix_rows(t.latent, t_prime.latent, lambdas);
}

TrinityLabel mixup_labels(const TrinityLabel& y, const TrinityLabel& y_prime, double lambda) {
  if (y.y1.size() != y_prime.y1.size() || y.y2.size() != y_prime.y2.size()) {
    throw std::invalid_argument("mixup_labels: class counts differ");
  }
  TrinityLabel out;
  out.y1 = lambda * y.y1 + (1.0 - lambda) * y_prime.y1;
  out.y2 = lambda * y.y2 + (1.0 - lambda) * y_prime.y2;
  out.p = lambda * y.p + (1.0 - lambda) * y_prime.p;
  out.y1_mask = y.y1_mask && y_prime.y1_mask;
  out.y2_mask = y.y2_mask && y_prime.y2_mask;
  return out;
}

}  // namespace transnet::trinity
