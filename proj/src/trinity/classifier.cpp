#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "transnet/trinity.hpp"

namespace transnet::trinity {

TrinityClassifier::TrinityClassifier(const std::string& name, std::size_t trinity_dim,
                                     std::size_t num_classes, Rng& rng)
    : hidden(name + ".hidden", trinity_dim, kHiddenWidth, rng),
      head_y1(name + ".head_y1", kHiddenWidth, num_classes, rng),
      head_y2(name + ".head_y2", kHiddenWidth, num_classes, rng),
      head_p(name + ".head_p", kHiddenWidth, 1, rng) {}

void TrinityClassifier::collect(std::vector<compute::Parameter*>& out) {
  hidden.collect(out);
  head_y1.collect(out);
  head_y2.collect(out);
  head_p.collect(out);
}

ClassifierOutput classify_g(const Tensor& mixed_latent, const TrinityClassifier& g) {
  const Tensor h = compute::relu(g.hidden(mixed_latent));
  return ClassifierOutput{g.head_y1(h), g.head_y2(h), compute::sigmoid(g.head_p(h))};
}

MixupPlan MixupPlan::identity(std::size_t batch) {
  MixupPlan plan;
  plan.partner.resize(batch);
  std::iota(plan.partner.begin(), plan.partner.end(), std::size_t{0});
  plan.lambdas.assign(batch, 1.0);
  return plan;
}

MixupPlan draw_mixup_plan(std::size_t batch, double alpha, Rng& rng) {
  MixupPlan plan = MixupPlan::identity(batch);
  std::shuffle(plan.partner.begin(), plan.partner.end(), rng);
  for (auto& lambda : plan.lambdas) lambda = sample_lambda(alpha, rng);
  return plan;
}

Tensor signal_loss(const TrinityBatch& batch, const TrinityClassifier& g, const MixupPlan& plan,
                   const SignalLossOptions& options) {
  const std::size_t n = batch.size();
  if (n == 0) throw std::invalid_argument("signal_loss: empty batch");
  if (plan.partner.size() != n || plan.lambdas.size() != n) {
    throw std::invalid_argument("signal_loss: mixup plan does not match the batch");
  }

  const Tensor partners = compute::gather_rows(batch.latent, plan.partner);
  const Tensor mixed = compute::mix_rows(batch.latent, partners, plan.lambdas);

  const auto classes = static_cast<Eigen::Index>(batch.num_classes());
  Matrix y1(static_cast<Eigen::Index>(n), classes);
  Matrix y2(static_cast<Eigen::Index>(n), classes);
  Vector p(static_cast<Eigen::Index>(n));
  std::vector<double> mask1(n);
  std::vector<double> mask2(n);
  std::vector<double> mask_p(n, options.link_signals ? 1.0 : 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const TrinityLabel mixed_label =
        mixup_labels(batch.labels[r], batch.labels[plan.partner[r]], plan.lambdas[r]);
    const auto row = static_cast<Eigen::Index>(r);
    y1.row(row) = mixed_label.y1.transpose();
    y2.row(row) = mixed_label.y2.transpose();
    p(row) = mixed_label.p;
    mask1[r] = options.node_signals && mixed_label.y1_mask ? 1.0 : 0.0;
    mask2[r] = options.node_signals && mixed_label.y2_mask ? 1.0 : 0.0;
  }

  const ClassifierOutput out = classify_g(mixed, g);
  Tensor loss = compute::softmax_cross_entropy(out.y1_logits, y1, mask1);
  loss = compute::add(loss, compute::softmax_cross_entropy(out.y2_logits, y2, mask2));
  return compute::add(loss, compute::mse(out.p_pred, p, mask_p));
}

Tensor signal_loss(const TrinityBatch& batch, const TrinityClassifier& g, double alpha, bool mixup,
                   const SignalLossOptions& options, Rng& rng) {
  const MixupPlan plan =
      mixup ? draw_mixup_plan(batch.size(), alpha, rng) : MixupPlan::identity(batch.size());
  return signal_loss(batch, g, plan, options);
}

}  // namespace transnet::trinity
