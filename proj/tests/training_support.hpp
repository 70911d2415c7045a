#pragma once

#include <string>

#include "test_support.hpp"
#include "transnet/experiment.hpp"
#include "transnet/pipeline.hpp"

namespace transnet::testing {

inline training::TrainConfig tiny_config() {
  training::TrainConfig cfg;
  cfg.pretrain_epochs = 30;
  cfg.finetune_epochs = 20;
  cfg.unified_dim = 6;
  cfg.gnn_dims = {5, 4};
  cfg.trinity_dim = 4;
  cfg.k = 12;
  cfg.n_shot = 2;
  cfg.lr = 0.01;
  return cfg;
}

inline bool is_discriminator(const std::string& name) {
  return name.rfind("feature_discriminator", 0) == 0 ||
         name.rfind("structure_discriminator", 0) == 0;
}

/// Moves every bias off zero so no ReLU input sits exactly on its kink.
inline void jitter_biases(training::TransNetModel& model, std::uint64_t seed) {
  Rng rng = make_rng({seed, 0xb1a5});
  for (auto* p : model.pretrain_parameters()) {
    if (p->name().size() > 5 && p->name().compare(p->name().size() - 5, 5, ".bias") == 0) {
      p->tensor().mutable_value() += random_matrix(1, p->value().cols(), rng, 0.1);
    }
  }
}

/// Worst relative error of backward(L_total) against finite differences.
///
/// Parameters upstream of the reversal layer see +d(signal)*gamma
/// - mu*d(domain); the discriminators see the plain domain derivative.
inline double composed_gradient_error(training::TransNetModel& model,
                                      const training::DomainData& source,
                                      const training::DomainData& target,
                                      const training::TrainConfig& cfg, std::size_t epoch,
                                      trinity::PprCache* source_ppr = nullptr,
                                      trinity::PprCache* target_ppr = nullptr) {
  const double mu = unification::grl_schedule(
      std::min(1.0, static_cast<double>(epoch) / static_cast<double>(cfg.pretrain_epochs)));
  auto params = model.pretrain_parameters();
  for (auto* p : params) p->tensor().clear_grad();
  compute::backward(training::pretrain_losses(model, source, target, cfg, epoch, source_ppr, target_ppr).total);

  double worst = 0.0;
  for (auto* p : params) {
    Matrix& value = p->tensor().mutable_value();
    const Matrix d_domain = numeric_gradient(
        [&] { return training::pretrain_losses(model, source, target, cfg, epoch, source_ppr, target_ppr).domain.item(); },
        value);
    const Matrix d_signal = numeric_gradient(
        [&] { return training::pretrain_losses(model, source, target, cfg, epoch, source_ppr, target_ppr).signal.item(); },
        value);
    const double s = is_discriminator(p->name()) ? 1.0 : -mu;
    const Matrix expect = cfg.gamma * d_signal + s * d_domain;
    const Matrix analytic =
        p->tensor().has_grad() ? p->tensor().grad() : Matrix::Zero(value.rows(), value.cols());
    worst = std::max(worst, relative_error(analytic, expect));
  }
  return worst;
}

}  // namespace transnet::testing
