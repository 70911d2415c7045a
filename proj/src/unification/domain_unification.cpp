#include <cmath>

#include "transnet/domain_unification.hpp"

namespace transnet::unification {

Tensor encode_features(const FeatureEncoder& encoder, const Tensor& features) {
  if (static_cast<std::size_t>(features.cols()) != encoder.in_dim()) {
    throw compute::ShapeError("encode_features: features have " + std::to_string(features.cols()) +
                              " columns, encoder expects " + std::to_string(encoder.in_dim()));
  }
  return encoder.forward(features);
}

Tensor encode_features(const FeatureEncoder& encoder, const graph::LabeledGraph& g) {
  return encode_features(encoder, Tensor::constant(g.features()));
}

Tensor encode_structure(const SharedGnn& gnn, const Tensor& h, const Propagator& a_hat) {
  if (static_cast<std::size_t>(h.cols()) != gnn.in_dim()) {
    throw compute::ShapeError("encode_structure: input width " + std::to_string(h.cols()) +
                              " but GNN expects " + std::to_string(gnn.in_dim()));
  }
  return gnn.forward(h, a_hat);
}

Tensor discrepancy_term(const DomainDiscriminator& disc, const Tensor& source, const Tensor& target,
                        double mu) {
  if (source.rows() == 0 || target.rows() == 0) {
    throw std::invalid_argument("domain_loss: both domains need at least one node");
  }
  const Tensor joined = compute::concat_rows(source, target);
  std::vector<double> labels(static_cast<std::size_t>(joined.rows()), 1.0);
  std::fill(labels.begin(), labels.begin() + source.rows(), 0.0);
  return compute::binary_cross_entropy_logits(
      disc.logits(compute::gradient_reversal(joined, mu)), labels);
}

DomainLoss domain_loss(const DomainDiscriminator& feature_disc,
                       const DomainDiscriminator& structure_disc, const Tensor& h_source,
                       const Tensor& h_target, const Tensor& z_source, const Tensor& z_target,
                       double mu, const DomainLossOptions& options) {
  DomainLoss out;
  out.feature_term = options.feature_level
                         ? discrepancy_term(feature_disc, h_source, h_target, mu)
                         : Tensor::constant(Matrix::Zero(1, 1));
  out.structure_term = options.structure_level
                           ? discrepancy_term(structure_disc, z_source, z_target, mu)
                           : Tensor::constant(Matrix::Zero(1, 1));
  out.total = compute::add(out.feature_term, out.structure_term);
  return out;
}

double grl_schedule(double progress) {
  if (!(progress >= 0.0 && progress <= 1.0)) {
    throw std::invalid_argument("grl_schedule: progress must lie in [0, 1]");
  }
  return 2.0 / (1.0 + std::exp(-10.0 * progress)) - 1.0;
}

}  // namespace transnet::unification
