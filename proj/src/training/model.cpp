#include "transnet/model.hpp"

#include <set>

namespace transnet::training {

ModelShape ModelShape::from(const TrainConfig& cfg, std::size_t source_feature_dim,
                            std::size_t target_feature_dim, std::size_t num_classes) {
  ModelShape s;
  s.source_feature_dim = source_feature_dim;
  s.target_feature_dim = target_feature_dim;
  s.num_classes = num_classes;
  s.unified_dim = cfg.unified_dim;
  s.gnn_dims = cfg.gnn_dims;
  s.trinity_dim = cfg.trinity_dim;
  return s;
}

namespace {

Rng init_rng(std::uint64_t seed, std::uint64_t stream) { return make_rng({seed, 0x1417, stream}); }

}  // namespace

TransNetModel::TransNetModel(const ModelShape& shape, std::uint64_t seed) : shape_(shape) {
  if (shape.num_classes == 0) throw std::invalid_argument("model needs at least one class");
  Rng rng = init_rng(seed, 0);
  source_encoder = FeatureEncoder("source_encoder", shape.source_feature_dim, shape.unified_dim, rng);
  target_encoder = FeatureEncoder("target_encoder", shape.target_feature_dim, shape.unified_dim, rng);
  gnn = SharedGnn("gnn", shape.unified_dim, shape.gnn_dims, rng);
  feature_discriminator = DomainDiscriminator("feature_discriminator", shape.unified_dim, rng);
  structure_discriminator = DomainDiscriminator("structure_discriminator", gnn.out_dim(), rng);
  trinity_layer = Linear("trinity_layer", 2 * gnn.out_dim(), shape.trinity_dim, rng);
  classifier_g = trinity::TrinityClassifier("classifier_g", shape.trinity_dim, shape.num_classes, rng);
}

void TransNetModel::init_classifier_h(std::uint64_t seed) {
  Rng rng = init_rng(seed, 1);
  classifier_h.emplace("classifier_h", gnn.out_dim(), shape_.num_classes, rng);
}

std::vector<Parameter*> TransNetModel::pretrain_parameters() {
  std::vector<Parameter*> out;
  source_encoder.collect(out);
  target_encoder.collect(out);
  gnn.collect(out);
  feature_discriminator.collect(out);
  structure_discriminator.collect(out);
  trinity_layer.collect(out);
  classifier_g.collect(out);
  return out;
}

std::vector<Parameter*> TransNetModel::finetune_parameters() {
  if (!classifier_h) throw std::logic_error("classifier h has not been initialized");
  std::vector<Parameter*> out;
  target_encoder.collect(out);
  gnn.collect(out);
  classifier_h->collect(out);
  return out;
}

std::vector<Parameter*> TransNetModel::all_parameters() {
  auto out = pretrain_parameters();
  if (classifier_h) classifier_h->collect(out);
  return out;
}

std::vector<const Parameter*> TransNetModel::all_parameters() const {
  auto params = const_cast<TransNetModel*>(this)->all_parameters();
  return {params.begin(), params.end()};
}

compute::Checkpoint TransNetModel::to_checkpoint(std::string metadata) const {
  compute::Checkpoint ckpt;
  ckpt.metadata = std::move(metadata);
  for (const Parameter* p : all_parameters()) ckpt.tensors.emplace(p->name(), p->value());
  return ckpt;
}

TransNetModel TransNetModel::from_checkpoint(const ModelShape& shape,
                                             const compute::Checkpoint& ckpt) {
  TransNetModel model(shape, 0);
  if (ckpt.tensors.count("classifier_h.weight") != 0) model.init_classifier_h(0);
  std::set<std::string> loaded;
  for (Parameter* p : model.all_parameters()) {
    const auto it = ckpt.tensors.find(p->name());
    if (it == ckpt.tensors.end()) {
      throw compute::CheckpointError("checkpoint is missing tensor '" + p->name() + "'");
    }
    if (it->second.rows() != p->value().rows() || it->second.cols() != p->value().cols()) {
      throw compute::CheckpointError("checkpoint tensor '" + p->name() + "' has the wrong shape");
    }
    p->tensor().mutable_value() = it->second;
    loaded.insert(p->name());
  }
  if (loaded.size() != ckpt.tensors.size()) {
    throw compute::CheckpointError("checkpoint contains tensors this model does not have");
  }
  return model;
}

}  // namespace transnet::training
