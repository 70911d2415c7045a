#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "transnet/checkpoint.hpp"
#include "transnet/config.hpp"
#include "transnet/domain_unification.hpp"
#include "transnet/trinity.hpp"

namespace transnet::training {

using compute::Parameter;
using unification::DomainDiscriminator;
using unification::FeatureEncoder;
using unification::Linear;
using unification::SharedGnn;

/// Shapes that determine the model's parameter layout.
struct ModelShape {
  std::size_t source_feature_dim = 0;
  std::size_t target_feature_dim = 0;
  std::size_t num_classes = 0;
  std::size_t unified_dim = 100;
  std::vector<std::size_t> gnn_dims = {64, 32, 16};
  std::size_t trinity_dim = 32;

  static ModelShape from(const TrainConfig& cfg, std::size_t source_feature_dim,
                         std::size_t target_feature_dim, std::size_t num_classes);
};

/// Parameter container: per-domain encoders, shared GNN, feature- and
/// structure-level discriminators, trinity layer, classifier g and, after
/// fine-tune initialization, the downstream classifier h.
class TransNetModel {
 public:
  TransNetModel(const ModelShape& shape, std::uint64_t seed);

  TransNetModel(const TransNetModel&) = delete;
  TransNetModel& operator=(const TransNetModel&) = delete;
  TransNetModel(TransNetModel&&) = default;
  TransNetModel& operator=(TransNetModel&&) = default;

  const ModelShape& shape() const { return shape_; }

  FeatureEncoder source_encoder;
  FeatureEncoder target_encoder;
  SharedGnn gnn;
  DomainDiscriminator feature_discriminator;
  DomainDiscriminator structure_discriminator;
  Linear trinity_layer;
  trinity::TrinityClassifier classifier_g;
  std::optional<Linear> classifier_h;

  /// Creates h (gnn_out_dim -> num_classes) from a seeded generator.
  void init_classifier_h(std::uint64_t seed);

  /// Everything updated by pre-training (h excluded).
  std::vector<Parameter*> pretrain_parameters();
  /// Target encoder, GNN and h.
  std::vector<Parameter*> finetune_parameters();
  std::vector<Parameter*> all_parameters();
  std::vector<const Parameter*> all_parameters() const;

  compute::Checkpoint to_checkpoint(std::string metadata) const;
  /// Rebuilds a model of `shape` and loads every tensor from `ckpt`.
  /// Throws CheckpointError on a missing, extra or mis-shaped tensor.
  static TransNetModel from_checkpoint(const ModelShape& shape, const compute::Checkpoint& ckpt);

 private:
  ModelShape shape_;
};

}  // namespace transnet::training
