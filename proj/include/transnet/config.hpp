#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "transnet/trinity.hpp"

namespace transnet::training {

/// Every hyperparameter of a transfer run plus the ablation switches.
struct TrainConfig {
  std::size_t pretrain_epochs = 2000;
  std::size_t finetune_epochs = 800;
  double lr = 3e-3;
  double gamma = 1.0;
  double alpha = 1.0;
  std::size_t k = 256;
  std::size_t n_shot = 5;
  std::size_t unified_dim = 100;
  std::vector<std::size_t> gnn_dims = {64, 32, 16};
  std::size_t trinity_dim = 32;
  std::uint64_t seed = 0;

  double pos_fraction = 0.5;
  double target_fraction = 0.5;
  trinity::ConnectionMode connection_mode = trinity::ConnectionMode::edge_existence;
  double ppr_teleport = 0.15;

  bool disable_unif_f = false;
  bool disable_unif_s = false;
  bool disable_mixup = false;
  bool disable_node_signals = false;
  bool disable_link_signals = false;
  bool disable_target_signals = false;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  std::size_t gnn_out_dim() const { return gnn_dims.back(); }
  trinity::SamplerConfig sampler() const;

  nlohmann::ordered_json to_json() const;
  /// Overrides fields present in `doc`; unknown keys are rejected.
  void merge_json(const nlohmann::json& doc);
  static TrainConfig from_json(const nlohmann::json& doc);

  /// Hex FNV-1a digest of the canonical JSON form.
  std::string fingerprint() const;
};

}  // namespace transnet::training
