#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "transnet/config.hpp"
#include "transnet/graph.hpp"
#include "transnet/model.hpp"
#include "transnet/pipeline.hpp"

namespace transnet::training {

enum class RunMode {
  transnet,     // pre-train on both graphs, then fine-tune on the target
  target_only,  // same target branch trained from scratch on the few-shot nodes
};

const char* to_string(RunMode mode);

struct SeedResult {
  std::uint64_t seed = 0;
  double precision = 0.0;
  double macro_precision = 0.0;
  LossTrace pretrain;
  std::vector<double> finetune;
  double seconds = 0.0;
};

struct MetricsReport {
  TrainConfig config;
  RunMode mode = RunMode::transnet;
  std::vector<SeedResult> seeds;
  double precision_mean = 0.0;
  double precision_std = 0.0;  // population standard deviation
  double macro_precision_mean = 0.0;
  double wall_clock_seconds = 0.0;

  nlohmann::ordered_json to_json() const;
};

/// Checkpoint metadata: configuration, shapes and the split seed, enough for
/// `eval` to rebuild the model and the evaluation split.
std::string checkpoint_metadata(const TrainConfig& cfg, const ModelShape& shape,
                                std::uint64_t seed);

struct LoadedModel {
  TrainConfig config;
  std::uint64_t seed = 0;
  TransNetModel model;
};
LoadedModel load_trained_model(const std::filesystem::path& path);

/// Shared-vocabulary check; throws std::invalid_argument on mismatch.
void check_compatible(const graph::LabeledGraph& source, const graph::LabeledGraph& target);

/// split -> pretrain -> finetune -> evaluate for one seed. The target-only
/// mode skips pre-training and trains for pretrain + finetune epochs.
SeedResult run_seed(const graph::LabeledGraph& source, const graph::LabeledGraph& target,
                    const TrainConfig& cfg, std::uint64_t seed, RunMode mode = RunMode::transnet,
                    std::optional<TransNetModel>* trained = nullptr);

struct ExperimentOptions {
  std::size_t num_seeds = 1;
  std::size_t jobs = 1;
  RunMode mode = RunMode::transnet;
};

/// Runs seeds cfg.seed, cfg.seed + 1, ...; seeds may run on parallel workers.
/// When `last_model` is given it receives the model trained with the last seed.
MetricsReport run_experiment(const graph::LabeledGraph& source, const graph::LabeledGraph& target,
                             const TrainConfig& cfg, const ExperimentOptions& options,
                             std::optional<TransNetModel>* last_model = nullptr);
MetricsReport run_experiment(const std::filesystem::path& source_dir,
                             const std::filesystem::path& target_dir, const TrainConfig& cfg,
                             const ExperimentOptions& options);

}  // namespace transnet::training
