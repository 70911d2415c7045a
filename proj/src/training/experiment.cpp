#include "transnet/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "transnet/dataset_io.hpp"

namespace transnet::training {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

const char* to_string(RunMode mode) {
  return mode == RunMode::transnet ? "transnet" : "target_only";
}

nlohmann::ordered_json MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config.to_json();
  j["config_fingerprint"] = config.fingerprint();
  j["mode"] = to_string(mode);
  auto& list = j["seeds"] = nlohmann::ordered_json::array();
  for (const auto& s : seeds) {
    nlohmann::ordered_json e;
    e["seed"] = s.seed;
    e["precision"] = s.precision;
    e["macro_precision"] = s.macro_precision;
    e["loss_trace"] = mode == RunMode::transnet ? s.pretrain.total : s.finetune;
    e["loss_trace_domain"] = s.pretrain.domain;
    e["loss_trace_signal"] = s.pretrain.signal;
    e["finetune_trace"] = s.finetune;
    e["seconds"] = s.seconds;
    list.push_back(std::move(e));
  }
  j["precision_mean"] = precision_mean;
  j["precision_std"] = precision_std;
  j["macro_precision_mean"] = macro_precision_mean;
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

std::string checkpoint_metadata(const TrainConfig& cfg, const ModelShape& shape,
                                std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["format"] = "transnet-checkpoint";
  j["config"] = cfg.to_json();
  j["seed"] = seed;
  j["source_feature_dim"] = shape.source_feature_dim;
  j["target_feature_dim"] = shape.target_feature_dim;
  j["num_classes"] = shape.num_classes;
  return j.dump();
}

LoadedModel load_trained_model(const std::filesystem::path& path) {
  const compute::Checkpoint ckpt = compute::load_checkpoint(path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ckpt.metadata);
    if (meta.at("format") != "transnet-checkpoint") throw std::invalid_argument("format");
    TrainConfig cfg = TrainConfig::from_json(meta.at("config"));
    const auto seed = meta.at("seed").get<std::uint64_t>();
    const ModelShape shape = ModelShape::from(cfg, meta.at("source_feature_dim").get<std::size_t>(),
                                              meta.at("target_feature_dim").get<std::size_t>(),
                                              meta.at("num_classes").get<std::size_t>());
    return LoadedModel{cfg, seed, TransNetModel::from_checkpoint(shape, ckpt)};
  } catch (const compute::CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw compute::CheckpointError(std::string("checkpoint metadata is invalid: ") + e.what());
  }
}

void check_compatible(const graph::LabeledGraph& source, const graph::LabeledGraph& target) {
  if (source.label_vocab() != target.label_vocab()) {
    throw std::invalid_argument("source and target label vocabularies differ");
  }
  if (source.labeled_nodes().empty()) throw std::invalid_argument("source has no labeled nodes");
}

SeedResult run_seed(const graph::LabeledGraph& source, const graph::LabeledGraph& target,
                    const TrainConfig& base, std::uint64_t seed, RunMode mode,
                    std::optional<TransNetModel>* trained) {
  const auto start = Clock::now();
  check_compatible(source, target);
  TrainConfig cfg = base;
  cfg.seed = seed;
  cfg.validate();

  const DomainData source_data = make_domain_data(source, graph::full_split(source));
  const DomainData target_data =
      make_domain_data(target, graph::few_shot_split(target, cfg.n_shot, seed));
  TransNetModel model(
      ModelShape::from(cfg, source.feature_dim(), target.feature_dim(), target.num_classes()), seed);

  SeedResult result;
  result.seed = seed;
  if (mode == RunMode::transnet) {
    result.pretrain = pretrain(model, source_data, target_data, cfg);
    result.finetune = finetune(model, target_data, cfg);
  } else {
    result.finetune = finetune(model, target_data, cfg, cfg.pretrain_epochs + cfg.finetune_epochs);
  }
  const PrecisionScores scores = evaluate(model, target_data, target_data.split.eval_nodes);
  result.precision = scores.micro;
  result.macro_precision = scores.macro;
  result.seconds = seconds_since(start);
  if (trained != nullptr) trained->emplace(std::move(model));
  return result;
}

MetricsReport run_experiment(const graph::LabeledGraph& source, const graph::LabeledGraph& target,
                             const TrainConfig& cfg, const ExperimentOptions& options,
                             std::optional<TransNetModel>* last_model) {
  if (options.num_seeds == 0) throw std::invalid_argument("run_experiment: need at least one seed");
  cfg.validate();
  check_compatible(source, target);
  const auto start = Clock::now();

  MetricsReport report;
  report.config = cfg;
  report.mode = options.mode;
  report.seeds.resize(options.num_seeds);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < options.num_seeds; i = next++) {
      try {
        report.seeds[i] = run_seed(source, target, cfg, cfg.seed + i, options.mode,
                                   i + 1 == options.num_seeds ? last_model : nullptr);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.jobs, options.num_seeds));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  double sum = 0.0;
  double macro = 0.0;
  for (const auto& s : report.seeds) {
    sum += s.precision;
    macro += s.macro_precision;
  }
  const auto n = static_cast<double>(report.seeds.size());
  report.precision_mean = sum / n;
  report.macro_precision_mean = macro / n;
  double var = 0.0;
  for (const auto& s : report.seeds) var += (s.precision - report.precision_mean) * (s.precision - report.precision_mean);
  report.precision_std = std::sqrt(var / n);
  report.wall_clock_seconds = seconds_since(start);
  return report;
}

MetricsReport run_experiment(const std::filesystem::path& source_dir,
                             const std::filesystem::path& target_dir, const TrainConfig& cfg,
                             const ExperimentOptions& options) {
  const graph::LabeledGraph source = graph::load_graph(source_dir);
  const graph::LabeledGraph target = graph::load_graph(target_dir);
  return run_experiment(source, target, cfg, options);
}

}  // namespace transnet::training
