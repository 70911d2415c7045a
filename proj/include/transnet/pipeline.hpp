#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "transnet/config.hpp"
#include "transnet/domain_unification.hpp"
#include "transnet/graph.hpp"
#include "transnet/model.hpp"

namespace transnet::training {

using compute::Tensor;

/// A graph prepared for training: propagation operator, feature tensor and
/// the split deciding which labels training may see.
struct DomainData {
  const graph::LabeledGraph* graph = nullptr;
  unification::Propagator a_hat;
  Tensor features;
  graph::FewShotSplit split;
  std::vector<std::optional<int>> visible_labels;
};

DomainData make_domain_data(const graph::LabeledGraph& g, graph::FewShotSplit split);

struct LossTrace {
  std::vector<double> domain;
  std::vector<double> signal;
  std::vector<double> total;
};

/// L_total = L_domain + gamma * L_signal.
Tensor total_loss(const Tensor& domain_term, const Tensor& signal_term, double gamma);

/// Result of one pre-training step, before the optimizer update.
struct StepLosses {
  Tensor domain;
  Tensor signal;
  Tensor total;
};

/// Forward pass of one pre-training epoch (no parameter update).
StepLosses pretrain_losses(const TransNetModel& model, const DomainData& source,
                           const DomainData& target, const TrainConfig& cfg, std::size_t epoch,
                           trinity::PprCache* source_ppr = nullptr,
                           trinity::PprCache* target_ppr = nullptr);

/// Adversarial domain unification plus trinity-signal mixup on both graphs,
/// `cfg.pretrain_epochs` Adam steps over every parameter except h.
LossTrace pretrain(TransNetModel& model, const DomainData& source, const DomainData& target,
                   const TrainConfig& cfg);

/// Initializes h and trains {target encoder, GNN, h} on the few-shot target
/// nodes for `epochs` full-batch steps. Returns the per-epoch loss.
std::vector<double> finetune(TransNetModel& model, const DomainData& target, const TrainConfig& cfg,
                             std::size_t epochs);
std::vector<double> finetune(TransNetModel& model, const DomainData& target,
                             const TrainConfig& cfg);

/// Target embeddings from the target encoder and shared GNN.
Tensor target_embeddings(const TransNetModel& model, const DomainData& target);

/// argmax_c h(z)_c for every target node.
std::vector<int> predict(const TransNetModel& model, const DomainData& target);

struct PrecisionScores {
  double micro = 0.0;  // fraction correct
  double macro = 0.0;  // mean over predicted classes of per-class precision
};

PrecisionScores score_predictions(const std::vector<int>& predicted,
                                  const std::vector<std::optional<int>>& truth,
                                  const std::vector<graph::NodeId>& eval_nodes,
                                  std::size_t num_classes);

/// Micro-averaged precision of h on `eval_nodes`.
double evaluate_precision(const TransNetModel& model, const DomainData& target,
                          const std::vector<graph::NodeId>& eval_nodes);
PrecisionScores evaluate(const TransNetModel& model, const DomainData& target,
                         const std::vector<graph::NodeId>& eval_nodes);

}  // namespace transnet::training
