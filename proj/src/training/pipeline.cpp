#include "transnet/pipeline.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace transnet::training {

DomainData make_domain_data(const graph::LabeledGraph& g, graph::FewShotSplit split) {
  DomainData d;
  d.graph = &g;
  d.a_hat = unification::Propagator::for_graph(g);
  d.features = Tensor::constant(g.features());
  d.visible_labels.assign(g.num_nodes(), std::nullopt);
  for (std::size_t c = 0; c < split.labeled_nodes.size(); ++c) {
    for (graph::NodeId v : split.labeled_nodes[c]) d.visible_labels[v] = static_cast<int>(c);
  }
  d.split = std::move(split);
  return d;
}

Tensor total_loss(const Tensor& domain_term, const Tensor& signal_term, double gamma) {
  return compute::add(domain_term, compute::scale(signal_term, gamma));
}

StepLosses pretrain_losses(const TransNetModel& model, const DomainData& source,
                           const DomainData& target, const TrainConfig& cfg, std::size_t epoch,
                           trinity::PprCache* source_ppr, trinity::PprCache* target_ppr) {
  const Tensor h_s = unification::encode_features(model.source_encoder, source.features);
  const Tensor h_t = unification::encode_features(model.target_encoder, target.features);
  const Tensor z_s = unification::encode_structure(model.gnn, h_s, source.a_hat);
  const Tensor z_t = unification::encode_structure(model.gnn, h_t, target.a_hat);

  const double progress =
      cfg.pretrain_epochs == 0 ? 0.0
                               : static_cast<double>(epoch) / static_cast<double>(cfg.pretrain_epochs);
  const double mu = unification::grl_schedule(std::min(progress, 1.0));

  StepLosses out;
  out.domain = unification::domain_loss(model.feature_discriminator, model.structure_discriminator,
                                        h_s, h_t, z_s, z_t, mu,
                                        {!cfg.disable_unif_f, !cfg.disable_unif_s})
                   .total;

  const trinity::DomainSample source_sample{source.graph, z_s, source.visible_labels, source_ppr};
  const trinity::DomainSample target_sample{target.graph, z_t, target.visible_labels, target_ppr};
  const trinity::TrinityBatch batch = trinity::sample_trinity_batch(
      source_sample, target_sample, cfg.sampler(), epoch, model.trinity_layer);
  Rng mix_rng = make_rng({cfg.seed, epoch, 0x3d1});
  out.signal = trinity::signal_loss(batch, model.classifier_g, cfg.alpha, !cfg.disable_mixup,
                                    {!cfg.disable_node_signals, !cfg.disable_link_signals},
                                    mix_rng);
  out.total = total_loss(out.domain, out.signal, cfg.gamma);
  return out;
}

LossTrace pretrain(TransNetModel& model, const DomainData& source, const DomainData& target,
                   const TrainConfig& cfg) {
  cfg.validate();
  if (source.graph->label_vocab() != target.graph->label_vocab()) {
    throw std::invalid_argument("pretrain: source and target label vocabularies differ");
  }
  bool any_source_label = false;
  for (const auto& label : source.visible_labels) any_source_label = any_source_label || label;
  if (!any_source_label) throw std::invalid_argument("pretrain: source has no labeled nodes");

  std::unique_ptr<trinity::PprCache> source_ppr;
  std::unique_ptr<trinity::PprCache> target_ppr;
  if (cfg.connection_mode == trinity::ConnectionMode::ppr) {
    source_ppr = std::make_unique<trinity::PprCache>(*source.graph, cfg.ppr_teleport);
    target_ppr = std::make_unique<trinity::PprCache>(*target.graph, cfg.ppr_teleport);
  }

  const compute::AdamOptions adam{cfg.lr};
  const auto params = model.pretrain_parameters();
  LossTrace trace;
  for (std::size_t epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
    const StepLosses losses =
        pretrain_losses(model, source, target, cfg, epoch, source_ppr.get(), target_ppr.get());
    trace.domain.push_back(losses.domain.item());
    trace.signal.push_back(losses.signal.item());
    trace.total.push_back(losses.total.item());
    compute::backward(losses.total);
    compute::adam_step(params, adam);
  }
  return trace;
}

Tensor target_embeddings(const TransNetModel& model, const DomainData& target) {
  const Tensor h = unification::encode_features(model.target_encoder, target.features);
  return unification::encode_structure(model.gnn, h, target.a_hat);
}

std::vector<double> finetune(TransNetModel& model, const DomainData& target, const TrainConfig& cfg,
                             std::size_t epochs) {
  const std::vector<graph::NodeId> train = target.split.train_nodes();
  if (train.empty()) throw std::invalid_argument("finetune: no few-shot labeled target nodes");

  model.init_classifier_h(cfg.seed);
  const auto params = model.finetune_parameters();
  for (auto* p : params) p->reset_adam();

  const auto classes = static_cast<Eigen::Index>(model.shape().num_classes);
  compute::Matrix onehot = compute::Matrix::Zero(static_cast<Eigen::Index>(train.size()), classes);
  for (std::size_t r = 0; r < train.size(); ++r) {
    onehot(static_cast<Eigen::Index>(r), *target.graph->labels()[train[r]]) = 1.0;
  }
  const std::vector<double> mask(train.size(), 1.0);

  const compute::AdamOptions adam{cfg.lr};
  std::vector<double> trace;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const Tensor z = target_embeddings(model, target);
    const Tensor logits = (*model.classifier_h)(compute::gather_rows(z, train));
    const Tensor loss = compute::softmax_cross_entropy(logits, onehot, mask);
    trace.push_back(loss.item());
    compute::backward(loss);
    compute::adam_step(params, adam);
  }
  return trace;
}

std::vector<double> finetune(TransNetModel& model, const DomainData& target,
                             const TrainConfig& cfg) {
  return finetune(model, target, cfg, cfg.finetune_epochs);
}

std::vector<int> predict(const TransNetModel& model, const DomainData& target) {
  if (!model.classifier_h) throw std::logic_error("predict: classifier h is not initialized");
  const compute::Matrix logits = (*model.classifier_h)(target_embeddings(model, target)).value();
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index best = 0;
    logits.row(r).maxCoeff(&best);
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

PrecisionScores score_predictions(const std::vector<int>& predicted,
                                  const std::vector<std::optional<int>>& truth,
                                  const std::vector<graph::NodeId>& eval_nodes,
                                  std::size_t num_classes) {
  if (eval_nodes.empty()) throw std::invalid_argument("evaluate: empty evaluation set");
  std::vector<double> predicted_count(num_classes, 0.0);
  std::vector<double> correct_count(num_classes, 0.0);
  double correct = 0.0;
  for (graph::NodeId v : eval_nodes) {
    if (!truth.at(v)) throw std::invalid_argument("evaluate: evaluation node without a label");
    const int guess = predicted.at(v);
    predicted_count[static_cast<std::size_t>(guess)] += 1.0;
    if (guess == *truth[v]) {
      correct += 1.0;
      correct_count[static_cast<std::size_t>(guess)] += 1.0;
    }
  }
  PrecisionScores scores;
  scores.micro = correct / static_cast<double>(eval_nodes.size());
  double macro_sum = 0.0;
  double macro_classes = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (predicted_count[c] == 0.0) continue;
    macro_sum += correct_count[c] / predicted_count[c];
    macro_classes += 1.0;
  }
  scores.macro = macro_classes > 0.0 ? macro_sum / macro_classes : 0.0;
  return scores;
}

PrecisionScores evaluate(const TransNetModel& model, const DomainData& target,
                         const std::vector<graph::NodeId>& eval_nodes) {
  return score_predictions(predict(model, target), target.graph->labels(), eval_nodes,
                           model.shape().num_classes);
}

double evaluate_precision(const TransNetModel& model, const DomainData& target,
                          const std::vector<graph::NodeId>& eval_nodes) {
  return evaluate(model, target, eval_nodes).micro;
}

}  // namespace transnet::training
