#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "transnet/domain_unification.hpp"
#include "transnet/graph.hpp"
#include "transnet/random.hpp"
#include "transnet/tensor.hpp"

namespace transnet::trinity {

using compute::Matrix;
using compute::Tensor;
using compute::Vector;
using graph::NodeId;
using unification::Domain;
using unification::Linear;

/// Multi-label {y1, y2, p} of a signal pair. A class head whose mask is false
/// carries an all-zero row and is ignored by the loss.
struct TrinityLabel {
  Vector y1;
  Vector y2;
  double p = 0.0;
  bool y1_mask = false;
  bool y2_mask = false;
};

TrinityLabel make_label(std::optional<int> y_i, std::optional<int> y_j, double p,
                        std::size_t num_classes);

struct TrinitySignal {
  Tensor latent;  // [1 x trinity_dim]
  TrinityLabel label;
  Domain domain_tag = Domain::source;
};

/// k signals stacked row-wise; row r of `latent` belongs to `labels[r]`.
struct TrinityBatch {
  Tensor latent;  // [k x trinity_dim]
  std::vector<TrinityLabel> labels;
  std::vector<Domain> domains;

  std::size_t size() const { return labels.size(); }
  std::size_t num_classes() const;
  TrinitySignal signal(std::size_t r) const;
};

enum class ConnectionMode { edge_existence, ppr };

const char* to_string(ConnectionMode mode);
ConnectionMode connection_mode_from_string(const std::string& name);

struct SamplerConfig {
  std::size_t k = 256;
  double pos_fraction = 0.5;
  ConnectionMode connection_mode = ConnectionMode::edge_existence;
  double target_fraction = 0.5;
  std::uint64_t seed = 0;
  double ppr_teleport = 0.15;

  void validate() const;
};

/// Memoized personalized PageRank rows of one graph. Not thread-safe.
class PprCache {
 public:
  PprCache(const graph::LabeledGraph& g, double teleport, double tol = 1e-10);
  double score(NodeId from, NodeId to);

 private:
  const graph::LabeledGraph* graph_;
  double teleport_;
  double tol_;
  std::map<NodeId, Vector> rows_;
};

/// One domain's view for sampling: its graph, the current GNN embeddings,
/// and the labels visible to pre-training (absent = masked).
struct DomainSample {
  const graph::LabeledGraph* graph = nullptr;
  Tensor embeddings;  // [n x gnn_out_dim]
  std::vector<std::optional<int>> visible_labels;
  PprCache* ppr = nullptr;  // required in ppr mode
};

struct SignalPair {
  NodeId first = 0;
  NodeId second = 0;
  double p = 0.0;
  bool positive = false;
};

/// Draws `positives` edge pairs (uniform over edges, random orientation) then
/// `negatives` non-adjacent distinct pairs by rejection sampling.
std::vector<SignalPair> sample_pairs(const graph::LabeledGraph& g, std::size_t positives,
                                     std::size_t negatives, ConnectionMode mode, PprCache* ppr,
                                     Rng& rng);

/// latent = W_t [e_i || e_j] through the shared trinity layer.
TrinitySignal build_trinity(const Tensor& e_i, const Tensor& e_j, std::optional<int> y_i,
                            std::optional<int> y_j, double p, const Linear& trinity_layer,
                            std::size_t num_classes, Domain domain = Domain::source);

TrinityBatch build_trinity_batch(const DomainSample& domain, const std::vector<SignalPair>& pairs,
                                 const Linear& trinity_layer, Domain tag);

/// Signals for one training step: source rows first, then target rows.
/// The generator is keyed by (cfg.seed, step).
TrinityBatch sample_trinity_batch(const DomainSample& source, const DomainSample& target,
                                  const SamplerConfig& cfg, std::uint64_t step,
                                  const Linear& trinity_layer);

/// One Beta(alpha, alpha) draw.
double sample_lambda(double alpha, Rng& rng);

Tensor mixup_signals(const TrinitySignal& t, const TrinitySignal& t_prime, double lambda);
TrinityLabel mixup_labels(const TrinityLabel& y, const TrinityLabel& y_prime, double lambda);

struct ClassifierOutput {
  Tensor y1_logits;  // [B x C]
  Tensor y2_logits;  // [B x C]
  Tensor p_pred;     // [B x 1], in (0, 1)
};

/// Multi-head classifier g: shared hidden layer, two class heads and a
/// sigmoid connection-property head.
struct TrinityClassifier {
  static constexpr std::size_t kHiddenWidth = 32;

  Linear hidden;
  Linear head_y1;
  Linear head_y2;
  Linear head_p;

  TrinityClassifier() = default;
  TrinityClassifier(const std::string& name, std::size_t trinity_dim, std::size_t num_classes,
                    Rng& rng);

  void collect(std::vector<compute::Parameter*>& out);
};

ClassifierOutput classify_g(const Tensor& mixed_latent, const TrinityClassifier& g);

/// Partner index and interpolation weight for every row of a batch.
struct MixupPlan {
  std::vector<std::size_t> partner;
  std::vector<double> lambdas;

  static MixupPlan identity(std::size_t batch);
};

/// Uniform random permutation pairing with one Beta(alpha, alpha) draw per pair.
MixupPlan draw_mixup_plan(std::size_t batch, double alpha, Rng& rng);

struct SignalLossOptions {
  bool node_signals = true;  // class heads
  bool link_signals = true;  // connection-property head
};

/// Composite loss CE(y1) + CE(y2) + MSE(p) on the mixed batch.
Tensor signal_loss(const TrinityBatch& batch, const TrinityClassifier& g, const MixupPlan& plan,
                   const SignalLossOptions& options = {});

/// Draws a fresh plan (or the identity plan when mixup is off) and evaluates.
Tensor signal_loss(const TrinityBatch& batch, const TrinityClassifier& g, double alpha,
                   bool mixup, const SignalLossOptions& options, Rng& rng);

}  // namespace transnet::trinity
