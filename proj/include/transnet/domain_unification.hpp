#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "transnet/graph.hpp"
#include "transnet/random.hpp"
#include "transnet/tensor.hpp"

namespace transnet::unification {

using compute::Matrix;
using compute::Parameter;
using compute::Tensor;

enum class Domain { source, target };

const char* to_string(Domain d);

/// Dense layer x W + b with Glorot-uniform weights and zero bias.
struct Linear {
  Parameter weight;  // [in x out]
  Parameter bias;    // [1 x out]

  Linear() = default;
  Linear(const std::string& name, std::size_t in_dim, std::size_t out_dim, Rng& rng);

  std::size_t in_dim() const { return static_cast<std::size_t>(weight.value().rows()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weight.value().cols()); }
  Tensor operator()(const Tensor& x) const;
  void collect(std::vector<Parameter*>& out);
};

/// Glorot-uniform [in x out] matrix.
Matrix glorot_uniform(std::size_t in_dim, std::size_t out_dim, Rng& rng);

/// Per-domain two-layer perceptron: feature_dim -> unified_dim -> unified_dim.
struct FeatureEncoder {
  Linear hidden;
  Linear output;

  FeatureEncoder() = default;
  FeatureEncoder(const std::string& name, std::size_t feature_dim, std::size_t unified_dim, Rng& rng);

  std::size_t in_dim() const { return hidden.in_dim(); }
  std::size_t out_dim() const { return output.out_dim(); }
  Tensor forward(const Tensor& features) const;
  void collect(std::vector<Parameter*>& out);
};

/// Fixed propagation operator (normalized adjacency) of one graph, stored
/// sparse for the products; the dense form stays the reference definition.
class Propagator {
 public:
  Propagator() = default;
  explicit Propagator(const graph::Matrix& a_hat);
  static Propagator for_graph(const graph::LabeledGraph& g);

  std::size_t size() const { return static_cast<std::size_t>(op_->rows()); }
  const std::shared_ptr<const compute::SparseMatrix>& op() const { return op_; }

 private:
  std::shared_ptr<const compute::SparseMatrix> op_;
};

/// Graph convolution stack shared by both domains:
/// h_{l+1} = ReLU(A h_l W_l) for hidden layers, out = A h_L W_L.
struct SharedGnn {
  std::vector<Parameter> weights;

  SharedGnn() = default;
  SharedGnn(const std::string& name, std::size_t in_dim, const std::vector<std::size_t>& dims,
            Rng& rng);

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  Tensor forward(const Tensor& h, const Propagator& a_hat) const;
  void collect(std::vector<Parameter*>& out);
};

/// tanh(x) -> 32 -> 1 perceptron producing one domain logit per row.
struct DomainDiscriminator {
  static constexpr std::size_t kHiddenWidth = 32;

  Linear hidden;
  Linear output;

  DomainDiscriminator() = default;
  DomainDiscriminator(const std::string& name, std::size_t input_dim, Rng& rng);

  Tensor logits(const Tensor& x) const;
  void collect(std::vector<Parameter*>& out);
};

/// Applies the domain's encoder to every node feature row.
Tensor encode_features(const FeatureEncoder& encoder, const graph::LabeledGraph& g);
Tensor encode_features(const FeatureEncoder& encoder, const Tensor& features);

Tensor encode_structure(const SharedGnn& gnn, const Tensor& h, const Propagator& a_hat);

struct DomainLossOptions {
  bool feature_level = true;    // Unif_f
  bool structure_level = true;  // Unif_s
};

struct DomainLoss {
  Tensor feature_term;    // zero constant when disabled
  Tensor structure_term;  // zero constant when disabled
  Tensor total;
};

/// Bi-level adversarial discrepancy. At each enabled level the discriminator
/// classifies grl(source rows ++ target rows, mu) against labels 0/1 with the
/// mean logistic loss over the union; the result is the sum of both levels.
DomainLoss domain_loss(const DomainDiscriminator& feature_disc,
                       const DomainDiscriminator& structure_disc, const Tensor& h_source,
                       const Tensor& h_target, const Tensor& z_source, const Tensor& z_target,
                       double mu, const DomainLossOptions& options = {});

/// One level of the discrepancy loss.
Tensor discrepancy_term(const DomainDiscriminator& disc, const Tensor& source, const Tensor& target,
                        double mu);

/// Reversal-strength annealing 2 / (1 + exp(-10 p)) - 1.
double grl_schedule(double progress);

}  // namespace transnet::unification
