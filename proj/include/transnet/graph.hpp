#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace transnet::graph {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using NodeId = std::size_t;

/// Unordered edge stored with `first < second`.
using Edge = std::pair<NodeId, NodeId>;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected node-labeled graph with dense features.
///
/// Immutable after construction. The constructor canonicalizes the edge list
/// (ordered endpoints, sorted, duplicates removed) and rejects self-loops and
/// out-of-range endpoints, so every instance satisfies its invariants.
class LabeledGraph {
 public:
  LabeledGraph() = default;
  LabeledGraph(std::size_t num_nodes, std::vector<Edge> edges, Matrix features,
               std::vector<std::optional<int>> labels, std::vector<std::string> label_vocab);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features_.cols()); }
  std::size_t num_classes() const { return label_vocab_.size(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const Matrix& features() const { return features_; }
  const std::vector<std::optional<int>>& labels() const { return labels_; }
  const std::vector<std::string>& label_vocab() const { return label_vocab_; }

  /// Sorted neighbor list of `node`.
  const std::vector<NodeId>& neighbors(NodeId node) const { return adjacency_.at(node); }
  bool has_edge(NodeId a, NodeId b) const;

  /// Nodes carrying a label, in increasing index order.
  std::vector<NodeId> labeled_nodes() const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  Matrix features_;
  std::vector<std::optional<int>> labels_;
  std::vector<std::string> label_vocab_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// Few-shot labeling of a graph: `labeled_nodes[c]` holds the training nodes
/// of class `c`; `eval_nodes` is every other labeled node.
struct FewShotSplit {
  std::vector<std::vector<NodeId>> labeled_nodes;
  std::vector<NodeId> eval_nodes;

  /// All few-shot nodes, class-major.
  std::vector<NodeId> train_nodes() const;
};

/// Symmetric renormalized adjacency D^-1/2 (A + I) D^-1/2.
Matrix normalized_adjacency(const LabeledGraph& g);

/// Picks exactly `n_shot` labeled nodes per class; deterministic in `seed`.
/// Throws GraphError naming the class when it has fewer than `n_shot` nodes.
FewShotSplit few_shot_split(const LabeledGraph& g, std::size_t n_shot, std::uint64_t seed);

/// Split that uses every labeled node for training (fully labeled source).
FewShotSplit full_split(const LabeledGraph& g);

struct SbmSpec {
  std::size_t num_nodes = 0;
  std::size_t num_classes = 0;
  double intra_p = 0.0;
  double inter_p = 0.0;
  std::size_t feature_dim = 0;
  Matrix class_centers;  // [num_classes x feature_dim]
  double feature_noise = 0.0;
  std::optional<std::vector<std::size_t>> feature_permutation;
  std::uint64_t seed = 0;

  /// Throws GraphError if any invariant is violated.
  void validate() const;
};

/// Stochastic block model with round-robin classes and Gaussian features.
LabeledGraph generate_sbm(const SbmSpec& spec);

/// Class centers drawn i.i.d. from N(0, scale^2).
Matrix random_class_centers(std::size_t num_classes, std::size_t feature_dim, double scale,
                            std::uint64_t seed);

/// Uniform random permutation of `n` coordinates.
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);

/// Personalized PageRank vector for `source` by power iteration.
///
/// Solves pi = teleport * e_source + (1 - teleport) * P^T pi where P is the
/// row-stochastic random-walk matrix. Mass sitting on an isolated node is sent
/// back to the source. Iterates until the L1 change drops below `tol`.
Vector personalized_pagerank(const LabeledGraph& g, NodeId source, double teleport, double tol);

}  // namespace transnet::graph
