#include "transnet/graph.hpp"

#include <algorithm>
#include <cmath>

#include "transnet/random.hpp"

namespace transnet::graph {

LabeledGraph::LabeledGraph(std::size_t num_nodes, std::vector<Edge> edges, Matrix features,
                           std::vector<std::optional<int>> labels,
                           std::vector<std::string> label_vocab)
    : num_nodes_(num_nodes),
      features_(std::move(features)),
      labels_(std::move(labels)),
      label_vocab_(std::move(label_vocab)) {
  if (static_cast<std::size_t>(features_.rows()) != num_nodes_) {
    throw GraphError("feature matrix has " + std::to_string(features_.rows()) +
                     " rows, expected " + std::to_string(num_nodes_));
  }
  if (labels_.empty()) labels_.resize(num_nodes_);
  if (labels_.size() != num_nodes_) {
    throw GraphError("label vector has " + std::to_string(labels_.size()) +
                     " entries, expected " + std::to_string(num_nodes_));
  }
  for (std::size_t i = 0; i < num_nodes_; ++i) {
    const auto& label = labels_[i];
    if (label && (*label < 0 || static_cast<std::size_t>(*label) >= label_vocab_.size())) {
      throw GraphError("node " + std::to_string(i) + " has label index " +
                       std::to_string(*label) + " outside the vocabulary");
    }
  }

  for (auto& [a, b] : edges) {
    if (a >= num_nodes_ || b >= num_nodes_) {
      throw GraphError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") has an endpoint outside [0, " + std::to_string(num_nodes_) + ")");
    }
    if (a == b) throw GraphError("self-loop on node " + std::to_string(a));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  adjacency_.assign(num_nodes_, {});
  for (const auto& [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool LabeledGraph::has_edge(NodeId a, NodeId b) const {
  if (a >= num_nodes_ || b >= num_nodes_) return false;
  const auto& nbrs = adjacency_[a];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::vector<NodeId> LabeledGraph::labeled_nodes() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < num_nodes_; ++i) {
    if (labels_[i]) out.push_back(i);
  }
  return out;
}

std::vector<NodeId> FewShotSplit::train_nodes() const {
  std::vector<NodeId> out;
  for (const auto& cls : labeled_nodes) out.insert(out.end(), cls.begin(), cls.end());
  return out;
}

Matrix normalized_adjacency(const LabeledGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  if (n < 1) throw GraphError("normalized_adjacency requires at least one node");
  Matrix a = Matrix::Identity(n, n);
  for (const auto& [u, v] : g.edges()) {
    a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1.0;
    a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) = 1.0;
  }
  const Vector inv_sqrt_deg = a.rowwise().sum().array().rsqrt();
  return inv_sqrt_deg.asDiagonal() * a * inv_sqrt_deg.asDiagonal();
}

FewShotSplit few_shot_split(const LabeledGraph& g, std::size_t n_shot, std::uint64_t seed) {
  std::vector<std::vector<NodeId>> by_class(g.num_classes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (const auto& label = g.labels()[i]) by_class[static_cast<std::size_t>(*label)].push_back(i);
  }

  FewShotSplit split;
  split.labeled_nodes.resize(g.num_classes());
  std::vector<bool> chosen(g.num_nodes(), false);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& pool = by_class[c];
    if (pool.size() < n_shot) {
      throw GraphError("class '" + g.label_vocab()[c] + "' has " + std::to_string(pool.size()) +
                       " labeled nodes, fewer than n_shot = " + std::to_string(n_shot));
    }
    Rng rng = make_rng({seed, 0x5b1d, c});
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(n_shot);
    std::sort(pool.begin(), pool.end());
    for (NodeId v : pool) chosen[v] = true;
    split.labeled_nodes[c] = std::move(pool);
  }
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (g.labels()[i] && !chosen[i]) split.eval_nodes.push_back(i);
  }
  return split;
}

FewShotSplit full_split(const LabeledGraph& g) {
  FewShotSplit split;
  split.labeled_nodes.resize(g.num_classes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (const auto& label = g.labels()[i]) {
      split.labeled_nodes[static_cast<std::size_t>(*label)].push_back(i);
    }
  }
  return split;
}

}  // namespace transnet::graph
