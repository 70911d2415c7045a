#include <cmath>

#include "transnet/graph.hpp"

namespace transnet::graph {

Vector personalized_pagerank(const LabeledGraph& g, NodeId source, double teleport, double tol) {
  if (!(teleport > 0.0 && teleport <= 1.0)) {
    throw GraphError("personalized_pagerank: teleport must lie in (0, 1]");
  }
  if (source >= g.num_nodes()) throw GraphError("personalized_pagerank: source out of range");
  if (!(tol > 0.0)) throw GraphError("personalized_pagerank: tol must be positive");

  const std::size_t n = g.num_nodes();
  const auto src = static_cast<Eigen::Index>(source);
  Vector pi = Vector::Zero(static_cast<Eigen::Index>(n));
  pi(src) = 1.0;
  Vector next(static_cast<Eigen::Index>(n));

  constexpr int kMaxIterations = 100000;
  for (int it = 0; it < kMaxIterations; ++it) {
    next.setZero();
    double dangling = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      const double mass = pi(static_cast<Eigen::Index>(u));
      if (mass == 0.0) continue;
      const auto& nbrs = g.neighbors(u);
      if (nbrs.empty()) {
        dangling += mass;
        continue;
      }
      const double share = mass / static_cast<double>(nbrs.size());
      for (NodeId v : nbrs) next(static_cast<Eigen::Index>(v)) += share;
    }
    next *= (1.0 - teleport);
    next(src) += teleport + (1.0 - teleport) * dangling;
    const double change = (next - pi).lpNorm<1>();
    pi.swap(next);
    if (change < tol) break;
  }
  return pi;
}

}  // namespace transnet::graph
