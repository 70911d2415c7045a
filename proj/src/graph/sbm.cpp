#include <algorithm>
#include <numeric>
#include <set>

#include "transnet/graph.hpp"
#include "transnet/random.hpp"

namespace transnet::graph {

void SbmSpec::validate() const {
  if (num_nodes == 0) throw GraphError("sbm: num_nodes must be positive");
  if (num_classes == 0) throw GraphError("sbm: num_classes must be positive");
  if (feature_dim == 0) throw GraphError("sbm: feature_dim must be positive");
  if (!(inter_p >= 0.0 && inter_p <= intra_p && intra_p <= 1.0)) {
    throw GraphError("sbm: need 0 <= inter_p <= intra_p <= 1 (got intra_p = " +
                     std::to_string(intra_p) + ", inter_p = " + std::to_string(inter_p) + ")");
  }
  if (!(feature_noise >= 0.0)) throw GraphError("sbm: feature_noise must be nonnegative");
  if (static_cast<std::size_t>(class_centers.rows()) != num_classes ||
      static_cast<std::size_t>(class_centers.cols()) != feature_dim) {
    throw GraphError("sbm: class_centers must be num_classes x feature_dim");
  }
  for (std::size_t a = 0; a < num_classes; ++a) {
    for (std::size_t b = a + 1; b < num_classes; ++b) {
      if (class_centers.row(static_cast<Eigen::Index>(a)) ==
          class_centers.row(static_cast<Eigen::Index>(b))) {
        throw GraphError("sbm: class centers " + std::to_string(a) + " and " +
                         std::to_string(b) + " coincide");
      }
    }
  }
  if (feature_permutation) {
    const auto& perm = *feature_permutation;
    std::set<std::size_t> seen(perm.begin(), perm.end());
    if (perm.size() != feature_dim || seen.size() != feature_dim || *seen.rbegin() >= feature_dim) {
      throw GraphError("sbm: feature_permutation is not a permutation of the feature coordinates");
    }
  }
}

LabeledGraph generate_sbm(const SbmSpec& spec) {
  spec.validate();
  Rng edge_rng = make_rng({spec.seed, 0xed9e});
  Rng feature_rng = make_rng({spec.seed, 0xfea7});
  std::bernoulli_distribution intra(spec.intra_p);
  std::bernoulli_distribution inter(spec.inter_p);

  const std::size_t n = spec.num_nodes;
  auto class_of = [&](NodeId i) { return i % spec.num_classes; };

  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const bool linked = class_of(i) == class_of(j) ? intra(edge_rng) : inter(edge_rng);
      if (linked) edges.emplace_back(i, j);
    }
  }

  Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.feature_dim));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (NodeId i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (std::size_t d = 0; d < spec.feature_dim; ++d) {
      const auto col = static_cast<Eigen::Index>(d);
      const double eps = spec.feature_noise > 0.0 ? spec.feature_noise * noise(feature_rng) : 0.0;
      features(row, col) = spec.class_centers(static_cast<Eigen::Index>(class_of(i)), col) + eps;
    }
  }
  if (spec.feature_permutation) {
    // Output coordinate d takes original coordinate perm[d].
    const auto& perm = *spec.feature_permutation;
    Matrix permuted(features.rows(), features.cols());
    for (std::size_t d = 0; d < perm.size(); ++d) {
      permuted.col(static_cast<Eigen::Index>(d)) = features.col(static_cast<Eigen::Index>(perm[d]));
    }
    features = std::move(permuted);
  }

  std::vector<std::optional<int>> labels(n);
  for (NodeId i = 0; i < n; ++i) labels[i] = static_cast<int>(class_of(i));
  std::vector<std::string> vocab;
  for (std::size_t c = 0; c < spec.num_classes; ++c) vocab.push_back("class_" + std::to_string(c));

  return LabeledGraph(n, std::move(edges), std::move(features), std::move(labels), std::move(vocab));
}

Matrix random_class_centers(std::size_t num_classes, std::size_t feature_dim, double scale,
                            std::uint64_t seed) {
  Rng rng = make_rng({seed, 0xce47});
  std::normal_distribution<double> dist(0.0, scale);
  Matrix centers(static_cast<Eigen::Index>(num_classes), static_cast<Eigen::Index>(feature_dim));
  for (Eigen::Index r = 0; r < centers.rows(); ++r) {
    for (Eigen::Index c = 0; c < centers.cols(); ++c) centers(r, c) = dist(rng);
  }
  return centers;
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng({seed, 0x9e4b});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace transnet::graph
