#include <cmath>
#include <stdexcept>

#include "transnet/trinity.hpp"

namespace transnet::trinity {

const char* to_string(ConnectionMode mode) {
  return mode == ConnectionMode::edge_existence ? "edge_existence" : "ppr";
}

ConnectionMode connection_mode_from_string(const std::string& name) {
  if (name == "edge_existence" || name == "edge") return ConnectionMode::edge_existence;
  if (name == "ppr") return ConnectionMode::ppr;
  throw std::invalid_argument("unknown connection mode '" + name + "'");
}

void SamplerConfig::validate() const {
  if (k < 2) throw std::invalid_argument("sampler: k must be at least 2");
  if (!(pos_fraction >= 0.0 && pos_fraction <= 1.0)) {
    throw std::invalid_argument("sampler: pos_fraction must lie in [0, 1]");
  }
  if (!(target_fraction >= 0.0 && target_fraction <= 1.0)) {
    throw std::invalid_argument("sampler: target_fraction must lie in [0, 1]");
  }
  if (!(ppr_teleport > 0.0 && ppr_teleport <= 1.0)) {
    throw std::invalid_argument("sampler: ppr_teleport must lie in (0, 1]");
  }
}

PprCache::PprCache(const graph::LabeledGraph& g, double teleport, double tol)
    : graph_(&g), teleport_(teleport), tol_(tol) {}

double PprCache::score(NodeId from, NodeId to) {
  auto it = rows_.find(from);
  if (it == rows_.end()) {
    it = rows_.emplace(from, graph::personalized_pagerank(*graph_, from, teleport_, tol_)).first;
  }
  return it->second(static_cast<Eigen::Index>(to));
}

std::vector<SignalPair> sample_pairs(const graph::LabeledGraph& g, std::size_t positives,
                                     std::size_t negatives, ConnectionMode mode, PprCache* ppr,
                                     Rng& rng) {
  if (mode == ConnectionMode::ppr && ppr == nullptr) {
    throw std::invalid_argument("sample_pairs: ppr mode needs a PageRank cache");
  }
  auto property = [&](NodeId i, NodeId j, bool positive) {
    if (mode == ConnectionMode::ppr) return ppr->score(i, j);
    return positive ? 1.0 : 0.0;
  };

  std::vector<SignalPair> pairs;
  pairs.reserve(positives + negatives);
  if (positives > 0) {
    if (g.num_edges() == 0) throw std::runtime_error("sample_pairs: graph has no edges to sample");
    std::bernoulli_distribution flip(0.5);
    for (std::size_t s = 0; s < positives; ++s) {
      auto [i, j] = g.edges()[uniform_index(rng, g.num_edges())];
      if (flip(rng)) std::swap(i, j);
      pairs.push_back({i, j, property(i, j, true), true});
    }
  }

  constexpr int kMaxConsecutiveRejections = 1000;
  for (std::size_t s = 0; s < negatives; ++s) {
    int rejections = 0;
    while (true) {
      const NodeId i = uniform_index(rng, g.num_nodes());
      const NodeId j = uniform_index(rng, g.num_nodes());
      if (i != j && !g.has_edge(i, j)) {
        pairs.push_back({i, j, property(i, j, false), false});
        break;
      }
      if (++rejections > kMaxConsecutiveRejections) {
        throw std::runtime_error("sample_pairs: graph too dense for negative sampling (" +
                                 std::to_string(kMaxConsecutiveRejections) +
                                 " consecutive rejections)");
      }
    }
  }
  return pairs;
}

TrinityBatch build_trinity_batch(const DomainSample& domain, const std::vector<SignalPair>& pairs,
                                 const Linear& trinity_layer, Domain tag) {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  TrinityBatch batch;
  const std::size_t num_classes = domain.graph->num_classes();
  for (const auto& pair : pairs) {
    first.push_back(pair.first);
    second.push_back(pair.second);
    batch.labels.push_back(make_label(domain.visible_labels.at(pair.first),
                                      domain.visible_labels.at(pair.second), pair.p, num_classes));
    batch.domains.push_back(tag);
  }
  const Tensor joined = compute::concat_cols(compute::gather_rows(domain.embeddings, first),
                                             compute::gather_rows(domain.embeddings, second));
  batch.latent = trinity_layer(joined);
  return batch;
}

TrinityBatch sample_trinity_batch(const DomainSample& source, const DomainSample& target,
                                  const SamplerConfig& cfg, std::uint64_t step,
                                  const Linear& trinity_layer) {
  cfg.validate();
  if (source.graph->num_classes() != target.graph->num_classes()) {
    throw std::invalid_argument("sample_trinity_batch: domains disagree on the class count");
  }
  Rng rng = make_rng({cfg.seed, step, 0x7219});

  const auto target_count =
      static_cast<std::size_t>(std::lround(static_cast<double>(cfg.k) * cfg.target_fraction));
  const std::size_t source_count = cfg.k - target_count;
  auto split = [&](std::size_t n) {
    const auto pos = static_cast<std::size_t>(std::lround(static_cast<double>(n) * cfg.pos_fraction));
    return std::pair{pos, n - pos};
  };

  TrinityBatch out;
  auto append = [&](const DomainSample& d, std::size_t count, Domain tag) {
    if (count == 0) return;
    const auto [pos, neg] = split(count);
    const auto pairs = sample_pairs(*d.graph, pos, neg, cfg.connection_mode, d.ppr, rng);
    TrinityBatch part = build_trinity_batch(d, pairs, trinity_layer, tag);
    out.latent = out.latent.defined() ? compute::concat_rows(out.latent, part.latent) : part.latent;
    out.labels.insert(out.labels.end(), part.labels.begin(), part.labels.end());
    out.domains.insert(out.domains.end(), part.domains.begin(), part.domains.end());
  };
  append(source, source_count, Domain::source);
  append(target, target_count, Domain::target);
  return out;
}

}  // namespace transnet::trinity
