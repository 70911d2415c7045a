#include <doctest.h>

#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "test_support.hpp"
#include "transnet/checkpoint.hpp"
#include "transnet/dataset_io.hpp"
#include "transnet/domain_unification.hpp"
#include "transnet/trinity.hpp"

using namespace transnet;
using namespace transnet::testing;
using compute::Matrix;
using compute::Tensor;

namespace {

graph::LabeledGraph random_graph(std::uint64_t seed) {
  Rng rng = make_rng({seed, 0xabc});
  const std::size_t n = 2 + uniform_index(rng, 9);
  const std::size_t classes = 1 + uniform_index(rng, 3);
  std::bernoulli_distribution coin(0.4);
  std::vector<graph::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  std::vector<std::optional<int>> labels(n);
  std::vector<std::string> vocab;
  for (std::size_t c = 0; c < classes; ++c) vocab.push_back("c" + std::to_string(c));
  for (auto& l : labels) {
    const std::size_t v = uniform_index(rng, classes + 1);
    if (v < classes) l = static_cast<int>(v);
  }
  return graph::LabeledGraph(n, edges, random_matrix(static_cast<Eigen::Index>(n), 3, rng), labels,
                             vocab);
}

}  // namespace

TEST_CASE("normalized adjacency is symmetric with spectrum in [-1, 1]") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = random_graph(seed);
    const Matrix a = graph::normalized_adjacency(g);
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
    CHECK(ev.maxCoeff() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ev.minCoeff() >= -1.0 - 1e-10);
  }
}

TEST_CASE("pagerank is a probability vector peaked at its source") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = random_graph(seed);
    const graph::NodeId s = seed % g.num_nodes();
    const auto pi = graph::personalized_pagerank(g, s, 0.2, 1e-12);
    CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pi.minCoeff() >= 0.0);
    CHECK(pi(static_cast<Eigen::Index>(s)) >= 0.2 - 1e-12);
  }
}

TEST_CASE("datasets round-trip for random graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_graph(seed);
    TempDir tmp;
    graph::save_graph(g, tmp.path());
    const auto back = graph::load_graph(tmp.path());
    CHECK(back.edges() == g.edges());
    CHECK(back.features() == g.features());
    CHECK(back.labels() == g.labels());
  }
}

TEST_CASE("checkpoints round-trip for random tensors") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng({seed, 0xc4});
    compute::Checkpoint c;
    c.metadata = std::string(uniform_index(rng, 40), 'm');
    for (std::size_t t = 0; t < 1 + uniform_index(rng, 5); ++t) {
      c.tensors["t" + std::to_string(t)] =
          random_matrix(static_cast<Eigen::Index>(uniform_index(rng, 6)),
                        static_cast<Eigen::Index>(1 + uniform_index(rng, 6)), rng, 1e6);
    }
    const auto back = compute::deserialize_checkpoint(compute::serialize_checkpoint(c));
    CHECK(back.metadata == c.metadata);
    CHECK(back.tensors == c.tensors);
  }
}

TEST_CASE("reversal equals minus mu times the identity path on random stacks") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng({seed, 0x9e1});
    const Eigen::Index b = 2 + static_cast<Eigen::Index>(uniform_index(rng, 6));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(uniform_index(rng, 6));
    std::uniform_real_distribution<double> unit(0.0, 2.0);
    const double mu = unit(rng);
    const Matrix x0 = random_matrix(b, d, rng);
    const Matrix w0 = random_matrix(d, d, rng);
    unification::DomainDiscriminator disc("d", static_cast<std::size_t>(d), rng);
    std::vector<double> labels(static_cast<std::size_t>(b));
    for (auto& l : labels) l = static_cast<double>(uniform_index(rng, 2));

    auto run = [&](bool reversed) {
      const Tensor x = Tensor::variable(x0);
      const Tensor w = Tensor::variable(w0);
      const Tensor h = compute::relu(compute::matmul(x, w));
      const Tensor in = reversed ? compute::gradient_reversal(h, mu) : h;
      compute::backward(compute::binary_cross_entropy_logits(disc.logits(in), labels));
      return std::pair{x.grad(), w.grad()};
    };
    const auto [gx_rev, gw_rev] = run(true);
    const auto [gx_id, gw_id] = run(false);
    CHECK((gx_rev + mu * gx_id).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((gw_rev + mu * gw_id).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("mixed rows lie on the segment between their endpoints") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng = make_rng({seed, 0x31});
    const Matrix a = random_matrix(5, 4, rng), b = random_matrix(5, 4, rng);
    std::vector<double> lam(5);
    for (auto& l : lam) l = trinity::sample_lambda(0.5, rng);
    const Matrix m = compute::mix_rows(Tensor::constant(a), Tensor::constant(b), lam).value();
    for (Eigen::Index r = 0; r < 5; ++r) {
      const Matrix lo = a.row(r).cwiseMin(b.row(r));
      const Matrix hi = a.row(r).cwiseMax(b.row(r));
      CHECK(((m.row(r) - lo).array() >= -1e-12).all());
      CHECK(((hi - m.row(r)).array() >= -1e-12).all());
    }
  }
}

TEST_CASE("cross entropy is bounded below by the target entropy") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng = make_rng({seed, 0xce});
    const Matrix z = random_matrix(4, 3, rng, 2.0);
    Matrix t = compute::softmax_rows(random_matrix(4, 3, rng));
    const std::vector<double> mask(4, 1.0);
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) entropy -= t.data()[i] * std::log(t.data()[i]);
    entropy /= 4.0;
    const double ce = compute::softmax_cross_entropy(Tensor::constant(z), t, mask).item();
    CHECK(ce >= entropy - 1e-12);
    const double at_target =
        compute::softmax_cross_entropy(Tensor::constant(t.array().log().matrix()), t, mask).item();
    CHECK(at_target == doctest::Approx(entropy).epsilon(1e-10));
  }
}

TEST_CASE("few-shot splits partition the labeled nodes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = small_sbm(30 + 3 * seed, seed);
    const auto split = graph::few_shot_split(g, 1 + seed % 5, seed);
    std::set<graph::NodeId> seen;
    for (auto v : split.train_nodes()) CHECK(seen.insert(v).second);
    for (auto v : split.eval_nodes) CHECK(seen.insert(v).second);
    CHECK(seen.size() == g.labeled_nodes().size());
  }
}
