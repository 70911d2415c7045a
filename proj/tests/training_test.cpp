#include <doctest.h>

#include <cmath>
#include <set>

#include "training_support.hpp"
#include "transnet/checkpoint.hpp"

using namespace transnet;
using namespace transnet::training;
using namespace transnet::testing;

namespace {

struct Pair {
  graph::LabeledGraph source = small_sbm(24, 1, false, 5, 2);
  graph::LabeledGraph target = small_sbm(20, 2, true, 4, 2);
};

std::map<std::string, compute::Matrix> snapshot(TransNetModel& m) {
  std::map<std::string, compute::Matrix> out;
  for (auto* p : m.all_parameters()) out.emplace(p->name(), p->value());
  return out;
}

}  // namespace

TEST_CASE("default configuration") {
  const TrainConfig cfg;
  CHECK(cfg.pretrain_epochs == 2000);
  CHECK(cfg.finetune_epochs == 800);
  CHECK(cfg.lr == 3e-3);
  CHECK(cfg.k == 256);
  CHECK(cfg.n_shot == 5);
  CHECK(cfg.unified_dim == 100);
  CHECK(cfg.gnn_dims == std::vector<std::size_t>{64, 32, 16});
  CHECK(cfg.gnn_out_dim() == 16);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config json round trip and fingerprint") {
  TrainConfig cfg = tiny_config();
  cfg.connection_mode = trinity::ConnectionMode::ppr;
  cfg.disable_mixup = true;
  const TrainConfig back = TrainConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.fingerprint() == cfg.fingerprint());
  TrainConfig other = cfg;
  other.gamma = 0.5;
  CHECK(other.fingerprint() != cfg.fingerprint());
}

TEST_CASE("config merge rejects unknown keys and bad values") {
  TrainConfig cfg;
  cfg.merge_json(nlohmann::json::parse(R"({"k": 64, "gnn_dims": [8, 4]})"));
  CHECK(cfg.k == 64);
  CHECK(cfg.gnn_dims == std::vector<std::size_t>{8, 4});
  CHECK_THROWS(cfg.merge_json(nlohmann::json::parse(R"({"learning_rate": 1})")));
  TrainConfig bad;
  bad.lr = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = TrainConfig{};
  bad.gnn_dims = {};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("disabling target signals samples the source only") {
  TrainConfig cfg;
  cfg.disable_target_signals = true;
  CHECK(cfg.sampler().target_fraction == 0.0);
}

TEST_CASE("model layout") {
  const TrainConfig cfg = tiny_config();
  TransNetModel m(ModelShape::from(cfg, 5, 4, 3), 0);
  std::set<std::string> names;
  for (auto* p : m.all_parameters()) CHECK(names.insert(p->name()).second);
  CHECK(names.count("gnn.layer1.weight") == 1);
  CHECK(names.count("classifier_h.weight") == 0);
  CHECK_THROWS_AS(m.finetune_parameters(), std::logic_error);
  m.init_classifier_h(0);
  CHECK(m.finetune_parameters().size() == 4 + 2 + 2);
  CHECK(m.classifier_h->in_dim() == 4);
  CHECK(m.source_encoder.in_dim() == 5);
  CHECK(m.target_encoder.in_dim() == 4);
  CHECK(m.structure_discriminator.hidden.in_dim() == 4);
  CHECK(m.trinity_layer.in_dim() == 8);
}

TEST_CASE("model checkpoint round trip") {
  const TrainConfig cfg = tiny_config();
  const ModelShape shape = ModelShape::from(cfg, 5, 4, 3);
  TransNetModel m(shape, 3);
  m.init_classifier_h(3);
  const compute::Checkpoint ckpt = m.to_checkpoint("meta");
  TransNetModel back = TransNetModel::from_checkpoint(shape, ckpt);
  CHECK(snapshot(back) == snapshot(m));
  CHECK(compute::serialize_checkpoint(back.to_checkpoint("meta")) ==
        compute::serialize_checkpoint(ckpt));

  compute::Checkpoint missing = ckpt;
  missing.tensors.erase("gnn.layer0.weight");
  CHECK_THROWS_AS(TransNetModel::from_checkpoint(shape, missing), compute::CheckpointError);
  compute::Checkpoint extra = ckpt;
  extra.tensors["stray"] = compute::Matrix::Zero(1, 1);
  CHECK_THROWS_AS(TransNetModel::from_checkpoint(shape, extra), compute::CheckpointError);
  compute::Checkpoint wrong = ckpt;
  wrong.tensors["trinity_layer.bias"] = compute::Matrix::Zero(1, 9);
  CHECK_THROWS_AS(TransNetModel::from_checkpoint(shape, wrong), compute::CheckpointError);
}

TEST_CASE("composed objective gradient") {
  Pair pair;
  TrainConfig cfg = tiny_config();
  cfg.k = 6;
  cfg.gamma = 0.7;
  for (const auto mode : {trinity::ConnectionMode::edge_existence, trinity::ConnectionMode::ppr}) {
    cfg.connection_mode = mode;
    TransNetModel m(ModelShape::from(cfg, 5, 4, 2), 5);
    jitter_biases(m, 5);
    const DomainData s = make_domain_data(pair.source, graph::full_split(pair.source));
    const DomainData t = make_domain_data(pair.target, graph::few_shot_split(pair.target, 2, 5));
    trinity::PprCache sp(pair.source, cfg.ppr_teleport), tp(pair.target, cfg.ppr_teleport);
    CHECK(composed_gradient_error(m, s, t, cfg, 9, &sp, &tp) < 1e-4);
  }
}

TEST_CASE("total loss combines the terms") {
  const auto d = compute::Tensor::constant(compute::Matrix::Constant(1, 1, 2.0));
  const auto s = compute::Tensor::constant(compute::Matrix::Constant(1, 1, 3.0));
  CHECK(total_loss(d, s, 0.5).item() == 3.5);
}

TEST_CASE("fine-tuning leaves the pre-training-only parameters untouched") {
  Pair pair;
  const TrainConfig cfg = tiny_config();
  TransNetModel m(ModelShape::from(cfg, 5, 4, 2), 1);
  const DomainData s = make_domain_data(pair.source, graph::full_split(pair.source));
  const DomainData t = make_domain_data(pair.target, graph::few_shot_split(pair.target, 2, 1));
  pretrain(m, s, t, cfg);
  const auto before = snapshot(m);
  const auto trace = finetune(m, t, cfg);
  CHECK(trace.size() == cfg.finetune_epochs);
  const auto after = snapshot(m);
  for (const auto& [name, value] : before) {
    const bool tuned = name.rfind("target_encoder", 0) == 0 || name.rfind("gnn", 0) == 0;
    CAPTURE(name);
    if (tuned) {
      CHECK(after.at(name) != value);
    } else {
      CHECK(after.at(name) == value);
    }
  }
  CHECK(after.count("classifier_h.weight") == 1);
  CHECK(trace.back() < trace.front());
}

TEST_CASE("pre-training guards") {
  Pair pair;
  const TrainConfig cfg = tiny_config();
  TransNetModel m(ModelShape::from(cfg, 5, 4, 2), 1);
  const DomainData t = make_domain_data(pair.target, graph::few_shot_split(pair.target, 2, 1));
  graph::LabeledGraph unlabeled(pair.source.num_nodes(), pair.source.edges(),
                                pair.source.features(), {}, pair.source.label_vocab());
  const DomainData bare = make_domain_data(unlabeled, graph::full_split(unlabeled));
  CHECK_THROWS_AS(pretrain(m, bare, t, cfg), std::invalid_argument);

  graph::LabeledGraph renamed(pair.source.num_nodes(), pair.source.edges(), pair.source.features(),
                              pair.source.labels(), {"p", "q"});
  const DomainData other = make_domain_data(renamed, graph::full_split(renamed));
  CHECK_THROWS_AS(pretrain(m, other, t, cfg), std::invalid_argument);
  CHECK_THROWS_AS(check_compatible(renamed, pair.target), std::invalid_argument);
}

TEST_CASE("precision scores") {
  const std::vector<int> predicted = {0, 0, 1, 1, 2, 0};
  const std::vector<std::optional<int>> truth = {0, 1, 1, 1, 0, std::nullopt};
  const std::vector<graph::NodeId> eval = {0, 1, 2, 3, 4};
  const PrecisionScores s = score_predictions(predicted, truth, eval, 3);
  CHECK(s.micro == doctest::Approx(3.0 / 5.0));
  // class 0: 1/2, class 1: 2/2, class 2: 0/1
  CHECK(s.macro == doctest::Approx((0.5 + 1.0 + 0.0) / 3.0));
  const std::vector<graph::NodeId> with_unlabeled = {5};
  CHECK_THROWS_AS(score_predictions(predicted, truth, with_unlabeled, 3), std::invalid_argument);
  CHECK_THROWS_AS(score_predictions(predicted, truth, {}, 3), std::invalid_argument);
}

TEST_CASE("a seed is deterministic") {
  Pair pair;
  const TrainConfig cfg = tiny_config();
  std::optional<TransNetModel> a, b;
  const SeedResult ra = run_seed(pair.source, pair.target, cfg, 4, RunMode::transnet, &a);
  const SeedResult rb = run_seed(pair.source, pair.target, cfg, 4, RunMode::transnet, &b);
  CHECK(ra.pretrain.total == rb.pretrain.total);
  CHECK(ra.finetune == rb.finetune);
  CHECK(ra.precision == rb.precision);
  CHECK(compute::serialize_checkpoint(a->to_checkpoint("")) ==
        compute::serialize_checkpoint(b->to_checkpoint("")));
  CHECK(ra.pretrain.total.size() == cfg.pretrain_epochs);
  for (double v : ra.pretrain.total) CHECK(std::isfinite(v));
}

TEST_CASE("target-only mode skips pre-training") {
  Pair pair;
  const TrainConfig cfg = tiny_config();
  const SeedResult r = run_seed(pair.source, pair.target, cfg, 0, RunMode::target_only);
  CHECK(r.pretrain.total.empty());
  CHECK(r.finetune.size() == cfg.pretrain_epochs + cfg.finetune_epochs);
  CHECK(r.precision >= 0.0);
  CHECK(r.precision <= 1.0);
}

TEST_CASE("experiments aggregate seeds identically for any worker count") {
  Pair pair;
  TrainConfig cfg = tiny_config();
  cfg.seed = 10;
  const MetricsReport serial = run_experiment(pair.source, pair.target, cfg, {3, 1});
  const MetricsReport parallel = run_experiment(pair.source, pair.target, cfg, {3, 3});
  REQUIRE(serial.seeds.size() == 3);
  double mean = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(serial.seeds[i].seed == 10 + i);
    CHECK(serial.seeds[i].precision == parallel.seeds[i].precision);
    CHECK(serial.seeds[i].pretrain.total == parallel.seeds[i].pretrain.total);
    mean += serial.seeds[i].precision / 3.0;
  }
  CHECK(serial.precision_mean == doctest::Approx(mean));
  double var = 0.0;
  for (const auto& s : serial.seeds) var += (s.precision - mean) * (s.precision - mean) / 3.0;
  CHECK(serial.precision_std == doctest::Approx(std::sqrt(var)));

  const auto j = serial.to_json();
  for (const char* key : {"config", "config_fingerprint", "mode", "seeds", "precision_mean",
                          "precision_std", "macro_precision_mean", "wall_clock_seconds"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["seeds"][0]["loss_trace"].size() == cfg.pretrain_epochs);
  CHECK(j["mode"] == "transnet");
}

TEST_CASE("checkpoint metadata rebuilds the trained model") {
  Pair pair;
  const TrainConfig cfg = tiny_config();
  std::optional<TransNetModel> m;
  run_seed(pair.source, pair.target, cfg, 6, RunMode::transnet, &m);
  TempDir tmp;
  const ModelShape shape = m->shape();
  compute::save_checkpoint(m->to_checkpoint(checkpoint_metadata(cfg, shape, 6)), tmp / "m.ckpt");
  LoadedModel loaded = load_trained_model(tmp / "m.ckpt");
  CHECK(loaded.seed == 6);
  CHECK(loaded.config.fingerprint() == cfg.fingerprint());
  CHECK(snapshot(loaded.model) == snapshot(*m));
}
