#include "transnet/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "transnet/checkpoint.hpp"
#include "transnet/dataset_io.hpp"
#include "transnet/experiment.hpp"

namespace transnet::cli {

namespace fs = std::filesystem;
using training::TrainConfig;

namespace {

/// Shortest round-trip decimal, always with a fractional part ("1.0").
std::string format_decimal(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

struct SynthOptions {
  std::size_t nodes = 0;
  std::size_t classes = 0;
  double intra_p = 0.0;
  double inter_p = 0.0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  double noise = 0.5;
  double center_scale = 1.0;
  std::optional<std::uint64_t> center_seed;
  bool permute = false;
  std::optional<std::uint64_t> permute_seed;
  std::string out;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  graph::SbmSpec spec;
  spec.num_nodes = o.nodes;
  spec.num_classes = o.classes;
  spec.intra_p = o.intra_p;
  spec.inter_p = o.inter_p;
  spec.feature_dim = o.dim;
  spec.feature_noise = o.noise;
  spec.seed = o.seed;
  if (o.classes == 0 || o.dim == 0) spec.validate();  // reports the bad count
  spec.class_centers =
      graph::random_class_centers(o.classes, o.dim, o.center_scale, o.center_seed.value_or(o.seed));
  if (o.permute) spec.feature_permutation = graph::random_permutation(o.dim, o.permute_seed.value_or(o.seed));
  const graph::LabeledGraph g = graph::generate_sbm(spec);
  graph::save_graph(g, o.out);
  out << "nodes " << g.num_nodes() << "\nedges " << g.num_edges() << "\n";
  return 0;
}

int cmd_validate(const std::string& dir, std::ostream& out) {
  const graph::LabeledGraph g = graph::load_graph(dir);
  out << "ok: " << g.num_nodes() << " nodes, " << g.num_edges() << " edges, "
      << g.feature_dim() << " features, " << g.num_classes() << " classes, "
      << g.labeled_nodes().size() << " labeled\n";
  return 0;
}

/// Flags that override individual TrainConfig fields when present.
struct ConfigFlags {
  std::optional<std::size_t> pretrain_epochs, finetune_epochs, k, n_shot, unified_dim, trinity_dim;
  std::optional<double> lr, gamma, alpha, pos_fraction, target_fraction, ppr_teleport;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<std::size_t>> gnn_dims;
  std::optional<std::string> connection_mode;
  bool no_unif_f = false, no_unif_s = false, no_mixup = false;
  bool no_node_signals = false, no_link_signals = false, no_target_signals = false;
  std::string config_file;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "JSON file mirroring TrainConfig field names");
    app.add_option("--pretrain-epochs", pretrain_epochs);
    app.add_option("--finetune-epochs", finetune_epochs);
    app.add_option("--lr", lr);
    app.add_option("--gamma", gamma, "weight of the signal loss");
    app.add_option("--alpha", alpha, "Beta(alpha, alpha) mixup parameter");
    app.add_option("--k", k, "trinity signals per step");
    app.add_option("--n-shot", n_shot);
    app.add_option("--unified-dim", unified_dim);
    app.add_option("--gnn-dims", gnn_dims)->delimiter(',');
    app.add_option("--trinity-dim", trinity_dim);
    app.add_option("--seed", seed, "first seed (TRANSNET_SEED sets the default)");
    app.add_option("--pos-fraction", pos_fraction);
    app.add_option("--target-fraction", target_fraction);
    app.add_option("--connection-mode", connection_mode)
        ->check(CLI::IsMember({"edge_existence", "ppr"}));
    app.add_option("--ppr-teleport", ppr_teleport);
    app.add_flag("--no-unif-f", no_unif_f, "drop the feature-level discrepancy loss");
    app.add_flag("--no-unif-s", no_unif_s, "drop the structure-level discrepancy loss");
    app.add_flag("--no-mixup", no_mixup, "keep trinity signals, disable interpolation");
    app.add_flag("--no-node-signals", no_node_signals);
    app.add_flag("--no-link-signals", no_link_signals);
    app.add_flag("--no-target-signals", no_target_signals);
  }

  /// defaults <- TRANSNET_SEED <- config file <- flags
  TrainConfig resolve() const {
    TrainConfig cfg;
    if (const char* env = std::getenv("TRANSNET_SEED"); env != nullptr && *env != '\0') {
      std::uint64_t value = 0;
      const std::string_view text(env);
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("TRANSNET_SEED is not an unsigned integer: " + std::string(env));
      }
      cfg.seed = value;
    }
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw std::invalid_argument("cannot open config file " + config_file);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file " + config_file + ": " + e.what());
      }
      cfg.merge_json(doc);
    }
    if (pretrain_epochs) cfg.pretrain_epochs = *pretrain_epochs;
    if (finetune_epochs) cfg.finetune_epochs = *finetune_epochs;
    if (lr) cfg.lr = *lr;
    if (gamma) cfg.gamma = *gamma;
    if (alpha) cfg.alpha = *alpha;
    if (k) cfg.k = *k;
    if (n_shot) cfg.n_shot = *n_shot;
    if (unified_dim) cfg.unified_dim = *unified_dim;
    if (gnn_dims) cfg.gnn_dims = *gnn_dims;
    if (trinity_dim) cfg.trinity_dim = *trinity_dim;
    if (seed) cfg.seed = *seed;
    if (pos_fraction) cfg.pos_fraction = *pos_fraction;
    if (target_fraction) cfg.target_fraction = *target_fraction;
    if (connection_mode) cfg.connection_mode = trinity::connection_mode_from_string(*connection_mode);
    if (ppr_teleport) cfg.ppr_teleport = *ppr_teleport;
    cfg.disable_unif_f = cfg.disable_unif_f || no_unif_f;
    cfg.disable_unif_s = cfg.disable_unif_s || no_unif_s;
    cfg.disable_mixup = cfg.disable_mixup || no_mixup;
    cfg.disable_node_signals = cfg.disable_node_signals || no_node_signals;
    cfg.disable_link_signals = cfg.disable_link_signals || no_link_signals;
    cfg.disable_target_signals = cfg.disable_target_signals || no_target_signals;
    cfg.validate();
    return cfg;
  }
};

struct RunOptions {
  std::string source;
  std::string target;
  std::size_t seeds = 1;
  std::size_t jobs = 1;
  std::string out;
  std::string checkpoint;
  bool target_only = false;
};

int cmd_run(const RunOptions& o, const ConfigFlags& flags, std::ostream& out) {
  const TrainConfig cfg = flags.resolve();
  const graph::LabeledGraph source = graph::load_graph(o.source);
  const graph::LabeledGraph target = graph::load_graph(o.target);

  training::ExperimentOptions options;
  options.num_seeds = o.seeds;
  options.jobs = o.jobs;
  options.mode = o.target_only ? training::RunMode::target_only : training::RunMode::transnet;
  std::optional<training::TransNetModel> last_model;
  const training::MetricsReport report =
      training::run_experiment(source, target, cfg, options, &last_model);

  graph::write_file_atomic(o.out, report.to_json().dump(2) + "\n");
  const fs::path ckpt_path = o.checkpoint.empty() ? fs::path(o.out + ".ckpt") : fs::path(o.checkpoint);
  const std::uint64_t last_seed = cfg.seed + o.seeds - 1;
  TrainConfig saved = cfg;
  saved.seed = last_seed;
  compute::save_checkpoint(
      last_model->to_checkpoint(training::checkpoint_metadata(saved, last_model->shape(), last_seed)),
      ckpt_path);

  out << "precision " << format_decimal(report.precision_mean) << " +- "
      << format_decimal(report.precision_std) << " over " << report.seeds.size() << " seeds\n"
      << "report " << o.out << "\ncheckpoint " << ckpt_path.string() << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& target_dir, std::ostream& out) {
  training::LoadedModel loaded = training::load_trained_model(checkpoint);
  if (!loaded.model.classifier_h) {
    throw compute::CheckpointError("checkpoint has no downstream classifier h");
  }
  const graph::LabeledGraph target = graph::load_graph(target_dir);
  if (target.feature_dim() != loaded.model.shape().target_feature_dim ||
      target.num_classes() != loaded.model.shape().num_classes) {
    throw std::invalid_argument("target dataset does not match the checkpoint's shapes");
  }
  const training::DomainData data = training::make_domain_data(
      target, graph::few_shot_split(target, loaded.config.n_shot, loaded.seed));
  out << format_decimal(training::evaluate_precision(loaded.model, data, data.split.eval_nodes))
      << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knowledge transfer across graphs: dataset tools, training and evaluation",
               "transnet"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a stochastic-block-model dataset");
  synth_cmd->add_option("--nodes", synth.nodes)->required();
  synth_cmd->add_option("--classes", synth.classes)->required();
  synth_cmd->add_option("--intra-p", synth.intra_p)->required();
  synth_cmd->add_option("--inter-p", synth.inter_p)->required();
  synth_cmd->add_option("--dim", synth.dim)->required();
  synth_cmd->add_option("--seed", synth.seed)->required();
  synth_cmd->add_option("--out", synth.out)->required();
  synth_cmd->add_option("--noise", synth.noise, "feature noise standard deviation");
  synth_cmd->add_option("--center-scale", synth.center_scale, "std of the random class centers");
  synth_cmd->add_option("--center-seed", synth.center_seed, "seed for class centers (default --seed)");
  synth_cmd->add_flag("--permute-features", synth.permute, "shuffle feature coordinates");
  synth_cmd->add_option("--permute-seed", synth.permute_seed, "seed for the permutation");

  std::string validate_dir;
  auto* validate_cmd = app.add_subcommand("validate", "check a dataset directory");
  validate_cmd->add_option("dataset", validate_dir)->required();

  RunOptions run_opts;
  ConfigFlags flags;
  auto* run_cmd = app.add_subcommand("run", "pre-train, fine-tune and evaluate over seeds");
  run_cmd->add_option("--source", run_opts.source)->required();
  run_cmd->add_option("--target", run_opts.target)->required();
  run_cmd->add_option("--seeds", run_opts.seeds, "number of independent trials")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--jobs", run_opts.jobs, "parallel seed workers")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run_opts.out, "report JSON path")->required();
  run_cmd->add_option("--checkpoint", run_opts.checkpoint, "checkpoint path (default <out>.ckpt)");
  run_cmd->add_flag("--target-only", run_opts.target_only,
                    "baseline: train the target branch from scratch");
  flags.attach(*run_cmd);

  std::string eval_ckpt;
  std::string eval_target;
  auto* eval_cmd = app.add_subcommand("eval", "precision of a checkpoint on its evaluation split");
  eval_cmd->add_option("--checkpoint", eval_ckpt)->required();
  eval_cmd->add_option("--target", eval_target)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*validate_cmd) return cmd_validate(validate_dir, out);
    if (*run_cmd) return cmd_run(run_opts, flags, out);
    if (*eval_cmd) return cmd_eval(eval_ckpt, eval_target, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace transnet::cli
