#include "transnet/config.hpp"

#include <cstdio>
#include <stdexcept>

namespace transnet::training {

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
  };
  require(lr > 0.0, "lr must be positive");
  require(gamma >= 0.0, "gamma must be nonnegative");
  require(alpha > 0.0, "alpha must be positive");
  require(k >= 2, "k must be at least 2");
  require(n_shot > 0, "n_shot must be positive");
  require(unified_dim > 0, "unified_dim must be positive");
  require(!gnn_dims.empty(), "gnn_dims must not be empty");
  for (std::size_t d : gnn_dims) require(d > 0, "gnn_dims entries must be positive");
  require(trinity_dim > 0, "trinity_dim must be positive");
  sampler().validate();
}

trinity::SamplerConfig TrainConfig::sampler() const {
  trinity::SamplerConfig s;
  s.k = k;
  s.pos_fraction = pos_fraction;
  s.target_fraction = disable_target_signals ? 0.0 : target_fraction;
  s.connection_mode = connection_mode;
  s.seed = seed;
  s.ppr_teleport = ppr_teleport;
  return s;
}

nlohmann::ordered_json TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["pretrain_epochs"] = pretrain_epochs;
  j["finetune_epochs"] = finetune_epochs;
  j["lr"] = lr;
  j["gamma"] = gamma;
  j["alpha"] = alpha;
  j["k"] = k;
  j["n_shot"] = n_shot;
  j["unified_dim"] = unified_dim;
  j["gnn_dims"] = gnn_dims;
  j["trinity_dim"] = trinity_dim;
  j["seed"] = seed;
  j["pos_fraction"] = pos_fraction;
  j["target_fraction"] = target_fraction;
  j["connection_mode"] = trinity::to_string(connection_mode);
  j["ppr_teleport"] = ppr_teleport;
  j["disable_unif_f"] = disable_unif_f;
  j["disable_unif_s"] = disable_unif_s;
  j["disable_mixup"] = disable_mixup;
  j["disable_node_signals"] = disable_node_signals;
  j["disable_link_signals"] = disable_link_signals;
  j["disable_target_signals"] = disable_target_signals;
  return j;
}

void TrainConfig::merge_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "pretrain_epochs") pretrain_epochs = value.get<std::size_t>();
      else if (key == "finetune_epochs") finetune_epochs = value.get<std::size_t>();
      else if (key == "lr") lr = value.get<double>();
      else if (key == "gamma") gamma = value.get<double>();
      else if (key == "alpha") alpha = value.get<double>();
      else if (key == "k") k = value.get<std::size_t>();
      else if (key == "n_shot") n_shot = value.get<std::size_t>();
      else if (key == "unified_dim") unified_dim = value.get<std::size_t>();
      else if (key == "gnn_dims") gnn_dims = value.get<std::vector<std::size_t>>();
      else if (key == "trinity_dim") trinity_dim = value.get<std::size_t>();
      else if (key == "seed") seed = value.get<std::uint64_t>();
      else if (key == "pos_fraction") pos_fraction = value.get<double>();
      else if (key == "target_fraction") target_fraction = value.get<double>();
      else if (key == "connection_mode")
        connection_mode = trinity::connection_mode_from_string(value.get<std::string>());
      else if (key == "ppr_teleport") ppr_teleport = value.get<double>();
      else if (key == "disable_unif_f") disable_unif_f = value.get<bool>();
      else if (key == "disable_unif_s") disable_unif_s = value.get<bool>();
      else if (key == "disable_mixup") disable_mixup = value.get<bool>();
      else if (key == "disable_node_signals") disable_node_signals = value.get<bool>();
      else if (key == "disable_link_signals") disable_link_signals = value.get<bool>();
      else if (key == "disable_target_signals") disable_target_signals = value.get<bool>();
      else throw std::invalid_argument("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
}

TrainConfig TrainConfig::from_json(const nlohmann::json& doc) {
  TrainConfig cfg;
  cfg.merge_json(doc);
  return cfg;
}

std::string TrainConfig::fingerprint() const {
  const std::string canonical = to_json().dump();
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace transnet::training
