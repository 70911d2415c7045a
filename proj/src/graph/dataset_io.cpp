#include "transnet/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace transnet::graph {

namespace fs = std::filesystem;

DatasetError::DatasetError(fs::path file, std::size_t line, const std::string& message)
    : GraphError(file.string() + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                 message),
      file_(std::move(file)),
      line_(line) {}

namespace {

struct Meta {
  std::size_t num_nodes = 0;
  std::size_t feature_dim = 0;
  std::vector<std::string> label_vocab;
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(path, 0, "cannot open file");
  return in;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, std::string_view separators) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const auto next = line.find_first_of(separators, pos);
    const auto end = next == std::string_view::npos ? line.size() : next;
    out.push_back(line.substr(pos, end - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

Meta read_meta(const fs::path& path) {
  auto in = open_input(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(path, 0, std::string("malformed JSON: ") + e.what());
  }
  Meta meta;
  try {
    if (!doc.is_object()) throw DatasetError(path, 0, "top level must be an object");
    const auto& nodes = doc.at("num_nodes");
    const auto& dim = doc.at("feature_dim");
    if (!nodes.is_number_unsigned() || !dim.is_number_unsigned()) {
      throw DatasetError(path, 0, "num_nodes and feature_dim must be nonnegative integers");
    }
    meta.num_nodes = nodes.get<std::size_t>();
    meta.feature_dim = dim.get<std::size_t>();
    meta.label_vocab = doc.at("label_vocab").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(path, 0, std::string("invalid meta: ") + e.what());
  }
  if (meta.feature_dim == 0) throw DatasetError(path, 0, "feature_dim must be positive");
  std::map<std::string, int> seen;
  for (const auto& name : meta.label_vocab) {
    if (name.empty()) throw DatasetError(path, 0, "empty label name in label_vocab");
    if (!seen.emplace(name, 0).second) {
      throw DatasetError(path, 0, "duplicate label '" + name + "' in label_vocab");
    }
  }
  return meta;
}

std::vector<Edge> read_edges(const fs::path& path, std::size_t num_nodes) {
  auto in = open_input(path);
  std::vector<Edge> edges;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line, "\t ");
    std::vector<std::string_view> tokens;
    for (auto f : fields) {
      if (!f.empty()) tokens.push_back(f);
    }
    NodeId a = 0;
    NodeId b = 0;
    if (tokens.size() != 2 || !parse_number(tokens[0], a) || !parse_number(tokens[1], b)) {
      throw DatasetError(path, line_no, "expected two node indices");
    }
    if (a >= num_nodes || b >= num_nodes) {
      throw DatasetError(path, line_no, "node index out of range [0, " +
                                            std::to_string(num_nodes) + ")");
    }
    if (a == b) throw DatasetError(path, line_no, "self-loop on node " + std::to_string(a));
    edges.emplace_back(a, b);
  }
  return edges;
}

Matrix read_features(const fs::path& path, const Meta& meta) {
  auto in = open_input(path);
  Matrix features(static_cast<Eigen::Index>(meta.num_nodes),
                  static_cast<Eigen::Index>(meta.feature_dim));
  std::string raw;
  std::size_t row = 0;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) {
      throw DatasetError(path, line_no, "blank line inside feature matrix");
    }
    if (row >= meta.num_nodes) {
      throw DatasetError(path, line_no, "more feature rows than num_nodes = " +
                                            std::to_string(meta.num_nodes));
    }
    const auto fields = split_fields(line, ",");
    if (fields.size() != meta.feature_dim) {
      throw DatasetError(path, line_no, "expected " + std::to_string(meta.feature_dim) +
                                            " values, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double value = 0.0;
      if (!parse_number(fields[c], value)) {
        throw DatasetError(path, line_no, "malformed real in column " + std::to_string(c + 1));
      }
      features(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) = value;
    }
    ++row;
  }
  if (row != meta.num_nodes) {
    throw DatasetError(path, line_no, "found " + std::to_string(row) +
                                          " feature rows, expected num_nodes = " +
                                          std::to_string(meta.num_nodes));
  }
  return features;
}

std::vector<std::optional<int>> read_labels(const fs::path& path, const Meta& meta) {
  auto in = open_input(path);
  std::map<std::string, int, std::less<>> index;
  for (std::size_t i = 0; i < meta.label_vocab.size(); ++i) {
    index.emplace(meta.label_vocab[i], static_cast<int>(i));
  }
  std::vector<std::optional<int>> labels(meta.num_nodes);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DatasetError(path, line_no, "expected 'node_index<TAB>label_name'");
    }
    NodeId node = 0;
    if (!parse_number(line.substr(0, tab), node)) {
      throw DatasetError(path, line_no, "malformed node index");
    }
    if (node >= meta.num_nodes) {
      throw DatasetError(path, line_no, "node index out of range [0, " +
                                            std::to_string(meta.num_nodes) + ")");
    }
    const auto name = line.substr(tab + 1);
    const auto it = index.find(name);
    if (it == index.end()) {
      throw DatasetError(path, line_no, "unknown label '" + std::string(name) + "'");
    }
    if (labels[node] && *labels[node] != it->second) {
      throw DatasetError(path, line_no, "conflicting label for node " + std::to_string(node));
    }
    labels[node] = it->second;
  }
  return labels;
}

void append_real(std::string& out, double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw GraphError("failed to format real");
  out.append(buf, ptr);
}

}  // namespace

LabeledGraph load_graph(const fs::path& dataset_dir) {
  if (!fs::is_directory(dataset_dir)) {
    throw DatasetError(dataset_dir, 0, "dataset directory does not exist");
  }
  const Meta meta = read_meta(dataset_dir / kMetaFile);
  auto edges = read_edges(dataset_dir / kEdgesFile, meta.num_nodes);
  auto features = read_features(dataset_dir / kFeaturesFile, meta);
  auto labels = read_labels(dataset_dir / kLabelsFile, meta);
  return LabeledGraph(meta.num_nodes, std::move(edges), std::move(features), std::move(labels),
                      meta.label_vocab);
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw GraphError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw GraphError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

void save_graph(const LabeledGraph& g, const fs::path& dataset_dir) {
  fs::create_directories(dataset_dir);

  nlohmann::ordered_json meta;
  meta["num_nodes"] = g.num_nodes();
  meta["feature_dim"] = g.feature_dim();
  meta["label_vocab"] = g.label_vocab();
  write_file_atomic(dataset_dir / kMetaFile, meta.dump(2) + "\n");

  std::string edges;
  for (const auto& [a, b] : g.edges()) {
    edges += std::to_string(a);
    edges += '\t';
    edges += std::to_string(b);
    edges += '\n';
  }
  write_file_atomic(dataset_dir / kEdgesFile, edges);

  std::string features;
  const Matrix& x = g.features();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c > 0) features += ',';
      append_real(features, x(r, c));
    }
    features += '\n';
  }
  write_file_atomic(dataset_dir / kFeaturesFile, features);

  std::string labels;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (const auto& label = g.labels()[i]) {
      labels += std::to_string(i);
      labels += '\t';
      labels += g.label_vocab()[static_cast<std::size_t>(*label)];
      labels += '\n';
    }
  }
  write_file_atomic(dataset_dir / kLabelsFile, labels);
}

}  // namespace transnet::graph
