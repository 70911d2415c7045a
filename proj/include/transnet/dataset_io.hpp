#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "transnet/graph.hpp"

namespace transnet::graph {

/// Dataset format error carrying the offending file and (1-based) line;
/// line 0 means the problem concerns the file as a whole.
class DatasetError : public GraphError {
 public:
  DatasetError(std::filesystem::path file, std::size_t line, const std::string& message);

  const std::filesystem::path& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::filesystem::path file_;
  std::size_t line_;
};

inline constexpr const char* kMetaFile = "meta.json";
inline constexpr const char* kEdgesFile = "edges.tsv";
inline constexpr const char* kFeaturesFile = "features.csv";
inline constexpr const char* kLabelsFile = "labels.tsv";

/// Reads a dataset directory (meta.json, edges.tsv, features.csv, labels.tsv).
LabeledGraph load_graph(const std::filesystem::path& dataset_dir);

/// Writes `g` in the dataset directory format. Each file is written to a
/// temporary name and renamed into place. Reals use the shortest
/// representation that round-trips exactly.
void save_graph(const LabeledGraph& g, const std::filesystem::path& dataset_dir);

/// Writes `contents` to `path` via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace transnet::graph
