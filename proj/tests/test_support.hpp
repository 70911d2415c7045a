#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "transnet/graph.hpp"
#include "transnet/random.hpp"
#include "transnet/tensor.hpp"

namespace transnet::testing {

using compute::Matrix;
using compute::Tensor;

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("transnet_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

/// Central differences of a scalar function of one matrix.
inline Matrix numeric_gradient(const std::function<double()>& f, Matrix& x, double step = 1e-5) {
  Matrix g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + step;
    const double up = f();
    x.data()[i] = saved - step;
    const double down = f();
    x.data()[i] = saved;
    g.data()[i] = (up - down) / (2.0 * step);
  }
  return g;
}

/// Norm-wise relative error; exact agreement of two zero gradients is 0.
inline double relative_error(const Matrix& analytic, const Matrix& numeric) {
  const double denom = std::max(analytic.norm(), numeric.norm());
  if (denom < 1e-12) return 0.0;
  return (analytic - numeric).norm() / denom;
}

/// Compares backward() against central differences for every input.
/// `build` must read the inputs' current values on every call.
inline double max_gradient_error(std::vector<Tensor>& inputs,
                                 const std::function<Tensor()>& build) {
  for (auto& t : inputs) t.clear_grad();
  compute::backward(build());
  double worst = 0.0;
  for (auto& t : inputs) {
    const Matrix analytic = t.has_grad() ? t.grad() : Matrix::Zero(t.rows(), t.cols());
    const Matrix numeric =
        numeric_gradient([&] { return build().item(); }, t.mutable_value());
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

/// Small labeled graph: two triangles joined by one edge, features 3-wide.
inline graph::LabeledGraph two_triangles(std::uint64_t seed = 1) {
  Rng rng = make_rng({seed});
  std::vector<graph::Edge> edges = {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}};
  std::vector<std::optional<int>> labels = {0, 0, 0, 1, 1, 1};
  return graph::LabeledGraph(6, edges, random_matrix(6, 3, rng), labels, {"a", "b"});
}

inline graph::LabeledGraph small_sbm(std::size_t nodes, std::uint64_t seed, bool permute = false,
                                     std::size_t dim = 6, std::size_t classes = 3) {
  graph::SbmSpec spec;
  spec.num_nodes = nodes;
  spec.num_classes = classes;
  spec.intra_p = 0.3;
  spec.inter_p = 0.05;
  spec.feature_dim = dim;
  spec.class_centers = graph::random_class_centers(classes, dim, 1.0, 99);
  spec.feature_noise = 0.5;
  if (permute) spec.feature_permutation = graph::random_permutation(dim, seed + 17);
  spec.seed = seed;
  return graph::generate_sbm(spec);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
}

inline void append_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary | std::ios::app) << text;
}

/// The canonical ways a dataset directory can be broken.
enum class Corruption { bad_index, row_count, self_loop, unknown_label, malformed_meta };

inline const std::vector<Corruption>& all_corruptions() {
  static const std::vector<Corruption> kinds = {Corruption::bad_index, Corruption::row_count,
                                                Corruption::self_loop, Corruption::unknown_label,
                                                Corruption::malformed_meta};
  return kinds;
}

inline const char* corruption_name(Corruption c) {
  switch (c) {
    case Corruption::bad_index: return "bad_index";
    case Corruption::row_count: return "row_count";
    case Corruption::self_loop: return "self_loop";
    case Corruption::unknown_label: return "unknown_label";
    case Corruption::malformed_meta: return "malformed_meta";
  }
  return "?";
}

/// Breaks a valid dataset directory holding `num_nodes` nodes in place.
inline void corrupt(const std::filesystem::path& dir, Corruption c, std::size_t num_nodes) {
  switch (c) {
    case Corruption::bad_index:
      append_text(dir / "edges.tsv", "0\t" + std::to_string(num_nodes) + "\n");
      break;
    case Corruption::row_count: {
      std::string text = read_text(dir / "features.csv");
      text.pop_back();
      text.erase(text.rfind('\n') + 1);
      write_text(dir / "features.csv", text);
      break;
    }
    case Corruption::self_loop:
      append_text(dir / "edges.tsv", "1\t1\n");
      break;
    case Corruption::unknown_label:
      append_text(dir / "labels.tsv", "0\tno_such_class\n");
      break;
    case Corruption::malformed_meta: {
      std::string text = read_text(dir / "meta.json");
      write_text(dir / "meta.json", text.substr(0, text.size() / 2));
      break;
    }
  }
}

}  // namespace transnet::testing
