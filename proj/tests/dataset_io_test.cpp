#include <doctest.h>

#include "test_support.hpp"
#include "transnet/dataset_io.hpp"

using namespace transnet;
using namespace transnet::graph;
using namespace transnet::testing;

namespace {

void write_dataset(const std::filesystem::path& dir, const std::string& meta,
                   const std::string& edges, const std::string& features,
                   const std::string& labels) {
  std::filesystem::create_directories(dir);
  write_text(dir / "meta.json", meta);
  write_text(dir / "edges.tsv", edges);
  write_text(dir / "features.csv", features);
  write_text(dir / "labels.tsv", labels);
}

const char* kMeta = R"({"num_nodes": 3, "feature_dim": 2, "label_vocab": ["a", "b"]})";

}  // namespace

TEST_CASE("hand-written dataset loads") {
  TempDir tmp;
  write_dataset(tmp.path(), kMeta, "0\t1\n2 1\n\n", "1,2\n3.5,-4e-3\n0,0\n", "0\ta\n2\tb\n");
  const LabeledGraph g = load_graph(tmp.path());
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.has_edge(1, 2));
  CHECK(g.features()(1, 1) == -4e-3);
  CHECK(g.labels()[0] == 0);
  CHECK_FALSE(g.labels()[1].has_value());
  CHECK(g.labels()[2] == 1);
}

TEST_CASE("save then load is exact") {
  TempDir tmp;
  Rng rng = make_rng({3});
  Matrix x = random_matrix(5, 4, rng, 1e3);
  x(0, 0) = 1.0 / 3.0;
  x(1, 1) = 5e-324;
  x(2, 2) = -0.0;
  const LabeledGraph g(5, {{0, 4}, {1, 2}, {3, 4}}, x, {1, std::nullopt, 0, 2, std::nullopt},
                       {"x", "y", "z"});
  save_graph(g, tmp / "ds");
  const LabeledGraph back = load_graph(tmp / "ds");
  CHECK(back.edges() == g.edges());
  CHECK(back.features() == g.features());
  CHECK(back.labels() == g.labels());
  CHECK(back.label_vocab() == g.label_vocab());

  save_graph(back, tmp / "again");
  for (const char* f : {"meta.json", "edges.tsv", "features.csv", "labels.tsv"}) {
    CHECK(read_text(tmp / "ds" / f) == read_text(tmp / "again" / f));
  }
  CHECK_FALSE(std::filesystem::exists(tmp / "ds" / "edges.tsv.tmp"));
}

TEST_CASE("each canonical corruption is rejected") {
  const LabeledGraph g = small_sbm(12, 2);
  for (Corruption c : all_corruptions()) {
    CAPTURE(corruption_name(c));
    TempDir tmp;
    save_graph(g, tmp.path());
    CHECK_NOTHROW(load_graph(tmp.path()));
    corrupt(tmp.path(), c, g.num_nodes());
    CHECK_THROWS_AS(load_graph(tmp.path()), DatasetError);
  }
}

TEST_CASE("errors carry file and line") {
  TempDir tmp;
  write_dataset(tmp.path(), kMeta, "0\t1\n1\t1\n", "1,2\n3,4\n5,6\n", "");
  try {
    load_graph(tmp.path());
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    CHECK(e.file().filename() == "edges.tsv");
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("edges.tsv:2:") != std::string::npos);
  }
}

TEST_CASE("malformed inputs") {
  struct Case {
    const char* what;
    std::string meta, edges, features, labels;
    const char* file;
  };
  const std::string f3 = "1,2\n3,4\n5,6\n";
  const std::vector<Case> cases = {
      {"not json", "{num_nodes", "", f3, "", "meta.json"},
      {"negative count", R"({"num_nodes": -1, "feature_dim": 2, "label_vocab": []})", "", f3, "",
       "meta.json"},
      {"zero dim", R"({"num_nodes": 3, "feature_dim": 0, "label_vocab": []})", "", f3, "",
       "meta.json"},
      {"duplicate vocab", R"({"num_nodes": 3, "feature_dim": 2, "label_vocab": ["a", "a"]})", "",
       f3, "", "meta.json"},
      {"one endpoint", kMeta, "0\n", f3, "", "edges.tsv"},
      {"text endpoint", kMeta, "0\tx\n", f3, "", "edges.tsv"},
      {"short row", kMeta, "", "1,2\n3\n5,6\n", "", "features.csv"},
      {"bad real", kMeta, "", "1,2\n3,q\n5,6\n", "", "features.csv"},
      {"blank row", kMeta, "", "1,2\n\n5,6\n", "", "features.csv"},
      {"extra row", kMeta, "", f3 + "7,8\n", "", "features.csv"},
      {"no tab", kMeta, "", f3, "0 a\n", "labels.tsv"},
      {"label range", kMeta, "", f3, "3\ta\n", "labels.tsv"},
      {"conflict", kMeta, "", f3, "0\ta\n0\tb\n", "labels.tsv"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.what);
    TempDir tmp;
    write_dataset(tmp.path(), c.meta, c.edges, c.features, c.labels);
    try {
      load_graph(tmp.path());
      FAIL("expected DatasetError");
    } catch (const DatasetError& e) {
      CHECK(e.file().filename() == c.file);
    }
  }
}

TEST_CASE("repeated identical label is accepted") {
  TempDir tmp;
  write_dataset(tmp.path(), kMeta, "", "1,2\n3,4\n5,6\n", "1\tb\n1\tb\n");
  CHECK(load_graph(tmp.path()).labels()[1] == 1);
}

TEST_CASE("missing directory and files") {
  TempDir tmp;
  CHECK_THROWS_AS(load_graph(tmp / "nope"), DatasetError);
  std::filesystem::create_directories(tmp / "partial");
  write_text(tmp / "partial" / "meta.json", kMeta);
  CHECK_THROWS_AS(load_graph(tmp / "partial"), DatasetError);
}
