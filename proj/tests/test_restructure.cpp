#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "specslice/embed.hpp"
#include "specslice/error.hpp"
#include "specslice/generators.hpp"
#include "specslice/graph_io.hpp"
#include "specslice/restructure.hpp"
#include "specslice/slicer.hpp"
#include "test_support.hpp"

using namespace specslice;
namespace ts = testsupport;

namespace {

std::vector<PairDistance> sorted_pairs(const Matrix& h) {
  std::vector<PairDistance> all;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = i + 1; j < h.rows(); ++j) {
      double sq = 0;
      for (Eigen::Index c = 0; c < h.cols(); ++c) sq += (h(i, c) - h(j, c)) * (h(i, c) - h(j, c));
      all.push_back({NodeId(i), NodeId(j), std::sqrt(sq)});
    }
  std::stable_sort(all.begin(), all.end(), [](const PairDistance& a, const PairDistance& b) {
    return a.distance < b.distance;
  });
  return all;
}

struct PrefixScan {
  std::size_t stop = 0;
  bool exhausted = false;
  std::vector<double> scores;
};

// One pair per step; each prefix scored from scratch by the dense oracle.
PrefixScan prefix_scan(const DistanceIndex& idx, const std::vector<int>& labels, const NodeMask& mask) {
  PrefixScan out;
  double previous = 0.5;
  std::vector<Edge> edges;
  for (std::size_t t = 0; t < idx.pairs.size(); ++t) {
    edges.push_back({idx.pairs[t].i, idx.pairs[t].j});
    Graph g(idx.num_nodes, edges, std::nullopt, labels, {});
    double score = ts::naive_density(g, mask).h_den;
    out.scores.push_back(score);
    if (score < previous) {
      out.stop = t;
      return out;
    }
    previous = score;
  }
  out.stop = idx.pairs.size();
  out.exhausted = true;
  return out;
}

}  // namespace

TEST_CASE("pairwise distance examples") {
  Matrix h(4, 2);
  h << 0, 0, 3, 4, 3, 4, 10, 10;
  auto idx = pairwise_distances(h);
  REQUIRE(idx.pairs.size() == 6);
  CHECK(idx.pairs[0].i == 1);
  CHECK(idx.pairs[0].j == 2);
  CHECK(idx.pairs[0].distance == 0.0);
  CHECK_FALSE(idx.truncated);

  Matrix onehot = Matrix::Identity(5, 5);
  auto ties = pairwise_distances(onehot);
  std::vector<std::pair<NodeId, NodeId>> expect;
  for (NodeId i = 0; i < 5; ++i)
    for (NodeId j = i + 1; j < 5; ++j) expect.push_back({i, j});
  for (std::size_t k = 0; k < ties.pairs.size(); ++k) {
    CHECK(ties.pairs[k].distance == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::make_pair(ties.pairs[k].i, ties.pairs[k].j) == expect[k]);
  }
}

TEST_CASE("full ordering matches a brute-force sort") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Matrix h = ts::random_matrix(50, 3 + seed, seed);
    auto idx = pairwise_distances(h);
    auto naive = sorted_pairs(h);
    REQUIRE(idx.pairs.size() == naive.size());
    for (std::size_t k = 0; k < naive.size(); ++k) {
      CHECK(idx.pairs[k].i == naive[k].i);
      CHECK(idx.pairs[k].j == naive[k].j);
      CHECK(idx.pairs[k].distance == doctest::Approx(naive[k].distance).epsilon(1e-14));
    }
  }
}

TEST_CASE("truncation keeps the smallest pairs and ignores thread count") {
  Matrix h = ts::random_matrix(120, 4, 7);
  auto full = pairwise_distances(h);
  for (std::size_t m : {1u, 37u, 500u, 7140u}) {
    for (unsigned threads : {1u, 3u}) {
      auto cut = pairwise_distances(h, m, threads);
      REQUIRE(cut.pairs.size() == m);
      CHECK(cut.truncated == (m < full.pairs.size()));
      for (std::size_t k = 0; k < m; ++k) {
        CHECK(cut.pairs[k].i == full.pairs[k].i);
        CHECK(cut.pairs[k].j == full.pairs[k].j);
        CHECK(cut.pairs[k].distance == full.pairs[k].distance);
      }
    }
  }
  Matrix dup = Matrix::Zero(30, 2);
  auto tied = pairwise_distances(dup, 20, 2);
  CHECK(tied.pairs.back().i == 0);
  CHECK(tied.pairs.back().j == 20);
}

TEST_CASE("top-k edges") {
  Matrix h(4, 1);
  h << 0, 10, 10.5, 30;
  auto idx = pairwise_distances(h);
  CHECK(topk_edges(idx, 0).empty());
  auto one = topk_edges(idx, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Edge{1, 2});
  CHECK_THROWS_AS(topk_edges(pairwise_distances(h, 2), 3), Error);
}

TEST_CASE("trained SBM embeddings put intra-class pairs first") {
  std::vector<std::size_t> sizes{30, 30};
  Graph g = generate_sbm(sizes, 0.3, 0.02, 7);
  Dictionary d = build_dictionary(g, default_bank(), sample_random_signals(60, 16, 8), 1);
  TrainConfig cfg;
  cfg.seed = 3;
  cfg.optimizer = OptimizerKind::adam;
  auto model = train(d.gamma, g.labels(), {}, cfg).model;
  auto idx = pairwise_distances(forward(model, d.gamma));
  std::size_t intra_pairs = 2 * (30 * 29 / 2);
  auto chosen = topk_edges(idx, intra_pairs);
  std::size_t same = 0;
  for (const auto& e : chosen) same += g.label(e.u) == g.label(e.v);
  CHECK(static_cast<double>(same) / static_cast<double>(chosen.size()) > 0.9);
}

TEST_CASE("hand-simulated four-node loop") {
  Matrix h(4, 2);
  h << 0, 0, 0.1, 0, 5, 5, 5, 5.1;
  std::vector<int> labels{0, 0, 1, 1};
  RestructureConfig cfg;
  cfg.step = 1;
  auto r = greedy_restructure(pairwise_distances(h), labels, NodeMask(4, true), cfg);
  std::vector<Edge> got = canonical_edges(r.edges);
  CHECK(got == std::vector<Edge>{{0, 1}, {2, 3}});
  CHECK(r.stop_step == 2);
  REQUIRE(r.scores.size() == 3);
  CHECK(r.scores[0] == 0.5);
  CHECK(r.scores[1] == doctest::Approx(2.0 / 3.0));
  CHECK(r.scores[2] < r.scores[1]);
  CHECK_FALSE(r.exhausted);

  cfg.keep_final_batch = true;
  auto literal = greedy_restructure(pairwise_distances(h), labels, NodeMask(4, true), cfg);
  CHECK(literal.edges.size() == 3);
  CHECK(literal.stop_step == 3);
}

TEST_CASE("separable embeddings produce only intra-class edges at the trace maximum") {
  std::mt19937 rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  Matrix h(16, 2);
  std::vector<int> labels(16);
  for (int i = 0; i < 16; ++i) {
    labels[i] = i % 2;
    h(i, 0) = 100.0 * labels[i] + noise(rng);
    h(i, 1) = noise(rng);
  }
  auto idx = pairwise_distances(h);
  RestructureConfig cfg;
  cfg.step = 1;
  auto r = greedy_restructure(idx, labels, NodeMask(16, true), cfg);
  for (const auto& e : r.edges) CHECK(labels[e.u] == labels[e.v]);
  auto scan = prefix_scan(idx, labels, NodeMask(16, true));
  double best = *std::max_element(scan.scores.begin(), scan.scores.end());
  Graph out(16, r.edges, std::nullopt, labels, {});
  double final_score = density_homophily(out, NodeMask(16, true)).h_den;
  CHECK(final_score > 0.5);
  CHECK(final_score == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("constant score consumes every candidate") {
  Matrix h = ts::random_matrix(8, 2, 1);
  std::vector<int> labels(8, 0);
  auto r = greedy_restructure(pairwise_distances(h), labels, NodeMask(8, true), {Metric::density, 1, false});
  CHECK(r.exhausted);
  CHECK(r.edges.size() == 28);
  CHECK(r.stop_step == 28);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("greedy stop point matches a brute-force prefix scan") {
  std::mt19937 rng(2024);
  for (int instance = 0; instance < 50; ++instance) {
    std::size_t n = 6 + rng() % 20;
    std::size_t dims = 1 + rng() % 3;
    Matrix h = ts::random_matrix(n, dims, 500 + instance);
    std::vector<int> labels(n);
    int classes = 2 + static_cast<int>(rng() % 2);
    for (auto& y : labels) y = static_cast<int>(rng() % classes);
    labels[0] = 0;
    labels[1] = 1;
    NodeMask mask(n, true);
    for (std::size_t v = 2; v < n; ++v) mask[v] = rng() % 5 != 0;
    auto idx = pairwise_distances(h);
    REQUIRE(idx.pairs.size() <= 300);
    RestructureConfig cfg;
    cfg.step = 1;
    auto r = greedy_restructure(idx, labels, mask, cfg);
    auto scan = prefix_scan(idx, labels, mask);
    CHECK(r.stop_step == scan.stop);
    CHECK(r.exhausted == scan.exhausted);
    CHECK(r.edges.size() == scan.stop);
    for (std::size_t t = 0; t < scan.scores.size(); ++t) CHECK(r.scores[t] == doctest::Approx(scan.scores[t]).epsilon(1e-12));

    Eigen::MatrixXd adj = ts::dense_adjacency(Graph(n, r.edges));
    CHECK(adj == adj.transpose());
    for (std::size_t t = 1; t < r.edges.size(); ++t)
      CHECK(idx.pairs[t].distance >= idx.pairs[t - 1].distance);
    CHECK(greedy_restructure(idx, labels, mask, cfg).edges == r.edges);
  }
}

TEST_CASE("batched steps and default step size") {
  Matrix h = ts::random_matrix(40, 3, 9);
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) labels[i] = i % 2;
  auto idx = pairwise_distances(h);
  auto r = greedy_restructure(idx, labels, NodeMask(40, true), {});
  CHECK(r.step == 7);
  for (std::size_t s = 0; s + 1 < r.edge_counts.size(); ++s) CHECK(r.edge_counts[s] == 7 * (s + 1));
  CHECK(r.edges.size() == (r.exhausted ? idx.pairs.size() : 7 * r.stop_step));
  for (Metric m : {Metric::edge, Metric::node, Metric::norm}) {
    auto other = greedy_restructure(idx, labels, NodeMask(40, true), {m, 3, false});
    CHECK(other.metric == m);
    CHECK(other.scores.size() >= other.stop_step);
  }
}

TEST_CASE("a first batch below one half yields an empty graph") {
  Matrix h(4, 1);
  h << 0, 1, 0.1, 1.1;
  std::vector<int> labels{0, 0, 1, 1};
  auto r = greedy_restructure(pairwise_distances(h), labels, NodeMask(4, true), {Metric::density, 1, false});
  CHECK(r.edges.empty());
  CHECK(r.stop_step == 0);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("export round-trip and sidecar") {
  auto dir = ts::temp_dir("restructure_export");
  Graph g = generate_er(12, 0.2, {}, 1);
  RestructureResult empty;
  empty.mask = NodeMask(12, true);
  export_restructured(g, empty, dir / "empty.edges");
  Graph back = load_graph(dir / "empty.edges");
  CHECK(back.num_edges() == 0);
  CHECK(back.num_nodes() == 12);
  auto side = nlohmann::json::parse(ts::read_file(dir / "empty.edges.json"));
  CHECK(side["steps"] == 0);

  Matrix h = ts::random_matrix(12, 2, 4);
  auto r = greedy_restructure(pairwise_distances(h), g.labels(), NodeMask(12, true), {Metric::density, 2, false});
  export_restructured(g, r, dir / "r.edges", R"({"seed": 4})");
  Graph loaded = load_graph(dir / "r.edges");
  CHECK(loaded.edges() == canonical_edges(r.edges));
  auto doc = nlohmann::json::parse(ts::read_file(dir / "r.edges.json"));
  CHECK(doc["steps"] == r.scores.size());
  CHECK(doc["scores"].size() == r.scores.size());
  CHECK(doc["edge_counts"].size() == r.scores.size());
  CHECK(doc["stop_step"] == r.stop_step);
  CHECK(doc["metric"] == "h_den");
  CHECK(doc["mask"].size() == 12);
  CHECK(doc["config"]["seed"] == 4);
}
