#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <json.hpp>

#include "specslice/error.hpp"
#include "specslice/generators.hpp"
#include "specslice/homophily.hpp"
#include "test_support.hpp"

using namespace specslice;
namespace ts = testsupport;

namespace {

NodeMask all(const Graph& g) { return NodeMask(g.num_nodes(), true); }

Graph labeled(std::size_t n, std::vector<Edge> edges, std::vector<int> labels) {
  return Graph(n, std::move(edges), std::nullopt, std::move(labels), {});
}

Graph star() { return labeled(4, {{0, 1}, {0, 2}, {0, 3}}, {0, 1, 1, 1}); }

Graph triangle_same() { return labeled(3, {{0, 1}, {1, 2}, {0, 2}}, {0, 0, 0}); }

double gap_of(const DensityDecomposition& d, std::size_t k) {
  double worst = -1;
  for (Eigen::Index j = 0; j < d.inter.cols(); ++j)
    if (static_cast<Eigen::Index>(k) != j && !std::isnan(d.inter(k, j))) worst = std::max(worst, d.inter(k, j));
  return d.intra[k] - worst;
}

}  // namespace

TEST_CASE("edge homophily examples") {
  CHECK(edge_homophily(triangle_same(), all(triangle_same())) == 1.0);
  CHECK(edge_homophily(star(), all(star())) == 0.0);
  Graph cycle = labeled(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {0, 0, 1, 1});
  CHECK(edge_homophily(cycle, all(cycle)) == 0.5);
  CHECK(edge_homophily(cycle, all(cycle)) == ts::naive_edge_homophily(cycle, all(cycle)));
  Graph loops = labeled(2, {{0, 0}, {1, 1}}, {0, 1});
  CHECK_THROWS_AS(edge_homophily(loops, all(loops)), UndefinedMetric);
}

TEST_CASE("node homophily examples") {
  CHECK(node_homophily(triangle_same(), all(triangle_same())) == 1.0);
  CHECK(node_homophily(star(), all(star())) == 0.0);
  Graph path = labeled(3, {{0, 1}, {1, 2}}, {0, 0, 1});
  CHECK(node_homophily(path, all(path)) == doctest::Approx(0.5).epsilon(1e-15));
  Graph with_isolated = labeled(4, {{0, 1}, {1, 2}}, {0, 0, 1, 1});
  std::size_t excluded = 0;
  CHECK(node_homophily(with_isolated, all(with_isolated), &excluded) == doctest::Approx(0.5));
  CHECK(excluded == 1);
}

TEST_CASE("norm homophily examples") {
  // Each node has one same-class and one other-class neighbor.
  Graph balanced = labeled(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {0, 0, 1, 1});
  CHECK(norm_homophily(balanced, all(balanced)) == 0.0);
  std::vector<std::size_t> sizes{10, 10};
  Graph homo = generate_sbm(sizes, 1.0, 0.0, 1);
  CHECK(norm_homophily(homo, all(homo)) == 1.0);
  Graph hetero = generate_sbm(sizes, 0.0, 1.0, 1);
  CHECK(norm_homophily(hetero, all(hetero)) == 0.0);
  Graph one_class = triangle_same();
  CHECK_THROWS_AS(norm_homophily(one_class, all(one_class)), UndefinedMetric);
}

TEST_CASE("density components") {
  Graph tri = labeled(4, {{0, 1}, {1, 2}, {0, 2}}, {0, 0, 0, 1});
  CHECK(intra_density(tri, 0, all(tri)) == 0.5);
  Graph tri_loops = labeled(4, {{0, 1}, {1, 2}, {0, 2}, {0, 0}, {1, 1}, {2, 2}}, {0, 0, 0, 1});
  CHECK(intra_density(tri_loops, 0, all(tri_loops)) == 1.0);
  CHECK(intra_density(tri, 1, all(tri)) == 0.0);
  CHECK_THROWS_AS(intra_density(tri, 4, all(tri)), Error);

  Graph bip = labeled(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}}, {0, 0, 1, 1});
  CHECK(inter_density(bip, 0, 1, all(bip)) == 1.0);
  CHECK(inter_density(bip, 1, 0, all(bip)) == 1.0);
  Graph none = labeled(4, {{0, 1}}, {0, 0, 1, 1});
  CHECK(inter_density(none, 0, 1, all(none)) == 0.0);
  Graph one = labeled(5, {{0, 4}}, {0, 0, 1, 1, 1});
  CHECK(inter_density(one, 0, 1, all(one)) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("density limit graphs") {
  std::vector<std::size_t> sizes{50, 50};
  Graph homo = generate_sbm(sizes, 1.0, 0.0, 1);
  CHECK(density_homophily(homo, all(homo)).h_den == 1.0);
  Graph hetero = generate_sbm(sizes, 0.0, 1.0, 1);
  CHECK(density_homophily(hetero, all(hetero)).h_den == 0.0);
  Graph empty = generate_er(100, 0.0, {}, 1);
  CHECK(density_homophily(empty, all(empty)).h_den == 0.5);
  Graph complete = generate_er(100, 1.0, {}, 1);
  CHECK(density_homophily(complete, all(complete)).h_den == 0.5);
  Graph complete3 = generate_er(90, 1.0, {3, {}}, 1);
  CHECK(density_homophily(complete3, all(complete3)).h_den == 0.5);
}

TEST_CASE("library metrics agree with pair-enumeration oracles") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Graph g = ts::random_graph(12 + seed % 20, 0.25, seed, seed % 3 != 0, 2 + static_cast<int>(seed % 3));
    NodeMask subset(g.num_nodes(), true);
    std::mt19937 rng(static_cast<unsigned>(seed));
    if (seed % 2)
      for (std::size_t v = 0; v < subset.size(); ++v) subset[v] = rng() % 4 != 0;
    std::vector<int> present;
    for (std::size_t v = 0; v < subset.size(); ++v)
      if (subset[v]) present.push_back(g.label(v));
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    if (present.size() < 2) continue;

    auto d = density_homophily(g, subset);
    auto naive = ts::naive_density(g, subset);
    CHECK(d.h_hat_den == doctest::Approx(naive.h_hat).epsilon(1e-12));
    CHECK(d.h_den == doctest::Approx(naive.h_den).epsilon(1e-12));
    std::size_t idx = 0;
    for (double dk : d.intra)
      if (!std::isnan(dk)) CHECK(dk == doctest::Approx(naive.intra[idx++]).epsilon(1e-12));
    CHECK(norm_homophily(g, subset) == doctest::Approx(ts::naive_norm_homophily(g, subset)).epsilon(1e-12));
    try {
      double e = edge_homophily(g, subset);
      CHECK(e == doctest::Approx(ts::naive_edge_homophily(g, subset)).epsilon(1e-12));
      double n = node_homophily(g, subset);
      CHECK(n == doctest::Approx(ts::naive_node_homophily(g, subset)).epsilon(1e-12));
    } catch (const UndefinedMetric&) {
    }
  }
}

TEST_CASE("density monotonicity under single-edge additions") {
  std::mt19937 rng(99);
  int intra_checked = 0, inter_checked = 0;
  for (int instance = 0; instance < 100; ++instance) {
    std::uniform_int_distribution<std::size_t> size_pick(4, 15);
    std::vector<std::size_t> sizes{size_pick(rng), size_pick(rng), size_pick(rng)};
    std::uniform_real_distribution<double> prob(0.05, 0.6);
    Graph g = generate_sbm(sizes, prob(rng), prob(rng), 1000 + instance);
    auto before = density_homophily(g, all(g));
    const int k = before.argmin_class, j = before.argmax_partner;

    bool unique = true;
    for (std::size_t c = 0; c < sizes.size(); ++c)
      if (static_cast<int>(c) != k && gap_of(before, c) <= before.h_hat_den) unique = false;

    std::vector<NodeId> in_k, in_j;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (g.label(v) == k) in_k.push_back(v);
      if (g.label(v) == j) in_j.push_back(v);
    }
    auto has = [&](NodeId a, NodeId b) {
      return std::binary_search(g.edges().begin(), g.edges().end(), Edge{std::min(a, b), std::max(a, b)});
    };
    bool done = !unique;
    for (std::size_t a = 0; a < in_k.size() && !done; ++a)
      for (std::size_t b = a; b < in_k.size() && !done; ++b)
        if (!has(in_k[a], in_k[b])) {
          auto edges = g.edges();
          edges.push_back({in_k[a], in_k[b]});
          auto after = density_homophily(g.with_edges(edges), all(g));
          CHECK(after.h_hat_den > before.h_hat_den);
          ++intra_checked;
          done = true;
        }
    bool added = false;
    for (NodeId a : in_k) {
      for (NodeId b : in_j)
        if (!has(a, b)) {
          auto edges = g.edges();
          edges.push_back({std::min(a, b), std::max(a, b)});
          auto after = density_homophily(g.with_edges(edges), all(g));
          CHECK(after.h_hat_den < before.h_hat_den);
          ++inter_checked;
          added = true;
          break;
        }
      if (added) break;
    }
  }
  CHECK(intra_checked > 30);
  CHECK(inter_checked > 80);
}

TEST_CASE("label permutation invariance") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = ts::random_graph(30, 0.2, seed, true, 3);
    std::vector<int> perm{2, 0, 1};
    std::vector<int> relabeled = g.labels();
    for (int& y : relabeled) y = perm[y];
    Graph h = g.with_labels(relabeled);
    auto a = homophily_report(g, all(g));
    auto b = homophily_report(h, all(h));
    CHECK(a.h_edge == b.h_edge);
    CHECK(a.h_node == b.h_node);
    CHECK(*a.h_norm == doctest::Approx(*b.h_norm).epsilon(1e-14));
    CHECK(*a.h_den == doctest::Approx(*b.h_den).epsilon(1e-14));
    for (int k = 0; k < 3; ++k) CHECK(a.density.intra[k] == b.density.intra[perm[k]]);
  }
}

TEST_CASE("pure intra or inter edge sets give the extreme scores for any class mix") {
  std::mt19937 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    int classes = 2 + rep % 4;
    std::size_t n = 10 + rep;
    std::vector<int> labels(n);
    for (auto& y : labels) y = static_cast<int>(rng() % classes);
    labels[0] = 0;
    labels[1] = 0;
    labels[2] = 1;
    std::vector<Edge> same, diff;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (rng() % 3 == 0 || (u == 0 && v == 1) || (u == 0 && v == 2))
          (labels[u] == labels[v] ? same : diff).push_back({u, v});
    Graph gs = labeled(n, same, labels);
    Graph gd = labeled(n, diff, labels);
    CHECK(edge_homophily(gs, all(gs)) == 1.0);
    CHECK(node_homophily(gs, all(gs)) == 1.0);
    CHECK(edge_homophily(gd, all(gd)) == 0.0);
    CHECK(node_homophily(gd, all(gd)) == 0.0);
    CHECK(norm_homophily(gd, all(gd)) == 0.0);
    double hn = norm_homophily(gs, all(gs));
    CHECK(hn >= 0.0);
    CHECK(hn <= 1.0);
  }
}

TEST_CASE("report ranges and scaling identity") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Graph g = ts::random_graph(25, 0.05 + 0.03 * static_cast<double>(seed % 10), seed, true, 2 + seed % 3);
    auto r = homophily_report(g, all(g));
    REQUIRE(r.h_den);
    CHECK(*r.h_den == (1.0 + *r.h_hat_den) / 2.0);
    for (const auto& v : {r.h_edge, r.h_node, r.h_norm, r.h_den})
      if (v) {
        CHECK(*v >= 0.0);
        CHECK(*v <= 1.0);
      }
    CHECK(*r.h_hat_den >= -1.0);
    CHECK(*r.h_hat_den <= 1.0);
    for (double d : r.density.intra) {
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
    }
  }
}

TEST_CASE("subset restricts scoring to labeled members") {
  Graph g = labeled(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}, {0, 0, 1, 1, kUnlabeled, 0});
  NodeMask subset{true, true, true, true, true, false};
  auto r = homophily_report(g, subset);
  CHECK(r.labeled_nodes == 4);
  CHECK(r.scored_edges == 3);
  CHECK(*r.h_edge == doctest::Approx(2.0 / 3.0));
  CHECK(r.density.class_sizes == std::vector<std::size_t>{2, 2});

  Graph unlabeled(3, {{0, 1}});
  CHECK_THROWS_AS(homophily_report(unlabeled, all(unlabeled)), Error);
  Graph none = labeled(2, {{0, 1}}, {kUnlabeled, kUnlabeled});
  try {
    homophily_report(none, all(none));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("no labeled nodes") != std::string::npos);
  }
}

TEST_CASE("report JSON carries every field and nulls undefined metrics") {
  Graph g = labeled(4, {{0, 0}}, {0, 0, 1, 1});
  auto r = homophily_report(g, all(g));
  CHECK_FALSE(r.h_edge);
  CHECK_FALSE(r.h_node);
  REQUIRE(r.h_den);
  auto doc = nlohmann::json::parse(to_json(r));
  CHECK(doc["h_edge"].is_null());
  CHECK(doc["h_den"].get<double>() == *r.h_den);
  for (const char* key : {"h_node", "h_norm", "h_hat_den", "intra_density", "inter_density", "class_sizes",
                          "labeled_nodes", "num_nodes", "argmin_class"})
    CHECK(doc.contains(key));
}

TEST_CASE("metric names") {
  for (Metric m : {Metric::edge, Metric::node, Metric::norm, Metric::density})
    CHECK(parse_metric(metric_name(m)) == m);
  CHECK_THROWS_AS(parse_metric("bogus"), Error);
}

TEST_CASE("incremental counter matches graph scans bitwise") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Graph full = ts::random_graph(20, 0.3, seed, true, 2 + seed % 3);
    NodeMask subset(20, true);
    for (std::size_t v = 0; v < 20; v += 3 + seed % 2) subset[v] = seed % 2 == 0;
    std::vector<Edge> order = full.edges();
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::shuffle(order.begin(), order.end(), rng);
    HomophilyCounter counter(full.labels(), subset);
    std::vector<Edge> sofar;
    for (std::size_t i = 0; i < order.size(); ++i) {
      counter.add_edge(order[i].u, order[i].v);
      sofar.push_back(order[i]);
      if (i % 7 != 0 && i + 1 != order.size()) continue;
      Graph partial = full.with_edges(sofar);
      for (Metric m : {Metric::edge, Metric::node, Metric::norm, Metric::density}) {
        std::optional<double> scan;
        try {
          scan = metric_value(m, partial, subset);
        } catch (const UndefinedMetric&) {
        }
        auto inc = counter.score(m);
        REQUIRE(inc.has_value() == scan.has_value());
        if (scan) CHECK(*inc == *scan);
      }
    }
  }
}
