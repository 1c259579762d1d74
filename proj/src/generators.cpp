#include "specslice/generators.hpp"

#include <algorithm>
#include <cmath>

#include "random.hpp"
#include "specslice/error.hpp"

namespace specslice {
namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::config, std::string(name) + " must lie in [0, 1]");
}

}  // namespace

Graph generate_er(std::size_t n, double p, const LabelScheme& scheme, std::uint64_t seed,
                  bool self_loops) {
  if (n < 1) fail(ErrorCode::config, "generate_er: n must be at least 1");
  check_probability(p, "p");
  std::vector<int> labels;
  if (!scheme.explicit_labels.empty()) {
    if (scheme.explicit_labels.size() != n) fail(ErrorCode::config, "label count != n");
    labels = scheme.explicit_labels;
  } else if (scheme.num_classes > 0) {
    labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % scheme.num_classes);
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = self_loops ? i : i + 1; j < n; ++j)
      if (detail::uniform01(rng) < p) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
  return Graph(n, std::move(edges), std::nullopt, std::move(labels), {});
}

Graph generate_sbm(std::span<const std::size_t> class_sizes, double p_intra, double p_inter,
                   std::uint64_t seed, bool self_loops) {
  check_probability(p_intra, "p_intra");
  check_probability(p_inter, "p_inter");
  std::vector<int> labels;
  for (std::size_t k = 0; k < class_sizes.size(); ++k)
    labels.insert(labels.end(), class_sizes[k], static_cast<int>(k));
  const std::size_t n = labels.size();
  if (n == 0) fail(ErrorCode::config, "generate_sbm: no nodes");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = self_loops ? i : i + 1; j < n; ++j) {
      double p = labels[i] == labels[j] ? p_intra : p_inter;
      if (detail::uniform01(rng) < p) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
    }
  return Graph(n, std::move(edges), std::nullopt, std::move(labels), {});
}

Graph generate_grid(std::size_t width, std::size_t height) {
  if (width < 1 || height < 1) fail(ErrorCode::config, "grid dimensions must be positive");
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) {
      auto id = static_cast<NodeId>(r * width + c);
      if (c + 1 < width) edges.push_back({id, id + 1});
      if (r + 1 < height) edges.push_back({id, static_cast<NodeId>(id + width)});
    }
  return Graph(width * height, std::move(edges));
}

Graph with_class_features(const Graph& g, std::size_t num_features, double shift,
                          std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(g.num_nodes(), num_features);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = normal(rng);
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    int y = g.label(static_cast<NodeId>(v));
    if (y != kUnlabeled && static_cast<std::size_t>(y) < num_features) x(v, y) += shift;
  }
  return g.with_features(std::move(x));
}

Graph with_random_splits(const Graph& g, double train_fraction, double val_fraction,
                         std::uint64_t seed) {
  if (train_fraction < 0 || val_fraction < 0 || train_fraction + val_fraction > 1.0)
    fail(ErrorCode::config, "split fractions must be non-negative and sum to at most 1");
  Rng rng(seed);
  std::vector<Split> splits(g.num_nodes(), Split::none);
  for (int k = 0; k < g.num_classes(); ++k) {
    std::vector<NodeId> members;
    for (std::size_t v = 0; v < g.num_nodes(); ++v)
      if (g.labels()[v] == k) members.push_back(static_cast<NodeId>(v));
    detail::shuffle(members.begin(), members.end(), rng);
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * members.size()));
    auto n_val = static_cast<std::size_t>(std::llround(val_fraction * members.size()));
    n_val = std::min(n_val, members.size() - std::min(n_train, members.size()));
    for (std::size_t i = 0; i < members.size(); ++i)
      splits[members[i]] = i < n_train ? Split::train : i < n_train + n_val ? Split::val : Split::test;
  }
  return g.with_splits(std::move(splits));
}

}  // namespace specslice
