#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "specslice/graph.hpp"

namespace specslice {

// Round-robin over num_classes when explicit is empty.
struct LabelScheme {
  int num_classes = 2;
  std::vector<int> explicit_labels;
};

Graph generate_er(std::size_t n, double p, const LabelScheme& labels, std::uint64_t seed,
                  bool self_loops = true);

Graph generate_sbm(std::span<const std::size_t> class_sizes, double p_intra, double p_inter,
                   std::uint64_t seed, bool self_loops = true);

Graph generate_grid(std::size_t width, std::size_t height);

// X = N(0, I) plus `shift` on the coordinate matching the node's class.
Graph with_class_features(const Graph& g, std::size_t num_features, double shift,
                          std::uint64_t seed);

// Class-stratified random split of the labeled nodes.
Graph with_random_splits(const Graph& g, double train_fraction, double val_fraction,
                         std::uint64_t seed);

}  // namespace specslice
