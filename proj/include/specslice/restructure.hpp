#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specslice/graph.hpp"
#include "specslice/homophily.hpp"
#include "specslice/types.hpp"

namespace specslice {

struct PairDistance {
  NodeId i = 0;
  NodeId j = 0;
  double distance = 0.0;
};

// Ascending by distance, ties by (i, j).
inline bool pair_before(const PairDistance& a, const PairDistance& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

struct DistanceIndex {
  std::size_t num_nodes = 0;
  std::vector<PairDistance> pairs;  // i < j, ordered by pair_before
  bool truncated = false;
};

// With truncate_to, only the M smallest pairs are ever held in memory.
DistanceIndex pairwise_distances(const Matrix& h, std::optional<std::size_t> truncate_to = std::nullopt,
                                 unsigned threads = 0);

std::vector<Edge> topk_edges(const DistanceIndex& index, std::size_t k);

struct RestructureConfig {
  Metric metric = Metric::density;
  // 0 picks 1% of the candidate count, at least 1.
  std::size_t step = 0;
  // Keep the batch whose score dropped below the previous one.
  bool keep_final_batch = false;
};

struct RestructureResult {
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_counts;  // one entry per executed step
  std::vector<double> scores;
  std::size_t stop_step = 0;  // number of accepted steps
  std::size_t step = 0;
  Metric metric = Metric::density;
  NodeMask mask;
  bool exhausted = false;
  std::vector<std::string> warnings;
};

RestructureResult greedy_restructure(const DistanceIndex& index, std::span<const int> labels,
                                     const NodeMask& mask, const RestructureConfig& config);

// Writes the edge list to `edge_path` and the trace to `edge_path` + ".json".
// config_json is embedded verbatim as the "config" field.
void export_restructured(const Graph& g, const RestructureResult& result,
                         const std::filesystem::path& edge_path, const std::string& config_json = "{}");

}  // namespace specslice
