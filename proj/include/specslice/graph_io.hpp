#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specslice/graph.hpp"

namespace specslice {

enum class IdRemap { automatic, never, always };

struct LoadOptions {
  std::filesystem::path edge_path;
  std::optional<std::filesystem::path> feature_path;
  std::optional<std::filesystem::path> label_path;
  std::optional<std::filesystem::path> split_path;
  bool feature_header = false;
  std::optional<std::size_t> num_nodes;
  IdRemap remap = IdRemap::automatic;
  // Read before ingestion when present, written after.
  std::optional<std::filesystem::path> id_map_path;
};

struct IngestStats {
  std::size_t edge_lines = 0;
  std::size_t self_loops = 0;
  std::size_t duplicate_lines = 0;
  std::size_t unique_edges = 0;
  std::size_t reciprocal_pairs = 0;
  bool remapped = false;
};

Graph load_graph(const LoadOptions& options, IngestStats* stats = nullptr);

// Convenience overload with default options.
Graph load_graph(const std::filesystem::path& edge_path,
                 const std::optional<std::filesystem::path>& feature_path = std::nullopt,
                 const std::optional<std::filesystem::path>& label_path = std::nullopt,
                 const std::optional<std::filesystem::path>& split_path = std::nullopt);

void save_edges(const std::filesystem::path& path, const std::vector<Edge>& edges,
                std::optional<std::size_t> num_nodes = std::nullopt);
void save_labels(const std::filesystem::path& path, const Graph& g);
void save_splits(const std::filesystem::path& path, const Graph& g);
void save_features(const std::filesystem::path& path, const Graph& g);

}  // namespace specslice
