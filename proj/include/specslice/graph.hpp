#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

#include "specslice/types.hpp"

namespace specslice {

struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  bool is_loop() const { return u == v; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class Split : std::uint8_t { none = 0, train, val, test };

inline constexpr int kUnlabeled = -1;

// Immutable undirected graph. Edges are stored once per unordered pair with
// u <= v, sorted. Labels use kUnlabeled for nodes without a class.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t num_nodes, std::vector<Edge> edges = {});
  Graph(std::size_t num_nodes, std::vector<Edge> edges, std::optional<Matrix> features,
        std::vector<int> labels, std::vector<Split> splits);

  std::size_t num_nodes() const { return num_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_self_loops() const;

  bool has_features() const { return features_.has_value(); }
  const Matrix& features() const;
  std::size_t num_features() const { return features_ ? features_->cols() : 0; }

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<int>& labels() const { return labels_; }
  int label(NodeId v) const { return labels_.empty() ? kUnlabeled : labels_[v]; }
  int num_classes() const { return num_classes_; }
  std::size_t num_labeled() const;

  bool has_splits() const { return !splits_.empty(); }
  const std::vector<Split>& splits() const { return splits_; }
  Split split(NodeId v) const { return splits_.empty() ? Split::none : splits_[v]; }

  // Self-loops contribute 1.
  std::vector<double> degrees() const;
  // Neighbor lists in CSR form; a self-loop appears once in its own list.
  void adjacency(std::vector<std::size_t>& offsets, std::vector<NodeId>& targets) const;

  Graph with_edges(std::vector<Edge> edges) const;
  Graph with_features(Matrix features) const;
  Graph with_labels(std::vector<int> labels) const;
  Graph with_splits(std::vector<Split> splits) const;

 private:
  void validate();

  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::optional<Matrix> features_;
  std::vector<int> labels_;
  std::vector<Split> splits_;
  int num_classes_ = 0;
};

// Sorts, orients u <= v and removes duplicate pairs.
std::vector<Edge> canonical_edges(std::vector<Edge> edges);

NodeMask mask_of(const Graph& g, std::initializer_list<Split> splits);

const char* split_name(Split s);

}  // namespace specslice
