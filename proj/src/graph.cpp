#include "specslice/graph.hpp"

#include <algorithm>
#include <string>

#include "specslice/error.hpp"

namespace specslice {

std::vector<Edge> canonical_edges(std::vector<Edge> edges) {
  for (auto& e : edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(canonical_edges(std::move(edges))) {
  validate();
}

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, std::optional<Matrix> features,
             std::vector<int> labels, std::vector<Split> splits)
    : num_nodes_(num_nodes),
      edges_(canonical_edges(std::move(edges))),
      features_(std::move(features)),
      labels_(std::move(labels)),
      splits_(std::move(splits)) {
  validate();
}

void Graph::validate() {
  for (const auto& e : edges_) {
    if (e.v >= num_nodes_)
      fail(ErrorCode::data, "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                                ") out of range for " + std::to_string(num_nodes_) + " nodes");
  }
  if (features_ && static_cast<std::size_t>(features_->rows()) != num_nodes_)
    fail(ErrorCode::data, "feature rows " + std::to_string(features_->rows()) +
                              " != node count " + std::to_string(num_nodes_));
  if (!labels_.empty()) {
    if (labels_.size() != num_nodes_) fail(ErrorCode::data, "label vector size != node count");
    int max_label = kUnlabeled;
    for (int y : labels_) {
      if (y < kUnlabeled) fail(ErrorCode::data, "negative class id " + std::to_string(y));
      max_label = std::max(max_label, y);
    }
    num_classes_ = max_label + 1;
  }
  if (!splits_.empty() && splits_.size() != num_nodes_)
    fail(ErrorCode::data, "split vector size != node count");
}

std::size_t Graph::num_self_loops() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_loop(); }));
}

const Matrix& Graph::features() const {
  if (!features_) fail(ErrorCode::data, "graph has no features");
  return *features_;
}

std::size_t Graph::num_labeled() const {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(), [](int y) { return y != kUnlabeled; }));
}

std::vector<double> Graph::degrees() const {
  std::vector<double> deg(num_nodes_, 0.0);
  for (const auto& e : edges_) {
    deg[e.u] += 1.0;
    if (!e.is_loop()) deg[e.v] += 1.0;
  }
  return deg;
}

void Graph::adjacency(std::vector<std::size_t>& offsets, std::vector<NodeId>& targets) const {
  offsets.assign(num_nodes_ + 1, 0);
  for (const auto& e : edges_) {
    ++offsets[e.u + 1];
    if (!e.is_loop()) ++offsets[e.v + 1];
  }
  for (std::size_t i = 0; i < num_nodes_; ++i) offsets[i + 1] += offsets[i];
  targets.assign(offsets.back(), 0);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& e : edges_) {
    targets[cursor[e.u]++] = e.v;
    if (!e.is_loop()) targets[cursor[e.v]++] = e.u;
  }
}

Graph Graph::with_edges(std::vector<Edge> edges) const {
  return Graph(num_nodes_, std::move(edges), features_, labels_, splits_);
}

Graph Graph::with_features(Matrix features) const {
  return Graph(num_nodes_, edges_, std::move(features), labels_, splits_);
}

Graph Graph::with_labels(std::vector<int> labels) const {
  return Graph(num_nodes_, edges_, features_, std::move(labels), splits_);
}

Graph Graph::with_splits(std::vector<Split> splits) const {
  return Graph(num_nodes_, edges_, features_, labels_, std::move(splits));
}

NodeMask mask_of(const Graph& g, std::initializer_list<Split> splits) {
  NodeMask mask(g.num_nodes(), false);
  if (!g.has_splits()) return mask;
  for (std::size_t v = 0; v < g.num_nodes(); ++v)
    mask[v] = std::find(splits.begin(), splits.end(), g.splits()[v]) != splits.end();
  return mask;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    case Split::none: break;
  }
  return "none";
}

}  // namespace specslice
