#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specslice/graph.hpp"
#include "specslice/types.hpp"

namespace specslice {

// All metrics see only labeled nodes inside `subset`. Self-loops count
// toward intra-class density and nothing else. UndefinedMetric is thrown when
// a ratio has nothing to average over.

double edge_homophily(const Graph& g, const NodeMask& subset);
double node_homophily(const Graph& g, const NodeMask& subset, std::size_t* excluded = nullptr);
double norm_homophily(const Graph& g, const NodeMask& subset);
double intra_density(const Graph& g, int k, const NodeMask& subset);
double inter_density(const Graph& g, int k, int j, const NodeMask& subset);

struct DensityDecomposition {
  double h_den = 0.0;
  double h_hat_den = 0.0;
  std::vector<std::size_t> class_sizes;  // indexed by class id
  std::vector<double> intra;             // d_k, NaN for absent classes
  Matrix inter;                          // d_kj, NaN where undefined
  int argmin_class = -1;
  int argmax_partner = -1;
};

DensityDecomposition density_homophily(const Graph& g, const NodeMask& subset);

struct HomophilyReport {
  std::optional<double> h_edge;
  std::optional<double> h_node;
  std::optional<double> h_norm;
  std::optional<double> h_den;
  std::optional<double> h_hat_den;
  DensityDecomposition density;
  std::size_t num_nodes = 0;
  std::size_t labeled_nodes = 0;
  std::size_t scored_edges = 0;
  std::size_t node_excluded = 0;
  NodeMask subset;
};

// Undefined metrics are left empty instead of throwing.
HomophilyReport homophily_report(const Graph& g, const NodeMask& subset);

std::string to_json(const HomophilyReport& report, int indent = 2);

enum class Metric { edge, node, norm, density };

Metric parse_metric(const std::string& name);
const char* metric_name(Metric m);

double metric_value(Metric m, const Graph& g, const NodeMask& subset);

// Per-class counters updated per added edge; score() matches metric_value on
// the graph built from the edges added so far.
class HomophilyCounter {
 public:
  HomophilyCounter(std::span<const int> labels, const NodeMask& subset);

  void add_edge(NodeId u, NodeId v);
  // Empty when the metric is undefined on the current edge set.
  std::optional<double> score(Metric m) const;

 private:
  std::optional<double> density_score() const;

  std::vector<int> labels_;  // kUnlabeled outside the subset
  int num_classes_ = 0;
  std::vector<std::size_t> class_size_;
  std::vector<std::size_t> intra_;  // includes self-loops
  std::vector<std::size_t> cross_;  // K x K, symmetric
  std::size_t edge_total_ = 0;
  std::size_t edge_same_ = 0;
  std::vector<std::size_t> node_degree_;
  std::vector<std::size_t> node_same_;
  std::vector<std::size_t> class_degree_;
  std::vector<std::size_t> class_same_;
  std::size_t labeled_ = 0;
  std::size_t present_classes_ = 0;
};

}  // namespace specslice
