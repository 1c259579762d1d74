#include "specslice/homophily.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "specslice/error.hpp"

namespace specslice {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shared formulas so graph scans and incremental counters agree bitwise.
double intra_formula(std::size_t edges, std::size_t size) {
  return 2.0 * static_cast<double>(edges) / (static_cast<double>(size) * static_cast<double>(size + 1));
}

double inter_formula(std::size_t edges, std::size_t size_k, std::size_t size_j) {
  return static_cast<double>(edges) / (static_cast<double>(size_k) * static_cast<double>(size_j));
}

double scaled(double h_hat) { return (1.0 + h_hat) / 2.0; }

double node_mean(const std::vector<std::size_t>& same, const std::vector<std::size_t>& degree,
                 std::size_t* excluded, const std::vector<int>& labels) {
  double sum = 0.0;
  std::size_t count = 0, skipped = 0;
  for (std::size_t v = 0; v < degree.size(); ++v) {
    if (labels[v] == kUnlabeled) continue;
    if (degree[v] == 0) {
      ++skipped;
      continue;
    }
    sum += static_cast<double>(same[v]) / static_cast<double>(degree[v]);
    ++count;
  }
  if (excluded) *excluded = skipped;
  if (count == 0) throw UndefinedMetric("node homophily: no labeled node has a labeled neighbor");
  return sum / static_cast<double>(count);
}

double norm_formula(const std::vector<std::size_t>& class_same, const std::vector<std::size_t>& class_degree,
                    const std::vector<std::size_t>& class_size, std::size_t labeled) {
  std::size_t present = 0;
  for (auto s : class_size) present += s > 0;
  if (present < 2) throw UndefinedMetric("norm homophily needs at least 2 classes");
  double total = 0.0;
  for (std::size_t k = 0; k < class_size.size(); ++k) {
    if (class_size[k] == 0) continue;
    double h_k = class_degree[k] ? static_cast<double>(class_same[k]) / static_cast<double>(class_degree[k]) : 0.0;
    total += std::max(0.0, h_k - static_cast<double>(class_size[k]) / static_cast<double>(labeled));
  }
  return total / static_cast<double>(present - 1);
}

// Labels with nodes outside the subset cleared.
std::vector<int> scoped_labels(const Graph& g, const NodeMask& subset) {
  if (!g.has_labels()) fail(ErrorCode::data, "graph has no labels");
  if (subset.size() != g.num_nodes()) fail(ErrorCode::data, "subset mask size != node count");
  std::vector<int> labels = g.labels();
  for (std::size_t v = 0; v < labels.size(); ++v)
    if (!subset[v]) labels[v] = kUnlabeled;
  return labels;
}

struct ClassCounts {
  int num_classes = 0;
  std::vector<std::size_t> size;
  std::vector<std::size_t> intra;
  std::vector<std::size_t> cross;  // K x K
  std::size_t labeled = 0;
};

ClassCounts count_classes(const Graph& g, const std::vector<int>& labels) {
  ClassCounts c;
  c.num_classes = g.num_classes();
  const auto k = static_cast<std::size_t>(c.num_classes);
  c.size.assign(k, 0);
  c.intra.assign(k, 0);
  c.cross.assign(k * k, 0);
  for (int y : labels)
    if (y != kUnlabeled) {
      ++c.size[y];
      ++c.labeled;
    }
  for (const auto& e : g.edges()) {
    int a = labels[e.u], b = labels[e.v];
    if (a == kUnlabeled || b == kUnlabeled) continue;
    if (a == b) {
      ++c.intra[a];
    } else {
      ++c.cross[a * k + b];
      ++c.cross[b * k + a];
    }
  }
  return c;
}

DensityDecomposition decompose(const ClassCounts& c) {
  const auto k = static_cast<std::size_t>(c.num_classes);
  DensityDecomposition d;
  d.class_sizes = c.size;
  d.intra.assign(k, kNaN);
  d.inter = Matrix::Constant(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), kNaN);
  std::vector<std::size_t> present;
  for (std::size_t a = 0; a < k; ++a)
    if (c.size[a] > 0) {
      present.push_back(a);
      d.intra[a] = intra_formula(c.intra[a], c.size[a]);
    }
  if (present.size() < 2) throw UndefinedMetric("density homophily needs at least 2 classes");
  for (auto a : present)
    for (auto b : present)
      if (a != b) d.inter(a, b) = inter_formula(c.cross[a * k + b], c.size[a], c.size[b]);
  double best = std::numeric_limits<double>::infinity();
  for (auto a : present) {
    double worst = -1.0;
    int partner = -1;
    for (auto b : present)
      if (a != b && d.inter(a, b) > worst) {
        worst = d.inter(a, b);
        partner = static_cast<int>(b);
      }
    double gap = d.intra[a] - worst;
    if (gap < best) {
      best = gap;
      d.argmin_class = static_cast<int>(a);
      d.argmax_partner = partner;
    }
  }
  d.h_hat_den = best;
  d.h_den = scaled(best);
  return d;
}

void neighbor_counts(const Graph& g, const std::vector<int>& labels, std::vector<std::size_t>& same,
                     std::vector<std::size_t>& degree) {
  same.assign(g.num_nodes(), 0);
  degree.assign(g.num_nodes(), 0);
  for (const auto& e : g.edges()) {
    if (e.is_loop()) continue;
    int a = labels[e.u], b = labels[e.v];
    if (a == kUnlabeled || b == kUnlabeled) continue;
    ++degree[e.u];
    ++degree[e.v];
    if (a == b) {
      ++same[e.u];
      ++same[e.v];
    }
  }
}

}  // namespace

double edge_homophily(const Graph& g, const NodeMask& subset) {
  auto labels = scoped_labels(g, subset);
  std::size_t total = 0, same = 0;
  for (const auto& e : g.edges()) {
    if (e.is_loop() || labels[e.u] == kUnlabeled || labels[e.v] == kUnlabeled) continue;
    ++total;
    same += labels[e.u] == labels[e.v];
  }
  if (total == 0) throw UndefinedMetric("edge homophily: no edge joins two labeled subset nodes");
  return static_cast<double>(same) / static_cast<double>(total);
}

double node_homophily(const Graph& g, const NodeMask& subset, std::size_t* excluded) {
  auto labels = scoped_labels(g, subset);
  std::vector<std::size_t> same, degree;
  neighbor_counts(g, labels, same, degree);
  return node_mean(same, degree, excluded, labels);
}

double norm_homophily(const Graph& g, const NodeMask& subset) {
  auto labels = scoped_labels(g, subset);
  std::vector<std::size_t> same, degree;
  neighbor_counts(g, labels, same, degree);
  const auto k = static_cast<std::size_t>(g.num_classes());
  std::vector<std::size_t> class_same(k, 0), class_degree(k, 0), class_size(k, 0);
  std::size_t labeled = 0;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] == kUnlabeled) continue;
    class_same[labels[v]] += same[v];
    class_degree[labels[v]] += degree[v];
    ++class_size[labels[v]];
    ++labeled;
  }
  return norm_formula(class_same, class_degree, class_size, labeled);
}

double intra_density(const Graph& g, int k, const NodeMask& subset) {
  auto c = count_classes(g, scoped_labels(g, subset));
  if (k < 0 || k >= c.num_classes || c.size[k] == 0)
    throw UndefinedMetric("class " + std::to_string(k) + " absent from subset");
  return intra_formula(c.intra[k], c.size[k]);
}

double inter_density(const Graph& g, int k, int j, const NodeMask& subset) {
  auto c = count_classes(g, scoped_labels(g, subset));
  for (int cls : {k, j})
    if (cls < 0 || cls >= c.num_classes || c.size[cls] == 0)
      throw UndefinedMetric("class " + std::to_string(cls) + " absent from subset");
  if (k == j) fail(ErrorCode::config, "inter_density needs two distinct classes");
  const auto kk = static_cast<std::size_t>(c.num_classes);
  return inter_formula(c.cross[k * kk + j], c.size[k], c.size[j]);
}

DensityDecomposition density_homophily(const Graph& g, const NodeMask& subset) {
  return decompose(count_classes(g, scoped_labels(g, subset)));
}

HomophilyReport homophily_report(const Graph& g, const NodeMask& subset) {
  auto labels = scoped_labels(g, subset);
  HomophilyReport r;
  r.num_nodes = g.num_nodes();
  r.subset = subset;
  for (int y : labels) r.labeled_nodes += y != kUnlabeled;
  if (r.labeled_nodes == 0) fail(ErrorCode::data, "no labeled nodes");
  for (const auto& e : g.edges())
    r.scored_edges += !e.is_loop() && labels[e.u] != kUnlabeled && labels[e.v] != kUnlabeled;
  auto attempt = [](auto fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const UndefinedMetric&) {
      return std::nullopt;
    }
  };
  r.h_edge = attempt([&] { return edge_homophily(g, subset); });
  r.h_node = attempt([&] { return node_homophily(g, subset, &r.node_excluded); });
  r.h_norm = attempt([&] { return norm_homophily(g, subset); });
  try {
    r.density = density_homophily(g, subset);
    r.h_den = r.density.h_den;
    r.h_hat_den = r.density.h_hat_den;
  } catch (const UndefinedMetric&) {
    auto c = count_classes(g, labels);
    r.density.class_sizes = c.size;
  }
  return r;
}

std::string to_json(const HomophilyReport& r, int indent) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["h_edge"] = opt(r.h_edge);
  j["h_node"] = opt(r.h_node);
  j["h_norm"] = opt(r.h_norm);
  j["h_den"] = opt(r.h_den);
  j["h_hat_den"] = opt(r.h_hat_den);
  j["num_nodes"] = r.num_nodes;
  j["labeled_nodes"] = r.labeled_nodes;
  j["scored_edges"] = r.scored_edges;
  j["node_homophily_excluded"] = r.node_excluded;
  j["class_sizes"] = r.density.class_sizes;
  json intra = json::array();
  for (double d : r.density.intra) intra.push_back(num(d));
  j["intra_density"] = intra;
  json inter = json::array();
  for (Eigen::Index a = 0; a < r.density.inter.rows(); ++a) {
    json row = json::array();
    for (Eigen::Index b = 0; b < r.density.inter.cols(); ++b) row.push_back(num(r.density.inter(a, b)));
    inter.push_back(row);
  }
  j["inter_density"] = inter;
  j["argmin_class"] = r.density.argmin_class;
  j["argmax_partner"] = r.density.argmax_partner;
  std::size_t in_subset = static_cast<std::size_t>(std::count(r.subset.begin(), r.subset.end(), true));
  j["subset_size"] = in_subset;
  return j.dump(indent);
}

Metric parse_metric(const std::string& name) {
  if (name == "edge" || name == "h_edge") return Metric::edge;
  if (name == "node" || name == "h_node") return Metric::node;
  if (name == "norm" || name == "h_norm") return Metric::norm;
  if (name == "density" || name == "den" || name == "h_den") return Metric::density;
  fail(ErrorCode::config, "unknown metric '" + name + "' (edge, node, norm, density)");
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::edge: return "h_edge";
    case Metric::node: return "h_node";
    case Metric::norm: return "h_norm";
    case Metric::density: return "h_den";
  }
  return "?";
}

double metric_value(Metric m, const Graph& g, const NodeMask& subset) {
  switch (m) {
    case Metric::edge: return edge_homophily(g, subset);
    case Metric::node: return node_homophily(g, subset);
    case Metric::norm: return norm_homophily(g, subset);
    case Metric::density: return density_homophily(g, subset).h_den;
  }
  return kNaN;
}

HomophilyCounter::HomophilyCounter(std::span<const int> labels, const NodeMask& subset)
    : labels_(labels.begin(), labels.end()) {
  if (subset.size() != labels_.size()) fail(ErrorCode::data, "subset mask size != label count");
  for (std::size_t v = 0; v < labels_.size(); ++v) {
    if (!subset[v]) labels_[v] = kUnlabeled;
    if (labels_[v] < kUnlabeled) fail(ErrorCode::data, "negative class id");
    num_classes_ = std::max(num_classes_, labels_[v] + 1);
  }
  const auto k = static_cast<std::size_t>(num_classes_);
  class_size_.assign(k, 0);
  intra_.assign(k, 0);
  cross_.assign(k * k, 0);
  class_degree_.assign(k, 0);
  class_same_.assign(k, 0);
  node_degree_.assign(labels_.size(), 0);
  node_same_.assign(labels_.size(), 0);
  for (int y : labels_)
    if (y != kUnlabeled) {
      ++class_size_[y];
      ++labeled_;
    }
  for (auto s : class_size_) present_classes_ += s > 0;
}

void HomophilyCounter::add_edge(NodeId u, NodeId v) {
  if (u >= labels_.size() || v >= labels_.size()) fail(ErrorCode::data, "edge out of range");
  int a = labels_[u], b = labels_[v];
  if (a == kUnlabeled || b == kUnlabeled) return;
  const auto k = static_cast<std::size_t>(num_classes_);
  if (u == v) {
    ++intra_[a];
    return;
  }
  ++edge_total_;
  ++node_degree_[u];
  ++node_degree_[v];
  class_degree_[a] += 1;
  class_degree_[b] += 1;
  if (a == b) {
    ++intra_[a];
    ++edge_same_;
    ++node_same_[u];
    ++node_same_[v];
    class_same_[a] += 2;
  } else {
    ++cross_[a * k + b];
    ++cross_[b * k + a];
  }
}

std::optional<double> HomophilyCounter::density_score() const {
  if (present_classes_ < 2) return std::nullopt;
  ClassCounts c;
  c.num_classes = num_classes_;
  c.size = class_size_;
  c.intra = intra_;
  c.cross = cross_;
  c.labeled = labeled_;
  return decompose(c).h_den;
}

std::optional<double> HomophilyCounter::score(Metric m) const {
  try {
    switch (m) {
      case Metric::edge:
        if (edge_total_ == 0) return std::nullopt;
        return static_cast<double>(edge_same_) / static_cast<double>(edge_total_);
      case Metric::node:
        return node_mean(node_same_, node_degree_, nullptr, labels_);
      case Metric::norm:
        return norm_formula(class_same_, class_degree_, class_size_, labeled_);
      case Metric::density:
        return density_score();
    }
  } catch (const UndefinedMetric&) {
  }
  return std::nullopt;
}

}  // namespace specslice
