#include "specslice/restructure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "parallel.hpp"
#include "specslice/error.hpp"
#include "specslice/graph_io.hpp"

namespace specslice {
namespace {

void keep_smallest(std::vector<PairDistance>& pairs, std::size_t m) {
  if (pairs.size() <= m) return;
  std::nth_element(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(m), pairs.end(), pair_before);
  pairs.resize(m);
}

}  // namespace

DistanceIndex pairwise_distances(const Matrix& h, std::optional<std::size_t> truncate_to,
                                 unsigned threads) {
  const auto n = static_cast<std::size_t>(h.rows());
  if (n < 2) fail(ErrorCode::data, "pairwise_distances needs at least 2 nodes");
  const std::size_t total = n * (n - 1) / 2;
  const std::size_t limit = truncate_to ? std::min(*truncate_to, total) : total;

  // Row blocks hold roughly equal pair counts.
  const std::size_t block_count = std::min<std::size_t>(n - 1, 4 * detail::resolve_threads(threads, n));
  std::vector<std::size_t> starts{0};
  {
    std::size_t acc = 0, per = (total + block_count - 1) / block_count;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      acc += n - 1 - i;
      if (acc >= per && starts.size() < block_count) {
        starts.push_back(i + 1);
        acc = 0;
      }
    }
    starts.push_back(n - 1);
  }

  std::vector<std::vector<PairDistance>> partial(starts.size() - 1);
  detail::parallel_for(partial.size(), threads, [&](std::size_t b) {
    auto& out = partial[b];
    for (std::size_t i = starts[b]; i < starts[b + 1]; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double d = (h.row(static_cast<Eigen::Index>(i)) - h.row(static_cast<Eigen::Index>(j))).norm();
        out.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), d});
      }
      if (out.size() >= 2 * limit + n) keep_smallest(out, limit);
    }
    keep_smallest(out, limit);
  });

  DistanceIndex index;
  index.num_nodes = n;
  index.truncated = limit < total;
  for (auto& part : partial) {
    index.pairs.insert(index.pairs.end(), part.begin(), part.end());
    std::vector<PairDistance>().swap(part);
    keep_smallest(index.pairs, limit);
  }
  std::sort(index.pairs.begin(), index.pairs.end(), pair_before);
  if (!std::all_of(index.pairs.begin(), index.pairs.end(),
                   [](const PairDistance& p) { return std::isfinite(p.distance); }))
    fail(ErrorCode::numeric, "non-finite embedding distance");
  return index;
}

std::vector<Edge> topk_edges(const DistanceIndex& index, std::size_t k) {
  if (k > index.pairs.size())
    fail(ErrorCode::config, "topk: K=" + std::to_string(k) + " exceeds " +
                                std::to_string(index.pairs.size()) + " retained pairs");
  std::vector<Edge> edges;
  edges.reserve(k);
  for (std::size_t t = 0; t < k; ++t) edges.push_back({index.pairs[t].i, index.pairs[t].j});
  return edges;
}

RestructureResult greedy_restructure(const DistanceIndex& index, std::span<const int> labels,
                                     const NodeMask& mask, const RestructureConfig& config) {
  if (labels.size() != index.num_nodes) fail(ErrorCode::data, "restructure: label count != node count");
  if (mask.size() != index.num_nodes) fail(ErrorCode::data, "restructure: mask size != node count");

  RestructureResult result;
  result.metric = config.metric;
  result.mask = mask;
  result.step = config.step ? config.step : std::max<std::size_t>(1, index.pairs.size() / 100);

  HomophilyCounter counter(labels, mask);
  double lambda = 0.5;
  double lambda_old = 0.5;
  std::size_t consumed = 0;
  std::size_t last_batch = 0;
  bool dropped = false;
  while (lambda >= lambda_old) {
    lambda_old = lambda;
    if (consumed >= index.pairs.size()) {
      result.exhausted = true;
      break;
    }
    last_batch = std::min(result.step, index.pairs.size() - consumed);
    for (std::size_t t = 0; t < last_batch; ++t) {
      const auto& p = index.pairs[consumed + t];
      counter.add_edge(p.i, p.j);
    }
    consumed += last_batch;
    lambda = counter.score(config.metric).value_or(lambda_old);
    result.edge_counts.push_back(consumed);
    result.scores.push_back(lambda);
    dropped = lambda < lambda_old;
  }

  std::size_t keep = consumed;
  result.stop_step = result.scores.size();
  if (dropped && !config.keep_final_batch) {
    keep -= last_batch;
    result.stop_step -= 1;
  }
  if (result.exhausted)
    result.warnings.push_back("candidate pairs exhausted before the score dropped");
  if (dropped && result.stop_step == 0)
    result.warnings.push_back("first batch scored below 0.5; result is empty");
  result.edges.reserve(keep);
  for (std::size_t t = 0; t < keep; ++t) result.edges.push_back({index.pairs[t].i, index.pairs[t].j});
  return result;
}

void export_restructured(const Graph& g, const RestructureResult& result,
                         const std::filesystem::path& edge_path, const std::string& config_json) {
  save_edges(edge_path, result.edges, g.num_nodes());
  nlohmann::json j;
  j["steps"] = result.scores.size();
  j["edge_counts"] = result.edge_counts;
  j["scores"] = result.scores;
  j["stop_step"] = result.stop_step;
  j["step_size"] = result.step;
  j["final_edges"] = result.edges.size();
  j["metric"] = metric_name(result.metric);
  j["exhausted"] = result.exhausted;
  j["warnings"] = result.warnings;
  std::vector<NodeId> mask_nodes;
  for (std::size_t v = 0; v < result.mask.size(); ++v)
    if (result.mask[v]) mask_nodes.push_back(static_cast<NodeId>(v));
  j["mask"] = mask_nodes;
  try {
    j["config"] = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::internal, "config echo is not valid JSON");
  }
  auto sidecar = edge_path;
  sidecar += ".json";
  std::ofstream out(sidecar);
  if (!out) fail(ErrorCode::data, "cannot write " + sidecar.string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::data, "write failed: " + sidecar.string());
}

}  // namespace specslice
