#include "specslice/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "specslice/error.hpp"

namespace specslice {
namespace {

namespace fs = std::filesystem;

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

[[noreturn]] void parse_error(const fs::path& path, std::size_t line, const std::string& what) {
  fail(ErrorCode::data, path.string() + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::data, "cannot open " + path.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Whitespace-tokenized non-comment lines. A "# num_nodes: N" comment is
// reported through header_nodes.
std::vector<Line> read_lines(const fs::path& path, std::optional<std::size_t>* header_nodes) {
  auto in = open_input(path);
  std::vector<Line> out;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string_view view = raw;
    auto hash = view.find('#');
    if (hash != std::string_view::npos) {
      if (header_nodes) {
        std::istringstream comment(std::string(view.substr(hash + 1)));
        std::string key;
        std::size_t value = 0;
        if (comment >> key && (key == "num_nodes:" || key == "num_nodes") && comment >> value)
          *header_nodes = value;
      }
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    std::istringstream ss{std::string(view)};
    Line line{number, {}};
    std::string tok;
    while (ss >> tok) line.tokens.push_back(tok);
    out.push_back(std::move(line));
  }
  return out;
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

class IdMap {
 public:
  explicit IdMap(bool active) : active_(active) {}

  bool active() const { return active_; }

  void load(const fs::path& path) {
    for (const auto& line : read_lines(path, nullptr)) {
      if (line.tokens.size() != 2) parse_error(path, line.number, "expected 'original dense'");
      auto dense = parse_uint(line.tokens[1]);
      if (!dense) parse_error(path, line.number, "dense id is not an integer");
      if (*dense != order_.size()) parse_error(path, line.number, "dense ids must be 0..n-1 in order");
      ids_.emplace(line.tokens[0], *dense);
      order_.push_back(line.tokens[0]);
    }
  }

  void save(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::data, "cannot write " + path.string());
    out << "# original dense\n";
    for (std::size_t i = 0; i < order_.size(); ++i) out << order_[i] << ' ' << i << '\n';
  }

  // Existing id or a fresh one when insert is set.
  std::optional<NodeId> lookup(const std::string& token, bool insert) {
    if (!active_) {
      auto v = parse_uint(token);
      if (!v || *v > std::numeric_limits<NodeId>::max()) return std::nullopt;
      return static_cast<NodeId>(*v);
    }
    auto it = ids_.find(token);
    if (it != ids_.end()) return static_cast<NodeId>(it->second);
    if (!insert) return std::nullopt;
    ids_.emplace(token, order_.size());
    order_.push_back(token);
    return static_cast<NodeId>(order_.size() - 1);
  }

  std::size_t size() const { return order_.size(); }

 private:
  bool active_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::string> order_;
};

Matrix read_features(const fs::path& path, bool header) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (header && number == 1) continue;
    auto view = trim(raw);
    if (view.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= view.size()) {
      auto comma = view.find(',', start);
      auto cell = trim(view.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start));
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        parse_error(path, number, "bad numeric cell '" + std::string(cell) + "'");
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      parse_error(path, number, "row has " + std::to_string(row.size()) + " columns, expected " +
                                    std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  Matrix x(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(i, j) = rows[i][j];
  return x;
}

}  // namespace

Graph load_graph(const LoadOptions& options, IngestStats* stats) {
  std::optional<std::size_t> header_nodes;
  auto edge_lines = read_lines(options.edge_path, &header_nodes);

  bool remap = options.remap == IdRemap::always;
  if (options.id_map_path && fs::exists(*options.id_map_path)) remap = options.remap != IdRemap::never;
  if (options.remap == IdRemap::automatic && !remap) {
    for (const auto& line : edge_lines)
      for (const auto& tok : line.tokens)
        if (!parse_uint(tok)) remap = true;
  }
  IdMap ids(remap);
  if (remap && options.id_map_path && fs::exists(*options.id_map_path)) ids.load(*options.id_map_path);

  IngestStats local;
  std::vector<Edge> edges;
  edges.reserve(edge_lines.size());
  std::size_t max_id_plus_one = 0;
  for (const auto& line : edge_lines) {
    if (line.tokens.size() != 2)
      parse_error(options.edge_path, line.number, "expected 'src dst', got " +
                                                      std::to_string(line.tokens.size()) + " fields");
    auto u = ids.lookup(line.tokens[0], true);
    auto v = ids.lookup(line.tokens[1], true);
    if (!u || !v) parse_error(options.edge_path, line.number, "node id is not a non-negative integer");
    edges.push_back({*u, *v});
    max_id_plus_one = std::max<std::size_t>(max_id_plus_one, std::max(*u, *v) + 1);
    ++local.edge_lines;
    if (*u == *v) ++local.self_loops;
  }

  {
    std::set<std::pair<NodeId, NodeId>> directed;
    for (const auto& e : edges) directed.emplace(e.u, e.v);
    local.duplicate_lines = edges.size() - directed.size();
    for (const auto& [u, v] : directed)
      if (u < v && directed.count({v, u})) ++local.reciprocal_pairs;
  }

  std::size_t n = remap ? ids.size() : max_id_plus_one;
  if (header_nodes) n = *header_nodes;
  if (options.num_nodes) n = *options.num_nodes;
  if (n < max_id_plus_one)
    fail(ErrorCode::data, options.edge_path.string() + ": node id " +
                              std::to_string(max_id_plus_one - 1) + " exceeds declared count " +
                              std::to_string(n));

  std::optional<Matrix> features;
  if (options.feature_path) {
    features = read_features(*options.feature_path, options.feature_header);
    if (static_cast<std::size_t>(features->rows()) != n)
      fail(ErrorCode::data, options.feature_path->string() + ": " +
                                std::to_string(features->rows()) + " feature rows, expected " +
                                std::to_string(n));
  }

  auto node_of = [&](const fs::path& path, const Line& line) {
    auto id = ids.lookup(line.tokens[0], false);
    if (!id || *id >= n)
      parse_error(path, line.number, "node id '" + line.tokens[0] + "' out of range");
    return *id;
  };

  std::vector<int> labels;
  if (options.label_path) {
    labels.assign(n, kUnlabeled);
    for (const auto& line : read_lines(*options.label_path, nullptr)) {
      if (line.tokens.size() != 2) parse_error(*options.label_path, line.number, "expected 'node label'");
      NodeId v = node_of(*options.label_path, line);
      auto y = parse_uint(line.tokens[1]);
      if (!y || *y > 1'000'000) parse_error(*options.label_path, line.number, "bad class id");
      labels[v] = static_cast<int>(*y);
    }
  }

  std::vector<Split> splits;
  if (options.split_path) {
    splits.assign(n, Split::none);
    for (const auto& line : read_lines(*options.split_path, nullptr)) {
      if (line.tokens.size() != 2) parse_error(*options.split_path, line.number, "expected 'node split'");
      NodeId v = node_of(*options.split_path, line);
      const auto& name = line.tokens[1];
      if (name == "train") splits[v] = Split::train;
      else if (name == "val") splits[v] = Split::val;
      else if (name == "test") splits[v] = Split::test;
      else parse_error(*options.split_path, line.number, "unknown split '" + name + "'");
    }
  }

  if (remap && options.id_map_path) ids.save(*options.id_map_path);

  Graph g(n, std::move(edges), std::move(features), std::move(labels), std::move(splits));
  local.unique_edges = g.num_edges();
  local.remapped = remap;
  if (stats) *stats = local;
  return g;
}

Graph load_graph(const fs::path& edge_path, const std::optional<fs::path>& feature_path,
                 const std::optional<fs::path>& label_path, const std::optional<fs::path>& split_path) {
  LoadOptions options;
  options.edge_path = edge_path;
  options.feature_path = feature_path;
  options.label_path = label_path;
  options.split_path = split_path;
  return load_graph(options);
}

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorCode::data, "cannot write " + path.string());
  return out;
}

}  // namespace

void save_edges(const fs::path& path, const std::vector<Edge>& edges,
                std::optional<std::size_t> num_nodes) {
  auto out = open_output(path);
  if (num_nodes) out << "# num_nodes: " << *num_nodes << '\n';
  for (const auto& e : edges) out << e.u << ' ' << e.v << '\n';
  if (!out) fail(ErrorCode::data, "write failed: " + path.string());
}

void save_labels(const fs::path& path, const Graph& g) {
  auto out = open_output(path);
  for (std::size_t v = 0; v < g.num_nodes(); ++v)
    if (g.label(static_cast<NodeId>(v)) != kUnlabeled) out << v << ' ' << g.labels()[v] << '\n';
}

void save_splits(const fs::path& path, const Graph& g) {
  auto out = open_output(path);
  for (std::size_t v = 0; v < g.num_nodes(); ++v)
    if (g.split(static_cast<NodeId>(v)) != Split::none)
      out << v << ' ' << split_name(g.splits()[v]) << '\n';
}

void save_features(const fs::path& path, const Graph& g) {
  auto out = open_output(path);
  out.precision(17);
  const auto& x = g.features();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << (j ? "," : "") << x(i, j);
    out << '\n';
  }
}

}  // namespace specslice
