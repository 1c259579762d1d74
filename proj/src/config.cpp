#include "specslice/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "specslice/error.hpp"

namespace specslice {

MaskPolicy parse_mask(const std::string& name) {
  if (name == "all") return MaskPolicy::all;
  if (name == "train") return MaskPolicy::train;
  if (name == "val") return MaskPolicy::val;
  if (name == "test") return MaskPolicy::test;
  if (name == "train_val" || name == "train+val") return MaskPolicy::train_val;
  fail(ErrorCode::config, "unknown mask '" + name + "' (all, train, val, test, train_val)");
}

const char* mask_name(MaskPolicy policy) {
  switch (policy) {
    case MaskPolicy::all: return "all";
    case MaskPolicy::train: return "train";
    case MaskPolicy::val: return "val";
    case MaskPolicy::test: return "test";
    case MaskPolicy::train_val: return "train_val";
  }
  return "?";
}

NodeMask resolve_mask(const Graph& g, MaskPolicy policy) {
  if (policy == MaskPolicy::all) return mask_all(g.num_nodes());
  if (!g.has_splits()) fail(ErrorCode::config, std::string("mask '") + mask_name(policy) + "' needs a split file");
  switch (policy) {
    case MaskPolicy::train: return mask_of(g, {Split::train});
    case MaskPolicy::val: return mask_of(g, {Split::val});
    case MaskPolicy::test: return mask_of(g, {Split::test});
    default: return mask_of(g, {Split::train, Split::val});
  }
}

namespace {

using nlohmann::json;

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw std::invalid_argument("'" + text + "' is not a valid number");
  return value;
}

template <typename T>
T parse_as(const std::string& text);

template <> double parse_as<double>(const std::string& t) { return parse_number<double>(t); }
template <> int parse_as<int>(const std::string& t) { return parse_number<int>(t); }
template <> unsigned parse_as<unsigned>(const std::string& t) { return parse_number<unsigned>(t); }
template <> std::size_t parse_as<std::size_t>(const std::string& t) { return parse_number<std::size_t>(t); }
template <> std::string parse_as<std::string>(const std::string& t) { return t; }

template <> bool parse_as<bool>(const std::string& t) {
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw std::invalid_argument("'" + t + "' is not a boolean");
}

template <typename T>
std::vector<T> parse_list(const std::string& t) {
  std::vector<T> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

template <> std::vector<std::size_t> parse_as<std::vector<std::size_t>>(const std::string& t) {
  return parse_list<std::size_t>(t);
}
template <> std::vector<int> parse_as<std::vector<int>>(const std::string& t) { return parse_list<int>(t); }

template <> SlicerKind parse_as<SlicerKind>(const std::string& t) {
  if (t == "rational") return SlicerKind::rational;
  if (t == "quadratic") return SlicerKind::quadratic;
  throw std::invalid_argument("'" + t + "' (rational, quadratic)");
}
template <> SlicerSolver parse_as<SlicerSolver>(const std::string& t) {
  if (t == "factored") return SlicerSolver::factored;
  if (t == "neumann") return SlicerSolver::neumann;
  throw std::invalid_argument("'" + t + "' (factored, neumann)");
}
template <> Architecture parse_as<Architecture>(const std::string& t) {
  if (t == "linear") return Architecture::linear;
  if (t == "mlp") return Architecture::mlp;
  throw std::invalid_argument("'" + t + "' (linear, mlp)");
}
template <> OptimizerKind parse_as<OptimizerKind>(const std::string& t) {
  if (t == "sgd_momentum") return OptimizerKind::sgd_momentum;
  if (t == "adam") return OptimizerKind::adam;
  if (t == "sgd") return OptimizerKind::sgd;
  throw std::invalid_argument("'" + t + "' (sgd_momentum, adam, sgd)");
}
template <> Metric parse_as<Metric>(const std::string& t) { return parse_metric(t); }
template <> MaskPolicy parse_as<MaskPolicy>(const std::string& t) { return parse_mask(t); }
template <> FilterKind parse_as<FilterKind>(const std::string& t) { return parse_filter(t); }

json echo(const std::string& v) { return v; }
json echo(double v) { return v; }
json echo(int v) { return v; }
json echo(unsigned v) { return v; }
json echo(std::size_t v) { return v; }
json echo(bool v) { return v; }
json echo(const std::vector<std::size_t>& v) { return v; }
json echo(const std::vector<int>& v) { return v; }
json echo(SlicerKind v) { return v == SlicerKind::rational ? "rational" : "quadratic"; }
json echo(SlicerSolver v) { return v == SlicerSolver::factored ? "factored" : "neumann"; }
json echo(Architecture v) { return v == Architecture::linear ? "linear" : "mlp"; }
json echo(OptimizerKind v) {
  return v == OptimizerKind::adam ? "adam" : v == OptimizerKind::sgd ? "sgd" : "sgd_momentum";
}
json echo(Metric v) { return metric_name(v); }
json echo(MaskPolicy v) { return mask_name(v); }
json echo(FilterKind v) { return filter_name(v); }

struct Entry {
  ConfigKey key;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<json(const PipelineConfig&)> get;
};

template <typename Access>
Entry bind(const char* key, const char* help, Access access) {
  return Entry{
      {key, help},
      [access](PipelineConfig& c, const std::string& text) {
        auto& field = access(c);
        field = parse_as<std::remove_reference_t<decltype(field)>>(text);
      },
      [access](const PipelineConfig& c) { return echo(access(const_cast<PipelineConfig&>(c))); }};
}

#define SS_FIELD(key, help, expr) bind(key, help, [](PipelineConfig& c) -> auto& { return expr; })

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      SS_FIELD("edges", "edge list path", c.edges),
      SS_FIELD("features", "feature CSV path", c.features),
      SS_FIELD("labels", "label file path", c.labels),
      SS_FIELD("splits", "split file path", c.splits),
      SS_FIELD("feature_header", "skip one header row in the feature CSV", c.feature_header),
      SS_FIELD("num_nodes", "node count override (0 infers)", c.num_nodes),
      SS_FIELD("id_map", "persisted id map for non-integer node ids", c.id_map),
      SS_FIELD("bank_count", "number of slicers", c.bank_count),
      SS_FIELD("s", "slicer width control", c.s),
      SS_FIELD("m", "slicer order", c.m),
      SS_FIELD("eps_hat", "slicer eps_hat", c.eps_hat),
      SS_FIELD("kind", "slicer kind: rational|quadratic", c.kind),
      SS_FIELD("p", "solver accuracy order", c.p),
      SS_FIELD("solver", "slicer solver: factored|neumann", c.solver),
      SS_FIELD("eta", "random signal count", c.eta),
      SS_FIELD("seed", "random seed", c.seed),
      SS_FIELD("threads", "worker threads (0 = hardware)", c.threads),
      SS_FIELD("margin", "triplet margin", c.train.margin),
      SS_FIELD("negatives", "negatives per anchor", c.train.negatives_per_anchor),
      SS_FIELD("batch_size", "triplets per mini-batch", c.train.batch_size),
      SS_FIELD("lr", "learning rate", c.train.learning_rate),
      SS_FIELD("epochs", "maximum epochs", c.train.max_epochs),
      SS_FIELD("patience", "early stopping patience (0 disables)", c.train.early_stop_patience),
      SS_FIELD("out_dim", "embedding dimension", c.train.output_dim),
      SS_FIELD("arch", "model: linear|mlp", c.train.arch),
      SS_FIELD("hidden", "hidden width of the mlp", c.train.hidden),
      SS_FIELD("optimizer", "sgd_momentum|adam|sgd", c.train.optimizer),
      SS_FIELD("momentum", "momentum coefficient", c.train.momentum),
      SS_FIELD("init_scale", "initial weight scale", c.train.init_scale),
      SS_FIELD("enumerate_positives", "use every positive instead of one draw", c.train.enumerate_positives),
      SS_FIELD("metric", "restructure metric: edge|node|norm|density", c.metric),
      SS_FIELD("step", "edges added per greedy step (0 = 1% of candidates)", c.step),
      SS_FIELD("candidates", "candidate pairs kept (0 = 50 N)", c.candidates),
      SS_FIELD("mask", "scoring mask: all|train|val|test|train_val", c.mask),
      SS_FIELD("keep_final_batch", "keep the batch that lowered the score", c.keep_final_batch),
      SS_FIELD("out_dir", "output directory", c.out_dir),
      SS_FIELD("cache_dir", "dictionary cache directory", c.cache_dir),
      SS_FIELD("use_cache", "reuse cached dictionaries", c.use_cache),
      SS_FIELD("generator", "gen model: er|sbm|grid", c.generator),
      SS_FIELD("n", "gen node count (er)", c.n),
      SS_FIELD("edge_p", "gen edge probability (er)", c.edge_p),
      SS_FIELD("sizes", "gen class sizes (sbm), comma separated", c.sizes),
      SS_FIELD("p_intra", "gen intra-class probability (sbm)", c.p_intra),
      SS_FIELD("p_inter", "gen inter-class probability (sbm)", c.p_inter),
      SS_FIELD("width", "gen grid width", c.width),
      SS_FIELD("height", "gen grid height", c.height),
      SS_FIELD("classes", "gen round-robin classes (er)", c.classes),
      SS_FIELD("self_loops", "gen samples self-loops", c.self_loops),
      SS_FIELD("feature_dim", "gen class-shifted feature dimension", c.feature_dim),
      SS_FIELD("feature_shift", "gen class feature shift", c.feature_shift),
      SS_FIELD("train_fraction", "gen stratified train fraction", c.train_fraction),
      SS_FIELD("val_fraction", "gen stratified validation fraction", c.val_fraction),
      SS_FIELD("columns", "oracle-compare signal columns", c.columns),
      SS_FIELD("p_values", "oracle-compare accuracy orders", c.p_values),
      SS_FIELD("dense_cap", "largest graph for dense eigendecomposition", c.dense_cap),
      SS_FIELD("image", "expressive input PGM (empty = synthetic)", c.image),
      SS_FIELD("filter", "expressive target filter: low|band|high", c.filter),
      SS_FIELD("size", "expressive synthetic image side", c.size),
      SS_FIELD("expressive_eta", "random signals in the expressive dictionary", c.expressive_eta),
      SS_FIELD("iterations", "expressive maximum iterations", c.regress.max_iterations),
      SS_FIELD("regress_patience", "expressive early stopping patience", c.regress.patience),
      SS_FIELD("regress_lr", "expressive learning rate", c.regress.learning_rate),
  };
  return table;
}

#undef SS_FIELD

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  for (const auto& e : entries()) {
    if (key != e.key.key) continue;
    try {
      e.set(*this, value);
    } catch (const std::invalid_argument& ex) {
      fail(ErrorCode::config, key + ": " + ex.what());
    } catch (const Error& ex) {
      fail(ErrorCode::config, key + ": " + ex.what());
    }
    return;
  }
  fail(ErrorCode::config, "unknown key '" + key + "'");
}

PipelineConfig PipelineConfig::parse(const std::string& text) { return parse(text, PipelineConfig{}); }

PipelineConfig PipelineConfig::parse(const std::string& text, PipelineConfig base) {
  PipelineConfig config = std::move(base);
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(number) + ": expected key=value");
      continue;
    }
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& ex) {
      errors.push_back("line " + std::to_string(number) + ": " + ex.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    fail(ErrorCode::config, msg);
  }
  return config;
}

void PipelineConfig::validate() const {
  std::vector<std::string> errors;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) errors.push_back(what);
  };
  try {
    bank().validate();
  } catch (const Error& ex) {
    errors.push_back(ex.what());
  }
  check(bank_count >= 1, "bank_count must be at least 1");
  check(eta >= 1 || !features.empty(), "eta must be at least 1 unless features are given");
  try {
    train.validate();
  } catch (const Error& ex) {
    errors.push_back(ex.what());
  }
  check(generator == "er" || generator == "sbm" || generator == "grid", "generator must be er, sbm or grid");
  check(edge_p >= 0.0 && edge_p <= 1.0, "edge_p must lie in [0, 1]");
  check(p_intra >= 0.0 && p_intra <= 1.0, "p_intra must lie in [0, 1]");
  check(p_inter >= 0.0 && p_inter <= 1.0, "p_inter must lie in [0, 1]");
  check(n >= 1, "n must be at least 1");
  check(width >= 1 && height >= 1, "width and height must be at least 1");
  check(classes >= 0, "classes must be >= 0");
  check(train_fraction >= 0.0 && val_fraction >= 0.0 && train_fraction + val_fraction <= 1.0,
        "train_fraction + val_fraction must lie in [0, 1]");
  check(columns >= 1, "columns must be at least 1");
  for (int pv : p_values) check(pv >= 1, "p_values entries must be positive");
  check(size >= 2, "size must be at least 2");
  check(regress.learning_rate >= 0.0, "regress_lr must be >= 0");
  check(!out_dir.empty(), "out_dir must not be empty");
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    fail(ErrorCode::config, msg);
  }
}

std::string PipelineConfig::to_json() const {
  json j = json::object();
  for (const auto& e : entries()) j[e.key.key] = e.get(*this);
  return j.dump();
}

SlicerBank PipelineConfig::bank() const {
  if (bank_count == 0) return {};
  auto b = SlicerBank::uniform(bank_count, s, m, eps_hat, kind, p);
  for (auto& prm : b.slicers) prm.solver = solver;
  return b;
}

RestructureConfig PipelineConfig::restructure_config() const {
  RestructureConfig rc;
  rc.metric = metric;
  rc.step = step;
  rc.keep_final_batch = keep_final_batch;
  return rc;
}

}  // namespace specslice
