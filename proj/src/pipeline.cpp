#include "specslice/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "random.hpp"
#include "specslice/eigen_oracle.hpp"
#include "specslice/generators.hpp"
#include "specslice/graph_io.hpp"

namespace specslice {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void log(const std::string& msg) { std::cerr << "[specslice] " << msg << '\n'; }

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  } catch (const fs::filesystem_error& e) {
    throw StageError(name, Error(ErrorCode::data, e.what()));
  } catch (const std::bad_alloc&) {
    throw StageError(name, Error(ErrorCode::internal, "out of memory"));
  }
}

class Timer {
 public:
  explicit Timer(std::string what) : what_(std::move(what)), start_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_);
    log(what_ + " took " + std::to_string(ms.count()) + " ms");
  }

 private:
  std::string what_;
  std::chrono::steady_clock::time_point start_;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorCode::data, "cannot write " + path.string());
  out << text << '\n';
  if (!out) fail(ErrorCode::data, "write failed: " + path.string());
}

std::uint64_t hash_file(const std::string& path, std::uint64_t h) {
  if (path.empty()) return fnv1a("-", 1, h);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::data, "cannot open " + path);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

Graph ingest(const PipelineConfig& c, bool require_labels) {
  return stage("ingest", [&] {
    if (c.edges.empty()) fail(ErrorCode::config, "no edge file given (edges=...)");
    LoadOptions opt;
    opt.edge_path = c.edges;
    if (!c.features.empty()) opt.feature_path = c.features;
    if (!c.labels.empty()) opt.label_path = c.labels;
    if (!c.splits.empty()) opt.split_path = c.splits;
    opt.feature_header = c.feature_header;
    if (c.num_nodes) opt.num_nodes = c.num_nodes;
    if (!c.id_map.empty()) opt.id_map_path = c.id_map;
    IngestStats stats;
    Graph g = load_graph(opt, &stats);
    log("ingested " + std::to_string(g.num_nodes()) + " nodes, " + std::to_string(stats.unique_edges) +
        " undirected edges from " + std::to_string(stats.edge_lines) + " lines");
    if (require_labels && (!g.has_labels() || g.num_labeled() == 0)) fail(ErrorCode::data, "no labeled nodes");
    return g;
  });
}

RandomSignals signals_for(std::size_t n, std::size_t eta, std::uint64_t seed) {
  if (eta == 0) return RandomSignals{Matrix(static_cast<Eigen::Index>(n), 0), 0, seed};
  return sample_random_signals(n, eta, seed);
}

json report_json(const Graph& g, const NodeMask& mask) {
  return json::parse(to_json(homophily_report(g, mask)));
}

json reports(const Graph& g, MaskPolicy scoring) {
  json j;
  j["all"] = report_json(g, mask_all(g.num_nodes()));
  if (g.has_splits()) {
    j[mask_name(scoring)] = report_json(g, resolve_mask(g, scoring));
    j["test"] = report_json(g, resolve_mask(g, MaskPolicy::test));
  }
  return j;
}

json with_config(json body, const PipelineConfig& c) {
  body["config"] = json::parse(c.to_json());
  return body;
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t hash) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string cmd_restructure(const PipelineConfig& c) {
  stage("config", [&] { c.validate(); });
  const fs::path out_dir = c.out_dir;
  Graph g = ingest(c, true);
  const std::size_t n = g.num_nodes();

  Dictionary dict = stage("dictionary", [&] {
    std::ostringstream key;
    key.precision(17);
    key << c.bank_count << ' ' << c.s << ' ' << c.m << ' ' << c.eps_hat << ' '
        << static_cast<int>(c.kind) << ' ' << c.p << ' ' << static_cast<int>(c.solver) << ' ' << c.eta << ' '
        << c.seed << ' ' << n << ' ' << c.feature_header;
    std::uint64_t h = hash_file(c.edges, 0xcbf29ce484222325ULL);
    h = hash_file(c.features, h);
    const std::string k = key.str();
    h = fnv1a(k.data(), k.size(), h);
    char name[40];
    std::snprintf(name, sizeof name, "dict_%016llx.bin", static_cast<unsigned long long>(h));
    fs::path cache = (c.cache_dir.empty() ? out_dir / "cache" : fs::path(c.cache_dir)) / name;
    if (c.use_cache && fs::exists(cache)) {
      Dictionary d = load_dictionary(cache);
      if (d.rows() == n) {
        log("dictionary cache hit " + cache.string());
        return d;
      }
      log("dictionary cache shape mismatch; rebuilding");
    }
    Timer t("dictionary build");
    Dictionary d = build_dictionary(g, c.bank(), signals_for(n, c.eta, c.seed), c.threads);
    if (c.use_cache) save_dictionary(cache, d);
    return d;
  });
  log("dictionary " + std::to_string(dict.rows()) + " x " + std::to_string(dict.cols()));

  TrainConfig tc = c.train;
  tc.seed = c.seed;
  TrainResult trained = stage("train", [&] {
    Timer t("training");
    return train(dict.gamma, g.labels(), g.splits(), tc);
  });
  for (const auto& w : trained.warnings) log("warning: " + w);

  DistanceIndex index = stage("distances", [&] {
    Matrix h = forward(trained.model, dict.gamma);
    std::size_t m = c.candidates ? c.candidates : 50 * n;
    return pairwise_distances(h, m, c.threads);
  });

  RestructureResult result = stage("restructure", [&] {
    NodeMask mask = resolve_mask(g, c.mask);
    return greedy_restructure(index, g.labels(), mask, c.restructure_config());
  });
  for (const auto& w : result.warnings) log("warning: " + w);
  Graph restructured = g.with_edges(result.edges);

  json summary;
  stage("export", [&] {
    const std::string cfg = c.to_json();
    export_restructured(g, result, out_dir / "restructured.edges", cfg);
    save_model(out_dir / "model.bin", trained.model);
    write_loss_csv(out_dir / "loss.csv", trained.history);
    json before = reports(g, c.mask);
    json after = reports(restructured, c.mask);
    write_text(out_dir / "metrics_before.json", with_config(before, c).dump(2));
    write_text(out_dir / "metrics_after.json", with_config(after, c).dump(2));
    summary["command"] = "restructure";
    summary["nodes"] = n;
    summary["input_edges"] = g.num_edges();
    summary["output_edges"] = restructured.num_edges();
    summary["dictionary_columns"] = dict.cols();
    summary["best_epoch"] = trained.best_epoch;
    summary["epochs_run"] = trained.history.back().epoch;
    summary["stop_step"] = result.stop_step;
    summary["step_size"] = result.step;
    summary["exhausted"] = result.exhausted;
    summary["metric"] = metric_name(result.metric);
    summary["before"] = before;
    summary["after"] = after;
    std::vector<std::string> warnings = trained.warnings;
    warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
    summary["warnings"] = warnings;
    summary = with_config(summary, c);
    write_text(out_dir / "summary.json", summary.dump(2));
    return 0;
  });
  return summary.dump(2);
}

std::string cmd_metrics(const PipelineConfig& c) {
  stage("config", [&] { c.validate(); });
  Graph g = ingest(c, true);
  return stage("metrics", [&] {
    NodeMask mask = resolve_mask(g, c.mask);
    json j = json::parse(to_json(homophily_report(g, mask)));
    j["mask"] = mask_name(c.mask);
    return with_config(j, c).dump(2);
  });
}

std::string cmd_gen(const PipelineConfig& c) {
  stage("config", [&] { c.validate(); });
  Graph g = stage("generate", [&] {
    Graph out;
    if (c.generator == "er") {
      LabelScheme scheme;
      scheme.num_classes = c.classes;
      out = generate_er(c.n, c.edge_p, scheme, c.seed, c.self_loops);
    } else if (c.generator == "sbm") {
      out = generate_sbm(c.sizes, c.p_intra, c.p_inter, c.seed, c.self_loops);
    } else {
      out = generate_grid(c.width, c.height);
    }
    if (c.feature_dim > 0)
      out = with_class_features(out, c.feature_dim, c.feature_shift, detail::mix_seed(c.seed, 0xfea7));
    if (c.train_fraction + c.val_fraction > 0.0 && out.has_labels())
      out = with_random_splits(out, c.train_fraction, c.val_fraction, detail::mix_seed(c.seed, 0x5b17));
    return out;
  });
  return stage("export", [&] {
    const fs::path dir = c.out_dir;
    json j;
    j["command"] = "gen";
    j["generator"] = c.generator;
    j["nodes"] = g.num_nodes();
    j["edges"] = g.num_edges();
    j["self_loops"] = g.num_self_loops();
    save_edges(dir / "graph.edges", g.edges(), g.num_nodes());
    j["files"]["edges"] = (dir / "graph.edges").string();
    if (g.has_labels()) {
      save_labels(dir / "graph.labels", g);
      j["files"]["labels"] = (dir / "graph.labels").string();
    }
    if (g.has_splits()) {
      save_splits(dir / "graph.splits", g);
      j["files"]["splits"] = (dir / "graph.splits").string();
    }
    if (g.has_features()) {
      save_features(dir / "graph.features.csv", g);
      j["files"]["features"] = (dir / "graph.features.csv").string();
    }
    j = with_config(j, c);
    write_text(dir / "gen.json", j.dump(2));
    return j.dump(2);
  });
}

std::string cmd_oracle_compare(const PipelineConfig& c) {
  stage("config", [&] { c.validate(); });
  Graph g = c.edges.empty() ? stage("generate", [&] {
    LabelScheme scheme;
    scheme.num_classes = c.classes;
    if (c.generator == "sbm") return generate_sbm(c.sizes, c.p_intra, c.p_inter, c.seed, c.self_loops);
    if (c.generator == "grid") return generate_grid(c.width, c.height);
    return generate_er(c.n, c.edge_p, scheme, c.seed, c.self_loops);
  })
                            : ingest(c, false);
  return stage("oracle", [&] {
    const auto L = normalized_laplacian(g);
    EigenSystem es = eigendecompose(L, c.dense_cap);
    Matrix signal = sample_random_signals(g.num_nodes(), c.columns, detail::mix_seed(c.seed, 0x0c)).values;
    SlicerBank bank = c.bank();
    json bands = json::array();
    std::vector<double> worst(c.p_values.size(), 0.0);
    bool monotone = true;
    for (const auto& base : bank.slicers) {
      Matrix exact = exact_filter(es, [&](double l) { return slicer_response(base, l); }, signal);
      json band;
      band["center"] = base.a;
      json errors = json::object();
      double previous = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < c.p_values.size(); ++i) {
        SlicerParams prm = base;
        prm.p = c.p_values[i];
        Matrix approx = apply_slicer(L, prm, signal);
        double denom = exact.norm();
        double err = denom > 0 ? (approx - exact).norm() / denom : (approx - exact).norm();
        errors[std::to_string(prm.p)] = err;
        worst[i] = std::max(worst[i], err);
        if (!(err < previous)) monotone = false;
        previous = err;
      }
      band["relative_error"] = errors;
      bands.push_back(band);
    }
    json j;
    j["command"] = "oracle-compare";
    j["nodes"] = g.num_nodes();
    j["edges"] = g.num_edges();
    j["bands"] = bands;
    json max_error = json::object();
    for (std::size_t i = 0; i < c.p_values.size(); ++i) max_error[std::to_string(c.p_values[i])] = worst[i];
    j["max_relative_error"] = max_error;
    j["strictly_decreasing_in_p"] = monotone;
    j = with_config(j, c);
    write_text(fs::path(c.out_dir) / "oracle_compare.json", j.dump(2));
    return j.dump(2);
  });
}

std::string cmd_expressive(const PipelineConfig& c) {
  stage("config", [&] { c.validate(); });
  ImageSignal img = stage("ingest", [&] {
    return c.image.empty() ? synthetic_image(c.size, c.size, c.seed) : load_pgm(c.image);
  });
  return stage("expressive", [&] {
    Matrix pixels = img.values;
    Graph grid = generate_grid(img.width, img.height).with_features(pixels);
    Dictionary dict = [&] {
      Timer t("expressive dictionary");
      return build_dictionary(grid, c.bank(), signals_for(grid.num_nodes(), c.expressive_eta, c.seed), c.threads);
    }();
    ImageSignal target = make_target(img, FrequencyFilter{c.filter});
    RegressResult slicer = regress(grid, dict.gamma, target, c.regress);
    RegressResult base = baseline_regress(img, target, c.regress);

    const fs::path dir = c.out_dir;
    double lo = target.values.minCoeff(), hi = target.values.maxCoeff();
    auto display = [&](const Vector& v) {
      ImageSignal out{img.width, img.height, v};
      if (hi > lo) out.values = (v.array() - lo) / (hi - lo);
      return out;
    };
    const std::string stem = std::string("expressive_") + filter_name(c.filter);
    save_pgm(dir / (stem + "_target.pgm"), display(target.values));
    save_pgm(dir / (stem + "_prediction.pgm"), display(slicer.prediction));
    save_pgm(dir / (stem + "_baseline.pgm"), display(base.prediction));

    json j;
    j["command"] = "expressive";
    j["filter"] = filter_name(c.filter);
    j["width"] = img.width;
    j["height"] = img.height;
    j["dictionary_columns"] = dict.cols();
    j["slicer_sse"] = slicer.sse;
    j["baseline_sse"] = base.sse;
    j["ratio"] = base.sse > 0 ? slicer.sse / base.sse : 0.0;
    j["slicer_iterations"] = slicer.iterations;
    j["baseline_iterations"] = base.iterations;
    j = with_config(j, c);
    write_text(dir / (stem + ".json"), j.dump(2));
    return j.dump(2);
  });
}

std::string run_command(const std::string& command, const PipelineConfig& config) {
  if (command == "restructure") return cmd_restructure(config);
  if (command == "metrics") return cmd_metrics(config);
  if (command == "gen") return cmd_gen(config);
  if (command == "oracle-compare") return cmd_oracle_compare(config);
  if (command == "expressive") return cmd_expressive(config);
  throw StageError("config", Error(ErrorCode::config, "unknown command '" + command + "'"));
}

std::string run_command(const std::string& command, const std::string& config_text) {
  PipelineConfig base;
  if (command == "metrics") base.mask = MaskPolicy::all;
  PipelineConfig config = stage("config", [&] { return PipelineConfig::parse(config_text, base); });
  return run_command(command, config);
}

}  // namespace specslice
