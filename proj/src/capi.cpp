#include "specslice/specslice.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "specslice/config.hpp"
#include "specslice/generators.hpp"
#include "specslice/graph_io.hpp"
#include "specslice/homophily.hpp"
#include "specslice/pipeline.hpp"
#include "specslice/slicer.hpp"

struct ss_graph {
  specslice::Graph graph;
};

struct ss_dictionary {
  specslice::Dictionary dict;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_stage;

ss_status to_status(specslice::ErrorCode code) {
  switch (code) {
    case specslice::ErrorCode::config: return SS_ERR_CONFIG;
    case specslice::ErrorCode::data: return SS_ERR_DATA;
    case specslice::ErrorCode::numeric: return SS_ERR_NUMERIC;
    case specslice::ErrorCode::undefined: return SS_ERR_UNDEFINED;
    case specslice::ErrorCode::internal: break;
  }
  return SS_ERR_INTERNAL;
}

template <typename Fn>
ss_status guarded(Fn&& fn) {
  g_error.clear();
  g_stage.clear();
  try {
    fn();
    return SS_OK;
  } catch (const specslice::StageError& e) {
    g_error = e.what();
    g_stage = e.stage();
    return to_status(e.code());
  } catch (const specslice::Error& e) {
    g_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
  } catch (const std::exception& e) {
    g_error = e.what();
  } catch (...) {
    g_error = "unknown error";
  }
  return SS_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) specslice::fail(specslice::ErrorCode::config, std::string(what) + " must not be NULL");
}

specslice::NodeMask mask_for(const specslice::Graph& g, const char* mask) {
  return specslice::resolve_mask(g, specslice::parse_mask(mask ? mask : "all"));
}

}  // namespace

extern "C" {

const char* ss_last_error(void) { return g_error.c_str(); }
const char* ss_last_stage(void) { return g_stage.c_str(); }

int ss_exit_code(ss_status status) {
  switch (status) {
    case SS_OK: return 0;
    case SS_ERR_CONFIG: return 1;
    case SS_ERR_DATA:
    case SS_ERR_UNDEFINED: return 2;
    case SS_ERR_NUMERIC:
    case SS_ERR_INTERNAL: return 3;
  }
  return 3;
}

const char* ss_version(void) { return "0.1.0"; }

void ss_string_free(char* s) { std::free(s); }

const char* ss_config_keys(void) {
  static const std::string text = [] {
    std::string out;
    for (const auto& k : specslice::config_keys()) out += std::string(k.key) + '\t' + k.help + '\n';
    return out;
  }();
  return text.c_str();
}

ss_status ss_run(const char* command, const char* config_text, char** json_out) {
  return guarded([&] {
    require(command, "command");
    require(json_out, "json_out");
    *json_out = nullptr;
    *json_out = dup_string(specslice::run_command(command, config_text ? config_text : ""));
  });
}

ss_status ss_graph_load(const char* edge_path, const char* feature_path, const char* label_path,
                        const char* split_path, ss_graph** out) {
  return guarded([&] {
    require(edge_path, "edge_path");
    require(out, "out");
    specslice::LoadOptions opt;
    opt.edge_path = edge_path;
    if (feature_path) opt.feature_path = feature_path;
    if (label_path) opt.label_path = label_path;
    if (split_path) opt.split_path = split_path;
    *out = new ss_graph{specslice::load_graph(opt)};
  });
}

ss_status ss_graph_generate_er(size_t n, double p, int num_classes, uint64_t seed, int self_loops,
                               ss_graph** out) {
  return guarded([&] {
    require(out, "out");
    specslice::LabelScheme scheme;
    scheme.num_classes = num_classes;
    *out = new ss_graph{specslice::generate_er(n, p, scheme, seed, self_loops != 0)};
  });
}

ss_status ss_graph_generate_sbm(const size_t* sizes, size_t num_classes, double p_intra, double p_inter,
                                uint64_t seed, ss_graph** out) {
  return guarded([&] {
    require(sizes, "sizes");
    require(out, "out");
    std::vector<std::size_t> s(sizes, sizes + num_classes);
    *out = new ss_graph{specslice::generate_sbm(s, p_intra, p_inter, seed)};
  });
}

ss_status ss_graph_generate_grid(size_t width, size_t height, ss_graph** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ss_graph{specslice::generate_grid(width, height)};
  });
}

void ss_graph_free(ss_graph* g) { delete g; }

size_t ss_graph_num_nodes(const ss_graph* g) { return g ? g->graph.num_nodes() : 0; }

size_t ss_graph_num_edges(const ss_graph* g) { return g ? g->graph.num_edges() : 0; }

ss_status ss_graph_save_edges(const ss_graph* g, const char* path) {
  return guarded([&] {
    require(g, "graph");
    require(path, "path");
    specslice::save_edges(path, g->graph.edges(), g->graph.num_nodes());
  });
}

ss_status ss_graph_metric(const ss_graph* g, const char* metric, const char* mask, double* out) {
  return guarded([&] {
    require(g, "graph");
    require(metric, "metric");
    require(out, "out");
    *out = specslice::metric_value(specslice::parse_metric(metric), g->graph, mask_for(g->graph, mask));
  });
}

ss_status ss_graph_report(const ss_graph* g, const char* mask, char** json_out) {
  return guarded([&] {
    require(g, "graph");
    require(json_out, "json_out");
    *json_out = nullptr;
    *json_out = dup_string(specslice::to_json(specslice::homophily_report(g->graph, mask_for(g->graph, mask))));
  });
}

double ss_slicer_response(double s, double a, int m, double eps_hat, double lambda) {
  specslice::SlicerParams prm;
  prm.s = s;
  prm.a = a;
  prm.m = m;
  prm.eps_hat = eps_hat;
  return specslice::slicer_response(prm, lambda);
}

double ss_min_eps_hat(double s, int m) { return specslice::min_eps_hat(s, m); }

size_t ss_jl_min_samples(double n_nodes, double eps, double beta) {
  size_t out = 0;
  guarded([&] { out = specslice::jl_min_samples(n_nodes, eps, beta); });
  return out;
}

ss_status ss_dictionary_build(const ss_graph* g, size_t eta, uint64_t seed, const char* bank_config,
                              ss_dictionary** out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    auto cfg = specslice::PipelineConfig::parse(bank_config ? bank_config : "");
    auto bank = cfg.bank();
    bank.validate();
    specslice::RandomSignals r;
    if (eta > 0) {
      r = specslice::sample_random_signals(g->graph.num_nodes(), eta, seed);
    } else {
      r.values.resize(static_cast<Eigen::Index>(g->graph.num_nodes()), 0);
    }
    *out = new ss_dictionary{specslice::build_dictionary(g->graph, bank, r, cfg.threads)};
  });
}

ss_status ss_dictionary_load(const char* path, ss_dictionary** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ss_dictionary{specslice::load_dictionary(path)};
  });
}

ss_status ss_dictionary_save(const ss_dictionary* d, const char* path) {
  return guarded([&] {
    require(d, "dictionary");
    require(path, "path");
    specslice::save_dictionary(path, d->dict);
  });
}

void ss_dictionary_free(ss_dictionary* d) { delete d; }

size_t ss_dictionary_rows(const ss_dictionary* d) { return d ? d->dict.rows() : 0; }

size_t ss_dictionary_cols(const ss_dictionary* d) { return d ? d->dict.cols() : 0; }

ss_status ss_dictionary_copy(const ss_dictionary* d, double* buffer, size_t capacity) {
  return guarded([&] {
    require(d, "dictionary");
    require(buffer, "buffer");
    const auto count = static_cast<size_t>(d->dict.gamma.size());
    if (capacity < count)
      specslice::fail(specslice::ErrorCode::config, "buffer holds " + std::to_string(capacity) +
                                                        " doubles, need " + std::to_string(count));
    std::memcpy(buffer, d->dict.gamma.data(), count * sizeof(double));
  });
}

}  // extern "C"
