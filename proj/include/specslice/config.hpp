#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specslice/embed.hpp"
#include "specslice/expressive.hpp"
#include "specslice/homophily.hpp"
#include "specslice/restructure.hpp"
#include "specslice/slicer.hpp"

namespace specslice {

enum class MaskPolicy { all, train, val, test, train_val };

MaskPolicy parse_mask(const std::string& name);
const char* mask_name(MaskPolicy policy);
NodeMask resolve_mask(const Graph& g, MaskPolicy policy);

// Every tunable of the CLI workflow. Text form is one key=value per line,
// '#' starts a comment; later assignments win.
struct PipelineConfig {
  // ingest
  std::string edges;
  std::string features;
  std::string labels;
  std::string splits;
  bool feature_header = false;
  std::size_t num_nodes = 0;  // 0 infers
  std::string id_map;

  // slicer bank
  std::size_t bank_count = 20;
  double s = 40.0;
  int m = 4;
  double eps_hat = 0.01;
  SlicerKind kind = SlicerKind::rational;
  int p = 4;
  SlicerSolver solver = SlicerSolver::factored;
  std::size_t eta = 64;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  TrainConfig train;

  // restructure
  Metric metric = Metric::density;
  std::size_t step = 0;
  std::size_t candidates = 0;  // 0 means 50 N
  MaskPolicy mask = MaskPolicy::train_val;
  bool keep_final_batch = false;

  // output
  std::string out_dir = "out";
  std::string cache_dir;  // empty means <out_dir>/cache
  bool use_cache = true;

  // gen
  std::string generator = "er";
  std::size_t n = 100;
  double edge_p = 0.1;
  std::vector<std::size_t> sizes = {50, 50};
  double p_intra = 0.02;
  double p_inter = 0.1;
  std::size_t width = 32;
  std::size_t height = 32;
  int classes = 2;
  bool self_loops = true;
  std::size_t feature_dim = 0;
  double feature_shift = 1.0;
  double train_fraction = 0.0;
  double val_fraction = 0.0;

  // oracle-compare
  std::size_t columns = 4;
  std::vector<int> p_values = {2, 3, 4};
  std::size_t dense_cap = 2000;

  // expressive
  std::string image;
  FilterKind filter = FilterKind::band;
  std::size_t size = 32;
  std::size_t expressive_eta = 0;
  RegressConfig regress;

  static PipelineConfig parse(const std::string& text);
  static PipelineConfig parse(const std::string& text, PipelineConfig base);
  void set(const std::string& key, const std::string& value);
  // Throws ErrorCode::config listing every violation.
  void validate() const;
  std::string to_json() const;
  SlicerBank bank() const;
  RestructureConfig restructure_config() const;
};

struct ConfigKey {
  const char* key;
  const char* help;
};

const std::vector<ConfigKey>& config_keys();

}  // namespace specslice
