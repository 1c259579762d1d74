#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "specslice/embed.hpp"
#include "specslice/graph.hpp"
#include "specslice/types.hpp"

namespace specslice {

// Row-major pixels; node id = row * width + col.
struct ImageSignal {
  std::size_t width = 0;
  std::size_t height = 0;
  Vector values;

  std::size_t size() const { return width * height; }
};

enum class FilterKind { low, band, high };

struct FrequencyFilter {
  FilterKind kind = FilterKind::band;

  // phi1 = exp(-100 rho^2), phi2 = exp(-1000 (rho - 0.5)^2), phi3 = 1 - exp(-10 rho^2)
  double operator()(double rho) const;
};

FilterKind parse_filter(const std::string& name);
const char* filter_name(FilterKind kind);

// Scales each 2-D DFT coefficient by phi(rho1^2 + rho2^2) where
// rho_axis = |k| / (axis_length / 2).
ImageSignal make_target(const ImageSignal& img, const std::function<double(double)>& phi);
ImageSignal make_target(const ImageSignal& img, const FrequencyFilter& filter);

// Gaussian blobs plus oriented stripes, normalized to [0, 1].
ImageSignal synthetic_image(std::size_t width, std::size_t height, std::uint64_t seed = 0);

ImageSignal load_pgm(const std::filesystem::path& path);
// Values are clamped to [0, 1] and written as 8-bit binary PGM.
void save_pgm(const std::filesystem::path& path, const ImageSignal& img);

// [pixel, x, y] with x = col / width and y = row / height.
Matrix baseline_features(const ImageSignal& img);

struct RegressConfig {
  std::size_t max_iterations = 3000;
  std::size_t patience = 100;
  double learning_rate = 1e-2;
  OptimizerKind optimizer = OptimizerKind::adam;
  bool bias = true;
};

struct RegressResult {
  EmbeddingModel model;
  double sse = 0.0;
  std::vector<double> history;  // entry 0 is the initial model
  std::size_t iterations = 0;
  Vector prediction;
};

// Full-batch training of sum_i (H_i - Y_i)^2 from zero weights; returns the
// best iterate seen.
RegressResult regress(const Matrix& features, const Vector& target, const RegressConfig& config = {});
RegressResult regress(const Graph& grid, const Matrix& gamma, const ImageSignal& target,
                      const RegressConfig& config = {});
RegressResult baseline_regress(const ImageSignal& img, const ImageSignal& target,
                               const RegressConfig& config = {});

}  // namespace specslice
