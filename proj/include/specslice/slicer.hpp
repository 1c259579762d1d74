#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "specslice/graph.hpp"
#include "specslice/sparse.hpp"
#include "specslice/types.hpp"

namespace specslice {

enum class SlicerKind { rational, quadratic };

// factored: (I + X^{2m})^{-1} split into m commuting SPD quadratics, each
// solved by conjugate gradients to relative tolerance 10^{-2p}.
// neumann: the truncated series prod_{j<p} (I + (I - T)^{2^j}).
enum class SlicerSolver { factored, neumann };

struct SlicerParams {
  SlicerKind kind = SlicerKind::rational;
  double s = 40.0;
  double a = 1.0;
  int m = 4;
  double eps_hat = 0.01;
  int p = 4;
  SlicerSolver solver = SlicerSolver::factored;
  // Quadratic kind only: Chebyshev expansion degree.
  int chebyshev_degree = 256;
};

// Exclusive lower bound on eps_hat: 2 s^{2m} / (s^{2m} - 1) - 2.
double min_eps_hat(double s, int m);

// Throws ErrorCode::config on any out-of-range field.
void validate(const SlicerParams& params);

double slicer_response(const SlicerParams& params, double lambda);

double solver_tolerance(int p);

struct SlicerStats {
  std::size_t matvecs = 0;
  std::size_t max_iterations = 0;
};

Matrix apply_slicer(const SparseSymmetricMatrix& L, const SlicerParams& params, const Matrix& M,
                    SlicerStats* stats = nullptr);

struct SlicerBank {
  std::vector<SlicerParams> slicers;

  // count slicers centred at (k + 0.5) * 2 / count.
  static SlicerBank uniform(std::size_t count, double s = 40.0, int m = 4, double eps_hat = 0.01,
                            SlicerKind kind = SlicerKind::rational, int p = 4);
  void validate() const;
  std::size_t size() const { return slicers.size(); }
};

SlicerBank default_bank();

struct RandomSignals {
  Matrix values;
  std::size_t eta = 0;
  std::uint64_t seed = 0;
};

// Entries i.i.d. N(0, 1/eta).
RandomSignals sample_random_signals(std::size_t n, std::size_t eta, std::uint64_t seed);

// ceil((4 + 2 beta) / (eps^2/2 - eps^3/3) * ln n)
std::size_t jl_min_samples(double n_nodes, double eps, double beta);

struct Dictionary {
  Matrix gamma;
  // [begin, end) column range per slicer, in bank order.
  std::vector<std::pair<std::size_t, std::size_t>> bands;

  std::size_t rows() const { return static_cast<std::size_t>(gamma.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(gamma.cols()); }
};

// threads = 0 picks the hardware concurrency.
Dictionary build_dictionary(const Graph& g, const SlicerBank& bank, const RandomSignals& r,
                            unsigned threads = 0);

void save_dictionary(const std::filesystem::path& path, const Dictionary& dict);
Dictionary load_dictionary(const std::filesystem::path& path);

}  // namespace specslice
