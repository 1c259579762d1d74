#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specslice/graph.hpp"
#include "specslice/types.hpp"

namespace testsupport {

using specslice::Graph;
using specslice::Matrix;

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0);

// Triple loop product.
Matrix naive_multiply(const Matrix& a, const Matrix& b);

double relative_frobenius(const Matrix& approx, const Matrix& exact);

// Dense adjacency with self-loops on the diagonal as 1.
Eigen::MatrixXd dense_adjacency(const Graph& g);

// Laplacian built from the dense adjacency alone.
Eigen::MatrixXd dense_laplacian(const Graph& g);

// Random graph generator driven by a separate engine from the library's.
Graph random_graph(std::size_t n, double p, std::uint64_t seed, bool loops, int classes);

// Exact rational slicer applied through a dense eigendecomposition.
Matrix dense_slicer(const Eigen::MatrixXd& laplacian, double s, double a, int m, double eps_hat,
                    const Matrix& signal);

// Homophily from the dense adjacency by pair enumeration.
struct NaiveDensity {
  double h_hat = 0.0;
  double h_den = 0.0;
  std::vector<double> intra;
};
NaiveDensity naive_density(const Graph& g, const specslice::NodeMask& subset);
double naive_edge_homophily(const Graph& g, const specslice::NodeMask& subset);
double naive_node_homophily(const Graph& g, const specslice::NodeMask& subset);
double naive_norm_homophily(const Graph& g, const specslice::NodeMask& subset);

// WebKB-style dataset under SPECSLICE_DATA_DIR/<name>/: either <name>.edges
// in the library format or the raw out1_graph_edges.txt with its header row.
struct DatasetCounts {
  std::size_t num_nodes = 0;
  std::size_t distinct_lines = 0;
  std::size_t undirected_edges = 0;
};
std::optional<DatasetCounts> load_dataset(const std::string& name);

}  // namespace testsupport
