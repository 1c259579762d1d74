#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "specslice/graph.hpp"
#include "specslice/sparse.hpp"
#include "specslice/types.hpp"

namespace specslice {

inline constexpr std::size_t kDefaultDenseCap = 2000;

struct EigenSystem {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

EigenSystem eigendecompose(const SparseSymmetricMatrix& L, std::size_t cap = kDefaultDenseCap);

// U diag(response(lambda)) U^T M
Matrix exact_filter(const EigenSystem& es, const std::function<double(double)>& response,
                    const Matrix& M);

// Band membership: lambda in (e1, e2], plus lambda = 0 when e1 = 0. Values
// within 1e-10 of a boundary are snapped onto it.
bool in_band(double lambda, double e1, double e2);

Matrix exact_bandpass(const EigenSystem& es, double e1, double e2, const Matrix& M);

// Row i is g(Lambda) U^T delta_i for the low-pass band [0, lambda_L].
Matrix sc_features(const EigenSystem& es, double lambda_L);

struct KMeansResult {
  std::vector<int> assignment;
  Matrix centers;
  double inertia = 0.0;
};

// k-means++ seeding, Lloyd iterations; best inertia over restarts.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 10,
                    int max_iterations = 100);

// Leading eigenvectors as node coordinates, clustered with kmeans.
std::vector<int> simplified_sc(const Graph& g, std::size_t l_count, int k, std::uint64_t seed = 0,
                               std::size_t cap = kDefaultDenseCap);

}  // namespace specslice
