#include "specslice/eigen_oracle.hpp"

#include <cmath>
#include <limits>

#include "random.hpp"
#include "specslice/error.hpp"

namespace specslice {

EigenSystem eigendecompose(const SparseSymmetricMatrix& L, std::size_t cap) {
  if (L.dim() > cap)
    fail(ErrorCode::config, "dense eigendecomposition capped at " + std::to_string(cap) +
                                " nodes, got " + std::to_string(L.dim()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L.to_dense());
  if (solver.info() != Eigen::Success) fail(ErrorCode::numeric, "eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix exact_filter(const EigenSystem& es, const std::function<double(double)>& response,
                    const Matrix& M) {
  if (M.rows() != es.vectors.rows()) fail(ErrorCode::data, "exact_filter: row mismatch");
  Eigen::VectorXd g(es.values.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = response(es.values(i));
  Eigen::MatrixXd coeffs = es.vectors.transpose() * M;
  coeffs = g.asDiagonal() * coeffs;
  return es.vectors * coeffs;
}

bool in_band(double lambda, double e1, double e2) {
  constexpr double snap = 1e-10;
  if (std::abs(lambda - e1) <= snap) lambda = e1;
  if (std::abs(lambda - e2) <= snap) lambda = e2;
  if (e1 == 0.0 && lambda <= 0.0) return e2 >= 0.0;
  return lambda > e1 && lambda <= e2;
}

Matrix exact_bandpass(const EigenSystem& es, double e1, double e2, const Matrix& M) {
  if (!(0.0 <= e1 && e1 <= e2 && e2 <= 2.0)) fail(ErrorCode::config, "band must satisfy 0 <= e1 <= e2 <= 2");
  return exact_filter(es, [&](double l) { return in_band(l, e1, e2) ? 1.0 : 0.0; }, M);
}

Matrix sc_features(const EigenSystem& es, double lambda_L) {
  if (!(0.0 <= lambda_L && lambda_L <= 2.0)) fail(ErrorCode::config, "lambda_L must lie in [0, 2]");
  const auto n = es.vectors.rows();
  Matrix f(n, es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    double g = in_band(es.values(k), 0.0, lambda_L) ? 1.0 : 0.0;
    f.col(k) = g * es.vectors.col(k);
  }
  return f;
}

namespace {

double squared_distance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

KMeansResult kmeans_once(const Matrix& x, int k, Rng& rng, int max_iterations) {
  const auto n = x.rows();
  Matrix centers(k, x.cols());
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  auto first = static_cast<Eigen::Index>(detail::uniform_index(rng, n));
  centers.row(0) = x.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(x, i, centers, c - 1));
      total += nearest[i];
    }
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      double target = detail::uniform01(rng) * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += nearest[i];
        if (acc > target && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(detail::uniform_index(rng, n));
    }
    centers.row(c) = x.row(pick);
  }

  std::vector<int> assign(n, -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(x, i, centers, 0);
      for (int c = 1; c < k; ++c) {
        double d = squared_distance(x, i, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(k, x.cols());
    std::vector<std::size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[i]) += x.row(i);
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
  }

  double inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) inertia += squared_distance(x, i, centers, assign[i]);
  return {std::move(assign), std::move(centers), inertia};
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts,
                    int max_iterations) {
  if (k < 1 || k > points.rows()) fail(ErrorCode::config, "kmeans: need 1 <= K <= N");
  Rng rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    auto result = kmeans_once(points, k, rng, max_iterations);
    if (result.inertia < best.inertia) best = std::move(result);
  }
  return best;
}

std::vector<int> simplified_sc(const Graph& g, std::size_t l_count, int k, std::uint64_t seed,
                               std::size_t cap) {
  if (l_count < 2 || l_count > g.num_nodes()) fail(ErrorCode::config, "simplified_sc: need 1 < L <= N");
  auto es = eigendecompose(normalized_laplacian(g), cap);
  Matrix f = es.vectors.leftCols(static_cast<Eigen::Index>(l_count));
  return kmeans(f, k, seed).assignment;
}

}  // namespace specslice
