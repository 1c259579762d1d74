#include "specslice/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "specslice/error.hpp"

namespace specslice {

SparseSymmetricMatrix::SparseSymmetricMatrix(std::size_t dim, std::vector<std::size_t> row_ptr,
                                             std::vector<NodeId> cols, std::vector<double> vals)
    : dim_(dim), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
  if (row_ptr_.size() != dim_ + 1 || cols_.size() != vals_.size() ||
      row_ptr_.back() != vals_.size())
    fail(ErrorCode::internal, "malformed CSR layout");
  for (std::size_t i = 0; i < dim_; ++i) {
    auto c = row_cols(i);
    auto v = row_vals(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k] >= dim_) fail(ErrorCode::internal, "CSR column out of range");
      if (k > 0 && c[k] <= c[k - 1]) fail(ErrorCode::internal, "CSR columns not strictly sorted");
      if (coeff(c[k], i) != v[k]) fail(ErrorCode::internal, "CSR matrix is not symmetric");
    }
  }
}

std::span<const NodeId> SparseSymmetricMatrix::row_cols(std::size_t i) const {
  return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::span<const double> SparseSymmetricMatrix::row_vals(std::size_t i) const {
  return {vals_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

double SparseSymmetricMatrix::coeff(std::size_t i, std::size_t j) const {
  auto c = row_cols(i);
  auto it = std::lower_bound(c.begin(), c.end(), static_cast<NodeId>(j));
  if (it == c.end() || *it != j) return 0.0;
  return vals_[row_ptr_[i] + static_cast<std::size_t>(it - c.begin())];
}

void SparseSymmetricMatrix::multiply(const Matrix& x, Matrix& y) const {
  if (static_cast<std::size_t>(x.rows()) != dim_)
    fail(ErrorCode::internal, "matvec dimension mismatch");
  y.resize(x.rows(), x.cols());
  for (std::size_t i = 0; i < dim_; ++i) {
    auto row = y.row(static_cast<Eigen::Index>(i));
    row.setZero();
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      row.noalias() += vals_[k] * x.row(cols_[k]);
  }
}

Matrix SparseSymmetricMatrix::operator*(const Matrix& x) const {
  Matrix y;
  multiply(x, y);
  return y;
}

Vector SparseSymmetricMatrix::operator*(const Vector& x) const {
  Matrix in = x;
  Matrix out;
  multiply(in, out);
  return out.col(0);
}

Eigen::MatrixXd SparseSymmetricMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, cols_[k]) = vals_[k];
  return d;
}

SparseSymmetricMatrix normalized_laplacian(const Graph& g) {
  const std::size_t n = g.num_nodes();
  const auto deg = g.degrees();
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (deg[i] > 0) inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);

  std::vector<std::size_t> offsets;
  std::vector<NodeId> targets;
  g.adjacency(offsets, targets);

  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> vals;
  cols.reserve(targets.size() + n);
  vals.reserve(targets.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<NodeId> nbrs(targets.begin() + offsets[i], targets.begin() + offsets[i + 1]);
    nbrs.push_back(static_cast<NodeId>(i));
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    bool has_loop = std::find(targets.begin() + offsets[i], targets.begin() + offsets[i + 1],
                              static_cast<NodeId>(i)) != targets.begin() + offsets[i + 1];
    for (NodeId j : nbrs) {
      double a = (j == i) ? (has_loop ? 1.0 : 0.0) : 1.0;
      double value = (j == i ? 1.0 : 0.0) - a * inv_sqrt[i] * inv_sqrt[j];
      cols.push_back(j);
      vals.push_back(value);
    }
    row_ptr[i + 1] = cols.size();
  }
  return SparseSymmetricMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

}  // namespace specslice
