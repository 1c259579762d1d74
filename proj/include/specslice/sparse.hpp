#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "specslice/graph.hpp"
#include "specslice/types.hpp"

namespace specslice {

// Symmetric matrix in CSR layout with both triangles stored.
class SparseSymmetricMatrix {
 public:
  SparseSymmetricMatrix() = default;
  SparseSymmetricMatrix(std::size_t dim, std::vector<std::size_t> row_ptr,
                        std::vector<NodeId> cols, std::vector<double> vals);

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return vals_.size(); }
  std::span<const NodeId> row_cols(std::size_t i) const;
  std::span<const double> row_vals(std::size_t i) const;
  double coeff(std::size_t i, std::size_t j) const;

  // y = A x; x and y must not alias.
  void multiply(const Matrix& x, Matrix& y) const;
  Matrix operator*(const Matrix& x) const;
  Vector operator*(const Vector& x) const;

  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<NodeId> cols_;
  std::vector<double> vals_;
};

// L = I - D^{-1/2} A D^{-1/2}; isolated nodes keep an identity row.
SparseSymmetricMatrix normalized_laplacian(const Graph& g);

}  // namespace specslice
