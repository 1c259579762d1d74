#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace specslice {

using NodeId = std::uint32_t;
using Rng = std::mt19937_64;

// Node-major dense storage; rows are nodes throughout the library.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using NodeMask = std::vector<bool>;

inline NodeMask mask_all(std::size_t n) { return NodeMask(n, true); }

}  // namespace specslice
