#include "specslice/slicer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "specslice/error.hpp"

namespace specslice {

double min_eps_hat(double s, int m) {
  // 2 s^{2m}/(s^{2m}-1) - 2 rewritten to avoid cancellation.
  return 2.0 / (std::pow(s, 2.0 * m) - 1.0);
}

void validate(const SlicerParams& params) {
  auto bad = [](const std::string& what) { fail(ErrorCode::config, "slicer: " + what); };
  if (!(params.s >= 2.0) || !std::isfinite(params.s)) bad("s must be >= 2");
  if (!(params.a >= 0.0 && params.a <= 2.0)) bad("center a must lie in [0, 2]");
  if (params.p < 1) bad("p must be positive");
  if (params.kind == SlicerKind::rational) {
    if (params.m < 1) bad("m must be positive");
    if (!(params.eps_hat > min_eps_hat(params.s, params.m)))
      bad("eps_hat " + std::to_string(params.eps_hat) + " not above convergence bound " +
          std::to_string(min_eps_hat(params.s, params.m)));
  } else if (params.chebyshev_degree < 2) {
    bad("chebyshev_degree must be >= 2");
  }
}

double slicer_response(const SlicerParams& params, double lambda) {
  if (params.kind == SlicerKind::quadratic) {
    double t = (lambda - params.a) * params.s / 2.0;
    return std::max(0.0, 1.0 - t * t);
  }
  double t = params.s * (lambda - params.a) / (2.0 + params.eps_hat);
  return 1.0 / (1.0 + std::pow(t * t, params.m));
}

double solver_tolerance(int p) { return std::pow(10.0, -2.0 * p); }

namespace {

// X = s (L - aI) / (2 + eps_hat)
struct ShiftedOperator {
  const SparseSymmetricMatrix& L;
  double shift;
  double scale;

  void apply(const Matrix& in, Matrix& out, SlicerStats& stats) const {
    L.multiply(in, out);
    out -= shift * in;
    out *= scale;
    stats.matvecs += static_cast<std::size_t>(in.cols());
  }
};

// Solves (X^2 - 2 c X + I) Y = B column-wise by conjugate gradients.
void solve_quadratic(const ShiftedOperator& x_op, double c, const Matrix& b, Matrix& y,
                     double tol, SlicerStats& stats) {
  const auto n = b.rows();
  const auto cols = b.cols();
  Matrix tmp(n, cols), xq(n, cols), ap(n, cols);
  auto apply_q = [&](const Matrix& v, Matrix& out) {
    x_op.apply(v, xq, stats);
    x_op.apply(xq, out, stats);
    out.noalias() -= 2.0 * c * xq;
    out += v;
  };

  y.setZero(n, cols);
  Matrix r = b;
  Matrix p = r;
  Eigen::ArrayXd rr = r.colwise().squaredNorm().transpose();
  Eigen::ArrayXd target = rr * tol * tol;
  std::vector<bool> done(cols);
  for (Eigen::Index j = 0; j < cols; ++j) done[j] = rr(j) <= target(j) || rr(j) == 0.0;

  const std::size_t max_iter = 50000;
  std::size_t it = 0;
  while (std::find(done.begin(), done.end(), false) != done.end()) {
    if (++it > max_iter) fail(ErrorCode::numeric, "slicer solve did not converge");
    apply_q(p, ap);
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (done[j]) continue;
      double pap = p.col(j).dot(ap.col(j));
      if (!(pap > 0.0)) fail(ErrorCode::numeric, "slicer solve lost positive definiteness");
      double alpha = rr(j) / pap;
      y.col(j) += alpha * p.col(j);
      r.col(j) -= alpha * ap.col(j);
      double rr_new = r.col(j).squaredNorm();
      if (rr_new <= target(j)) {
        done[j] = true;
      } else {
        p.col(j) = r.col(j) + (rr_new / rr(j)) * p.col(j);
      }
      rr(j) = rr_new;
    }
  }
  stats.max_iterations = std::max(stats.max_iterations, it);
}

Matrix apply_factored(const SparseSymmetricMatrix& L, const SlicerParams& prm, const Matrix& M,
                      SlicerStats& stats) {
  ShiftedOperator x_op{L, prm.a, prm.s / (2.0 + prm.eps_hat)};
  Matrix y = M;
  Matrix next;
  const double tol = solver_tolerance(prm.p);
  for (int k = 0; k < prm.m; ++k) {
    double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * prm.m);
    solve_quadratic(x_op, std::cos(theta), y, next, tol, stats);
    std::swap(y, next);
  }
  return y;
}

Matrix apply_neumann(const SparseSymmetricMatrix& L, const SlicerParams& prm, const Matrix& M,
                     SlicerStats& stats) {
  // B = (L - aI)/(2 + eps_hat); T = B^{2m} + I/s^{2m}; E = I - T.
  ShiftedOperator b_op{L, prm.a, 1.0 / (2.0 + prm.eps_hat)};
  const double inv_s2m = std::pow(prm.s, -2.0 * prm.m);
  Matrix chain, scratch;
  auto apply_e = [&](Matrix& w) {
    chain = w;
    for (int i = 0; i < 2 * prm.m; ++i) {
      b_op.apply(chain, scratch, stats);
      std::swap(chain, scratch);
    }
    w -= chain + inv_s2m * w;
  };
  Matrix z = M;
  Matrix w;
  for (int j = 0; j < prm.p; ++j) {
    w = z;
    for (long q = 0; q < (1L << j); ++q) apply_e(w);
    z += w;
  }
  return inv_s2m * z;
}

// Jackson-damped Chebyshev expansion of the response on [0, 2].
Matrix apply_chebyshev(const SparseSymmetricMatrix& L, const SlicerParams& prm, const Matrix& M,
                       SlicerStats& stats) {
  const int deg = prm.chebyshev_degree;
  const int nodes = 4 * (deg + 1);
  std::vector<double> coef(deg + 1, 0.0);
  for (int q = 0; q < nodes; ++q) {
    double theta = std::numbers::pi * (q + 0.5) / nodes;
    double f = slicer_response(prm, std::cos(theta) + 1.0);
    for (int k = 0; k <= deg; ++k) coef[k] += f * std::cos(k * theta);
  }
  const double alpha = std::numbers::pi / (deg + 2);
  for (int k = 0; k <= deg; ++k) {
    coef[k] *= (k == 0 ? 1.0 : 2.0) / nodes;
    double jackson = ((deg + 2 - k) * std::cos(k * alpha) +
                      std::sin(k * alpha) / std::tan(alpha)) / (deg + 2);
    coef[k] *= jackson;
  }
  // Shifted operator L - I maps the spectrum onto [-1, 1].
  ShiftedOperator t_op{L, 1.0, 1.0};
  Matrix t0 = M, t1, t2;
  t_op.apply(t0, t1, stats);
  Matrix out = coef[0] * t0 + coef[1] * t1;
  for (int k = 2; k <= deg; ++k) {
    t_op.apply(t1, t2, stats);
    t2 = 2.0 * t2 - t0;
    out += coef[k] * t2;
    std::swap(t0, t1);
    std::swap(t1, t2);
  }
  return out;
}

}  // namespace

Matrix apply_slicer(const SparseSymmetricMatrix& L, const SlicerParams& params, const Matrix& M,
                    SlicerStats* stats) {
  validate(params);
  if (static_cast<std::size_t>(M.rows()) != L.dim())
    fail(ErrorCode::data, "apply_slicer: signal rows " + std::to_string(M.rows()) +
                              " != graph size " + std::to_string(L.dim()));
  SlicerStats local;
  Matrix out;
  if (M.cols() == 0) {
    out = M;
  } else if (params.kind == SlicerKind::quadratic) {
    out = apply_chebyshev(L, params, M, local);
  } else if (params.solver == SlicerSolver::neumann) {
    out = apply_neumann(L, params, M, local);
  } else {
    out = apply_factored(L, params, M, local);
  }
  if (!out.allFinite()) fail(ErrorCode::numeric, "apply_slicer produced non-finite values");
  if (stats) *stats = local;
  return out;
}

SlicerBank SlicerBank::uniform(std::size_t count, double s, int m, double eps_hat,
                               SlicerKind kind, int p) {
  SlicerBank bank;
  const double width = 2.0 / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    SlicerParams prm;
    prm.kind = kind;
    prm.s = s;
    prm.m = m;
    prm.eps_hat = eps_hat;
    prm.p = p;
    prm.a = (static_cast<double>(k) + 0.5) * width;
    bank.slicers.push_back(prm);
  }
  return bank;
}

void SlicerBank::validate() const {
  if (slicers.empty()) fail(ErrorCode::config, "slicer bank is empty");
  for (std::size_t k = 0; k < slicers.size(); ++k) {
    specslice::validate(slicers[k]);
    if (k > 0 && !(slicers[k].a > slicers[k - 1].a))
      fail(ErrorCode::config, "slicer centers must be strictly increasing");
  }
}

SlicerBank default_bank() { return SlicerBank::uniform(20); }

RandomSignals sample_random_signals(std::size_t n, std::size_t eta, std::uint64_t seed) {
  if (eta < 1) fail(ErrorCode::config, "eta must be at least 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(eta)));
  RandomSignals r;
  r.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(eta));
  for (Eigen::Index i = 0; i < r.values.rows(); ++i)
    for (Eigen::Index j = 0; j < r.values.cols(); ++j) r.values(i, j) = normal(rng);
  r.eta = eta;
  r.seed = seed;
  return r;
}

std::size_t jl_min_samples(double n_nodes, double eps, double beta) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::config, "jl eps must lie in (0, 1)");
  if (!(beta > 0.0)) fail(ErrorCode::config, "jl beta must be positive");
  if (!(n_nodes >= 1.0)) fail(ErrorCode::config, "jl node count must be at least 1");
  double eta0 = (4.0 + 2.0 * beta) / (eps * eps / 2.0 - eps * eps * eps / 3.0) * std::log(n_nodes);
  return static_cast<std::size_t>(std::ceil(eta0 * (1.0 - 1e-12)));
}

}  // namespace specslice
