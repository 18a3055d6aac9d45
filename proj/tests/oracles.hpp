#pragma once

// Test-only reference computations. Nothing here calls the iterative solvers.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "locsense/grid.hpp"
#include "locsense/models.hpp"

namespace locsense::oracle {

/// Dense Neumann Laplacian assembled cell by cell from mirror ghost cells.
inline Eigen::MatrixXd dense_neumann_laplacian(const Grid& g) {
  const int n = g.n();
  const auto N = static_cast<Eigen::Index>(g.cell_count());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
  const double inv_h2 = 1.0 / (g.h() * g.h());
  auto idx = [&](int i, int j) { return static_cast<Eigen::Index>(j * n + i); };
  const int ny = g.dim() == 2 ? n : 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < n; ++i) {
      const auto k = idx(i, j);
      // Ghost neighbours mirror the cell itself, so their contribution vanishes.
      auto couple = [&](int ii, int jj) {
        if (ii < 0 || ii >= n || jj < 0 || jj >= ny) return;
        L(k, idx(ii, jj)) += inv_h2;
        L(k, k) -= inv_h2;
      };
      couple(i - 1, j);
      couple(i + 1, j);
      if (g.dim() == 2) {
        couple(i, j - 1);
        couple(i, j + 1);
      }
    }
  return L;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Eigen::MatrixXd to_eigen_dense(const std::vector<double>& rowmajor, std::size_t n) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rowmajor[i * n + j];
  return A;
}

/// Zero-mean solution of -L w = f - mean(f) via the bordered system
/// [ -L  1 ; 1^T 0 ] [w; lambda] = [f - mean f; 0].
inline Eigen::VectorXd dense_K(const Grid& g, const Eigen::VectorXd& f) {
  const Eigen::Index N = f.size();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N + 1, N + 1);
  B.topLeftCorner(N, N) = -dense_neumann_laplacian(g);
  B.block(0, N, N, 1).setOnes();
  B.block(N, 0, 1, N).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N + 1);
  rhs.head(N) = f.array() - f.mean();
  Eigen::VectorXd sol = B.partialPivLu().solve(rhs);
  return sol.head(N);
}

inline Eigen::VectorXd dense_lambda(const Grid& g, const Eigen::VectorXd& f, double nu) {
  const Eigen::Index N = f.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N) - nu * dense_neumann_laplacian(g);
  return A.partialPivLu().solve(f);
}

/// I - dt G for the exponentially fitted flux, assembled face by face with
/// the logarithmic-mean coefficient written out directly.
inline Eigen::MatrixXd dense_sg(const Grid& g, const Field& phi, double theta, double dt) {
  const auto N = static_cast<Eigen::Index>(g.cell_count());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N);
  const double s = dt / (g.h() * g.h());
  auto B = [](double x) { return x == 0.0 ? 1.0 : x / std::expm1(x); };
  auto face = [&](Eigen::Index i, Eigen::Index j) {
    const double d = phi[j] - phi[i];
    const double ai = std::exp(-theta * phi[i]), aj = std::exp(-theta * phi[j]);
    const double c = std::abs(ai - aj) < 1e-14 * ai ? ai : (ai - aj) / std::log(ai / aj);
    A(i, i) += s * c * B(-d);
    A(i, j) -= s * c * B(d);
    A(j, j) += s * c * B(d);
    A(j, i) -= s * c * B(-d);
  };
  const int n = g.n();
  for (int y = 0; y < (g.dim() == 2 ? n : 1); ++y)
    for (int x = 0; x < n; ++x) {
      const Eigen::Index k = y * n + x;
      if (x + 1 < n) face(k, k + 1);
      if (g.dim() == 2 && y + 1 < n) face(k, k + n);
    }
  return A;
}

inline double rel_l2(const std::vector<double>& a, const Eigen::VectorXd& b) {
  return (to_eigen(a) - b).norm() / std::max(b.norm(), 1e-300);
}

/// Observed convergence order from errors on successive halvings.
inline double observed_order(double coarse_err, double fine_err) { return std::log2(coarse_err / fine_err); }

inline Field random_field(const Grid& g, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  SplitMix64 rng(seed);
  Field f(g);
  for (double& x : f.values) x = lo + (hi - lo) * rng.uniform();
  return f;
}

}  // namespace locsense::oracle
