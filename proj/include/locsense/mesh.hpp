#pragma once

#include <limits>

#include "locsense/grid.hpp"
#include "locsense/linsolve.hpp"

namespace locsense {

/// Default relative tolerance for the inverse operators K and Lambda_nu.
inline constexpr double kOperatorTol = 1e-11;

/// Discrete Neumann Laplacian (3-point / 5-point stencil over h^2, zero boundary flux).
SparseOperator neumann_laplacian_matrix(const Grid& g);

/// I - nu * Laplacian, the M-matrix behind Lambda_nu.
SparseOperator helmholtz_matrix(const Grid& g, double nu);

Field laplacian_neumann(const Field& f);

struct PoissonSolution {
  Field w;
  /// Set when the input violated the zero-mean precondition and its mean was removed.
  bool mean_subtracted = false;
  SolveReport report;
};

/// Zero-mean solution of -Lap_h w = f - mean(f).
PoissonSolution solve_neumann_poisson(const Field& f, double tol = kOperatorTol);

/// K = (-Lap)^{-1} on zero-mean fields. Throws SolveFailure on non-convergence.
Field apply_K(const Field& f, double tol = kOperatorTol);

/// Lambda_nu = (I - nu Lap)^{-1}. Mean preserving, positivity preserving, self-adjoint.
Field apply_lambda_nu(const Field& f, double nu, double tol = kOperatorTol);

/// L_nu = Lambda_nu^dim.
Field apply_L_nu(const Field& f, double nu, double tol = kOperatorTol);

/// Discrete Dirichlet energy: sum over interior faces of (jump / h)^2 * h^dim.
double grad_sq_norm(const Field& f);

/// Discrete gradient pairing <grad_h f, grad_h g>; grad_sq_norm(f) == grad_inner(f, f).
double grad_inner(const Field& f, const Field& g);

double integral(const Field& f);
double mean(const Field& f);
/// h^dim * sum f g
double inner(const Field& f, const Field& g);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Midpoint-quadrature L^p norm; p = kInfinity gives max |f|.
double lp_norm(const Field& f, double p);

/// Visits each interior face once as (left cell, right cell).
template <class Fn>
void for_each_face(const Grid& g, Fn&& fn) {
  const std::size_t n = static_cast<std::size_t>(g.n());
  if (g.dim() == 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) fn(i, i + 1);
    return;
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = j * n + i;
      if (i + 1 < n) fn(k, k + 1);
      if (j + 1 < n) fn(k, k + n);
    }
}

}  // namespace locsense
