#include "locsense/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace locsense {

SparseOperator neumann_laplacian_matrix(const Grid& g) {
  const double inv_h2 = 1.0 / (g.h() * g.h());
  SparseOperator::Builder b(g.cell_count());
  for (std::size_t k = 0; k < g.cell_count(); ++k) b.add(k, k, 0.0);
  for_each_face(g, [&](std::size_t i, std::size_t j) {
    b.add(i, i, -inv_h2);
    b.add(j, j, -inv_h2);
    b.add(i, j, inv_h2);
    b.add(j, i, inv_h2);
  });
  return b.build(true);
}

namespace {

// -Lap_h + shift * I scaled by `scale`: scale * (shift I - Lap_h).
SparseOperator shifted_stiffness(const Grid& g, double diag_shift, double scale) {
  const double w = scale / (g.h() * g.h());
  SparseOperator::Builder b(g.cell_count());
  for (std::size_t k = 0; k < g.cell_count(); ++k) b.add(k, k, diag_shift);
  for_each_face(g, [&](std::size_t i, std::size_t j) {
    b.add(i, i, w);
    b.add(j, j, w);
    b.add(i, j, -w);
    b.add(j, i, -w);
  });
  return b.build(true);
}

}  // namespace

SparseOperator helmholtz_matrix(const Grid& g, double nu) { return shifted_stiffness(g, 1.0, nu); }

Field laplacian_neumann(const Field& f) {
  const Grid& g = f.grid;
  if (f.size() != g.cell_count()) throw std::invalid_argument("laplacian_neumann: field does not match its grid");
  const double inv_h2 = 1.0 / (g.h() * g.h());
  Field out(g, 0.0);
  for_each_face(g, [&](std::size_t i, std::size_t j) {
    const double flux = (f[j] - f[i]) * inv_h2;
    out[i] += flux;
    out[j] -= flux;
  });
  return out;
}

PoissonSolution solve_neumann_poisson(const Field& f, double tol) {
  const Grid& g = f.grid;
  PoissonSolution sol;
  const double tol_mean = 1e-10 * lp_norm(f, 1.0);
  const double m = integral(f);
  sol.mean_subtracted = std::abs(m) > tol_mean;
  const SparseOperator a = shifted_stiffness(g, 0.0, 1.0);
  SolveOptions opts;
  opts.tol = tol;
  opts.zero_mean = true;
  auto res = solve_spd(a, f.values, opts);
  sol.w = Field(g, std::move(res.x));
  sol.report = res.report;
  return sol;
}

Field apply_K(const Field& f, double tol) {
  auto sol = solve_neumann_poisson(f, tol);
  if (!sol.report.converged) throw SolveFailure("apply_K: Neumann Poisson solve did not converge", sol.report);
  return std::move(sol.w);
}

Field apply_lambda_nu(const Field& f, double nu, double tol) {
  if (!(nu > 0.0)) throw std::invalid_argument("apply_lambda_nu: nu must be positive");
  const SparseOperator a = helmholtz_matrix(f.grid, nu);
  SolveOptions opts;
  opts.tol = tol;
  auto res = solve_spd(a, f.values, opts, f.values);
  if (!res.report.converged) throw SolveFailure("apply_lambda_nu: solve did not converge", res.report);
  return Field(f.grid, std::move(res.x));
}

Field apply_L_nu(const Field& f, double nu, double tol) {
  Field out = apply_lambda_nu(f, nu, tol);
  for (int k = 1; k < f.grid.dim(); ++k) out = apply_lambda_nu(out, nu, tol);
  return out;
}

double grad_inner(const Field& f, const Field& g) {
  require_same_grid(f, g, "grad_inner");
  const Grid& grid = f.grid;
  const double w = grid.cell_volume() / (grid.h() * grid.h());
  double acc = 0.0;
  for_each_face(grid, [&](std::size_t i, std::size_t j) { acc += (f[j] - f[i]) * (g[j] - g[i]); });
  return acc * w;
}

double grad_sq_norm(const Field& f) { return grad_inner(f, f); }

double integral(const Field& f) {
  double acc = 0.0;
  for (double x : f.values) acc += x;
  return acc * f.grid.cell_volume();
}

double mean(const Field& f) { return integral(f); }

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g, "inner");
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * g[k];
  return acc * f.grid.cell_volume();
}

double lp_norm(const Field& f, double p) {
  if (std::isinf(p)) {
    double mx = 0.0;
    for (double x : f.values) mx = std::max(mx, std::abs(x));
    return mx;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  double acc = 0.0;
  if (p == 1.0) {
    for (double x : f.values) acc += std::abs(x);
    return acc * f.grid.cell_volume();
  }
  if (p == 2.0) {
    for (double x : f.values) acc += x * x;
    return std::sqrt(acc * f.grid.cell_volume());
  }
  for (double x : f.values) acc += std::pow(std::abs(x), p);
  return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

}  // namespace locsense
