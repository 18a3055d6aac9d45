#include "locsense/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace locsense {

SparseOperator::Builder::Builder(std::size_t size) : size_(size), rows_(size) {}

void SparseOperator::Builder::add(std::size_t row, std::size_t col, double value) {
  if (row >= size_ || col >= size_) throw std::out_of_range("SparseOperator::Builder::add: index out of range");
  auto& r = rows_[row];
  for (auto& e : r) {
    if (e.col == col) {
      e.value += value;
      return;
    }
  }
  r.push_back({col, value});
}

SparseOperator SparseOperator::Builder::build(bool symmetric) {
  SparseOperator op;
  op.symmetric_ = symmetric;
  op.row_start_.reserve(size_ + 1);
  op.row_start_.push_back(0);
  std::vector<double> col_offdiag(size_, 0.0);
  std::vector<double> diag(size_, 0.0);
  bool nonpositive_off = true;
  for (std::size_t i = 0; i < size_; ++i) {
    auto& r = rows_[i];
    std::sort(r.begin(), r.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    for (const auto& e : r) {
      op.cols_.push_back(e.col);
      op.vals_.push_back(e.value);
      if (e.col == i) {
        diag[i] = e.value;
      } else {
        if (e.value > 0.0) nonpositive_off = false;
        col_offdiag[e.col] += std::abs(e.value);
      }
    }
    op.row_start_.push_back(op.cols_.size());
  }
  bool row_dominant = true;
  bool col_dominant = true;
  for (std::size_t i = 0; i < size_; ++i) {
    double row_off = 0.0;
    for (std::size_t k = op.row_start_[i]; k < op.row_start_[i + 1]; ++k)
      if (op.cols_[k] != i) row_off += std::abs(op.vals_[k]);
    const double slack = 1e-12 * std::max(1.0, std::abs(diag[i]));
    if (!(diag[i] > 0.0)) row_dominant = col_dominant = false;
    if (diag[i] + slack < row_off) row_dominant = false;
    if (diag[i] + slack < col_offdiag[i]) col_dominant = false;
  }
  op.m_matrix_ = nonpositive_off && (row_dominant || col_dominant);
  rows_.clear();
  return op;
}

void SparseOperator::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) acc += vals_[k] * x[cols_[k]];
    y[i] = acc;
  }
}

std::vector<double> SparseOperator::multiply(std::span<const double> x) const {
  std::vector<double> y(size());
  multiply(x, y);
  return y;
}

std::vector<double> SparseOperator::diagonal() const {
  std::vector<double> d(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) d[i] = at(i, i);
  return d;
}

double SparseOperator::at(std::size_t row, std::size_t col) const {
  for (std::size_t k = row_start_[row]; k < row_start_[row + 1]; ++k)
    if (cols_[k] == col) return vals_[k];
  return 0.0;
}

std::vector<double> SparseOperator::to_dense() const {
  const std::size_t n = size();
  std::vector<double> dense(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) dense[i * n + cols_[k]] = vals_[k];
  return dense;
}

std::span<const std::size_t> SparseOperator::row_columns(std::size_t row) const {
  return std::span<const std::size_t>(cols_).subspan(row_start_[row], row_start_[row + 1] - row_start_[row]);
}

std::span<const double> SparseOperator::row_values(std::size_t row) const {
  return std::span<const double>(vals_).subspan(row_start_[row], row_start_[row + 1] - row_start_[row]);
}

bool SparseOperator::is_numerically_symmetric(double tol) const {
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      const double a = vals_[k];
      const double b = at(cols_[k], i);
      if (std::abs(a - b) > tol * std::max({1.0, std::abs(a), std::abs(b)})) return false;
    }
  }
  return true;
}

SolveFailure::SolveFailure(const std::string& what, SolveReport report)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << what << " (iterations=" << report.iterations << ", residual=" << report.residual_norm << ")";
        return os.str();
      }()),
      report_(report) {}

namespace {

// True-residual restarts allowed once the recursive residual claims
// convergence; more than this means round-off stagnation.
constexpr int kMaxRestarts = 8;

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void project_zero_mean(std::vector<double>& v) {
  if (v.empty()) return;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

std::vector<double> inverse_diagonal(const SparseOperator& a) {
  auto d = a.diagonal();
  for (double& x : d) x = (x != 0.0) ? 1.0 / x : 1.0;
  return d;
}

std::vector<double> residual(const SparseOperator& a, std::span<const double> b, std::span<const double> x) {
  std::vector<double> r = a.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

void check_sizes(const SparseOperator& a, std::span<const double> b, std::span<const double> guess) {
  if (b.size() != a.size()) throw std::invalid_argument("linear solve: rhs size does not match operator");
  if (!guess.empty() && guess.size() != a.size())
    throw std::invalid_argument("linear solve: initial guess size does not match operator");
}

std::size_t iteration_cap(const SparseOperator& a, const SolveOptions& opts) {
  return opts.max_iter > 0 ? opts.max_iter : 20 * std::max<std::size_t>(a.size(), 1);
}

}  // namespace

SolveResult solve_spd(const SparseOperator& a, std::span<const double> b_in, const SolveOptions& opts,
                      std::span<const double> guess) {
  check_sizes(a, b_in, guess);
  const std::size_t n = a.size();
  SolveResult out;
  std::vector<double> b(b_in.begin(), b_in.end());
  if (opts.zero_mean) project_zero_mean(b);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    out.x.assign(n, 0.0);
    out.report = {0, 0.0, true};
    return out;
  }
  std::vector<double>& x = out.x;
  x = guess.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(guess.begin(), guess.end());
  if (opts.zero_mean) project_zero_mean(x);

  const auto dinv = inverse_diagonal(a);
  const std::size_t cap = iteration_cap(a, opts);
  const double target = opts.tol * bnorm;

  std::vector<double> r = residual(a, b, x);
  std::vector<double> z(n), p(n), q(n);
  auto precondition = [&] {
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    if (opts.zero_mean) project_zero_mean(z);
  };
  precondition();
  p = z;
  double rz = dot(r, z);
  std::size_t it = 0;
  int restarts = 0;
  while (true) {
    if (norm2(r) <= target) {
      // The recursive residual drifts from the true one; confirm before stopping.
      r = residual(a, b, x);
      if (opts.zero_mean) project_zero_mean(r);
      if (norm2(r) <= target || it >= cap || ++restarts > kMaxRestarts) break;
      precondition();
      p = z;
      rz = dot(r, z);
    }
    if (it >= cap) break;
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (opts.zero_mean) {
      project_zero_mean(x);
      project_zero_mean(r);
    }
    ++it;
    precondition();
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  auto rt = residual(a, b, x);
  out.report.iterations = it;
  out.report.residual_norm = norm2(rt) / bnorm;
  out.report.converged = out.report.residual_norm <= opts.tol;
  return out;
}

SolveResult solve_mmatrix(const SparseOperator& a, std::span<const double> b, const SolveOptions& opts,
                          std::span<const double> guess) {
  check_sizes(a, b, guess);
  const std::size_t n = a.size();
  SolveResult out;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    out.x.assign(n, 0.0);
    out.report = {0, 0.0, true};
    return out;
  }
  std::vector<double>& x = out.x;
  x = guess.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(guess.begin(), guess.end());

  const auto dinv = inverse_diagonal(a);
  const std::size_t cap = iteration_cap(a, opts);
  const double target = opts.tol * bnorm;

  std::vector<double> r = residual(a, b, x);
  std::vector<double> r_hat = r;
  std::vector<double> p(n, 0.0), v(n, 0.0), p_hat(n), s(n), s_hat(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  std::size_t it = 0;
  int restarts = 0;
  bool fresh = true;
  while (it < cap) {
    if (norm2(r) <= target) {
      r = residual(a, b, x);
      if (norm2(r) <= target || ++restarts > kMaxRestarts) break;
      r_hat = r;
      fresh = true;
    }
    double rho_new = dot(r_hat, r);
    if (std::abs(rho_new) < 1e-300 || fresh) {
      if (!fresh) r_hat = r;
      rho_new = dot(r_hat, r);
      p = r;
      fresh = false;
    } else {
      const double beta = (rho_new / rho) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    for (std::size_t i = 0; i < n; ++i) p_hat[i] = dinv[i] * p[i];
    a.multiply(p_hat, v);
    const double rv = dot(r_hat, v);
    if (rv == 0.0) {
      fresh = true;
      r_hat = r;
      ++it;
      continue;
    }
    alpha = rho_new / rv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    ++it;
    if (norm2(s) <= target) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p_hat[i];
      r = s;
      rho = rho_new;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) s_hat[i] = dinv[i] * s[i];
    a.multiply(s_hat, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p_hat[i] + omega * s_hat[i];
      r[i] = s[i] - omega * t[i];
    }
    rho = rho_new;
    if (omega == 0.0) fresh = true;
  }
  auto rt = residual(a, b, x);
  out.report.iterations = it;
  out.report.residual_norm = norm2(rt) / bnorm;
  out.report.converged = out.report.residual_norm <= opts.tol;
  return out;
}

}  // namespace locsense
