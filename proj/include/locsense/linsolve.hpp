#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace locsense {

/// Square sparse matrix in compressed-row form, immutable after assembly.
class SparseOperator {
 public:
  struct Entry {
    std::size_t col;
    double value;
  };

  /// Row-by-row assembly. Duplicate columns within a row are summed.
  class Builder {
   public:
    explicit Builder(std::size_t size);
    void add(std::size_t row, std::size_t col, double value);
    SparseOperator build(bool symmetric);

   private:
    std::size_t size_;
    std::vector<std::vector<Entry>> rows_;
  };

  std::size_t size() const { return row_start_.empty() ? 0 : row_start_.size() - 1; }
  std::size_t nonzeros() const { return cols_.size(); }

  /// Declared symmetric at assembly; checked by is_numerically_symmetric().
  bool symmetric() const { return symmetric_; }
  /// Nonpositive off-diagonals and positive diagonal weakly dominating its row
  /// or its column. Computed at assembly.
  bool m_matrix() const { return m_matrix_; }

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> diagonal() const;
  double at(std::size_t row, std::size_t col) const;

  /// Row-major dense copy; intended for small oracle checks.
  std::vector<double> to_dense() const;

  std::span<const std::size_t> row_columns(std::size_t row) const;
  std::span<const double> row_values(std::size_t row) const;

  bool is_numerically_symmetric(double tol = 1e-14) const;

 private:
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
  bool symmetric_ = false;
  bool m_matrix_ = false;
};

struct SolveReport {
  std::size_t iterations = 0;
  /// Relative residual ||Ax - b|| / ||b||, recomputed from the returned x.
  double residual_norm = 0.0;
  bool converged = false;
};

struct SolveOptions {
  double tol = 1e-10;
  /// 0 selects 20 * size.
  std::size_t max_iter = 0;
  /// Singular Neumann systems: project rhs and iterates onto zero mean.
  bool zero_mean = false;
};

struct SolveResult {
  std::vector<double> x;
  SolveReport report;
};

/// Jacobi-preconditioned conjugate gradients. `guess` may be empty.
SolveResult solve_spd(const SparseOperator& a, std::span<const double> b, const SolveOptions& opts = {},
                      std::span<const double> guess = {});

/// Jacobi-preconditioned BiCGSTAB for nonsymmetric M-matrix systems.
SolveResult solve_mmatrix(const SparseOperator& a, std::span<const double> b, const SolveOptions& opts = {},
                          std::span<const double> guess = {});

/// Raised by callers that cannot continue after a non-converged solve.
class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(const std::string& what, SolveReport report);
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

}  // namespace locsense
