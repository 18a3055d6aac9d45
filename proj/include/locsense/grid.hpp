#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace locsense {

/// Uniform cell-centered grid on the unit cube [0,1]^dim, dim in {1,2}.
///
/// Cells are numbered row-major: index = j * n + i, where i runs along x.
/// The domain has unit measure, so integrals are plain cell sums times h^dim.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, int n_per_axis);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t cell_count() const { return cell_count_; }
  double cell_volume() const { return cell_volume_; }

  /// Coordinate of the center of cell `i` along one axis.
  double center(int i) const { return (i + 0.5) * h_; }

  /// Per-axis indices of a flat cell index.
  int ix(std::size_t k) const { return static_cast<int>(k % n_); }
  int iy(std::size_t k) const { return dim_ == 2 ? static_cast<int>(k / n_) : 0; }

  bool operator==(const Grid& other) const { return dim_ == other.dim_ && n_ == other.n_; }

 private:
  int dim_ = 1;
  int n_ = 2;
  double h_ = 0.5;
  double cell_volume_ = 0.5;
  std::size_t cell_count_ = 2;
};

/// Scalar grid function: one value per cell.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.cell_count(), fill) {}
  Field(const Grid& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }

  std::span<double> span() { return values; }
  std::span<const double> span() const { return values; }

  /// Samples `fn(x)` (1D) or `fn(x, y)` (2D) at cell centers.
  template <class Fn>
  static Field sample(const Grid& g, Fn&& fn) {
    Field f(g);
    for (std::size_t k = 0; k < g.cell_count(); ++k) {
      const double x = g.center(g.ix(k));
      if constexpr (requires { fn(x, x); }) {
        f[k] = fn(x, g.dim() == 2 ? g.center(g.iy(k)) : 0.5);
      } else {
        f[k] = fn(x);
      }
    }
    return f;
  }
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field operator-(const Field& a, double c);

/// Throws std::invalid_argument when the two fields live on different grids.
void require_same_grid(const Field& a, const Field& b, const char* where);

}  // namespace locsense
