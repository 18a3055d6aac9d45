#include "locsense/grid.hpp"

#include <stdexcept>
#include <string>

namespace locsense {

Grid::Grid(int dim, int n_per_axis) : dim_(dim), n_(n_per_axis) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("Grid: dim must be 1 or 2, got " + std::to_string(dim));
  if (n_per_axis < 2) throw std::invalid_argument("Grid: need at least 2 cells per axis");
  h_ = 1.0 / n_per_axis;
  cell_volume_ = dim == 1 ? h_ : h_ * h_;
  cell_count_ = dim == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
}

Field::Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != g.cell_count()) throw std::invalid_argument("Field: value count does not match grid");
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!(a.grid == b.grid) || a.size() != b.size())
    throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a, b, "operator+");
  Field out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += b[k];
  return out;
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a, b, "operator-");
  Field out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= b[k];
  return out;
}

Field operator*(double s, const Field& a) {
  Field out = a;
  for (double& x : out.values) x *= s;
  return out;
}

Field operator-(const Field& a, double c) {
  Field out = a;
  for (double& x : out.values) x -= c;
  return out;
}

}  // namespace locsense
