#include "cmalab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmalab/ball_mesh.hpp"

namespace cmalab {

TorusGrid::TorusGrid(int complex_dim, int nodes_per_axis) : n_(complex_dim), N_(nodes_per_axis) {
  require(n_ >= 1 && 2 * n_ <= kMaxRealDim, ErrorKind::Argument,
          "complex dimension must be in [1, " + std::to_string(kMaxRealDim / 2) + "]");
  require(N_ >= 4 && N_ % 2 == 0, ErrorKind::Argument,
          "nodes per axis must be even and >= 4, got " + std::to_string(N_));
  const int m = real_dim();
  size_ = 1;
  for (int a = m - 1; a >= 0; --a) {
    stride_[a] = size_;
    size_ *= static_cast<std::size_t>(N_);
  }
}

double TorusGrid::cell_volume() const { return std::pow(spacing(), real_dim()); }

MultiIndex TorusGrid::multi_index(std::size_t flat) const {
  MultiIndex idx{};
  for (int a = 0; a < real_dim(); ++a) {
    idx[a] = static_cast<int>((flat / stride_[a]) % N_);
  }
  return idx;
}

std::size_t TorusGrid::flat_index(const MultiIndex& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < real_dim(); ++a) {
    int i = idx[a] % N_;
    if (i < 0) i += N_;
    flat += static_cast<std::size_t>(i) * stride_[a];
  }
  return flat;
}

std::size_t TorusGrid::shifted(std::size_t flat, int axis, int delta) const {
  const int i = static_cast<int>((flat / stride_[axis]) % N_);
  int j = (i + delta) % N_;
  if (j < 0) j += N_;
  return flat + (static_cast<std::ptrdiff_t>(j) - i) * static_cast<std::ptrdiff_t>(stride_[axis]);
}

double TorusGrid::coordinate(std::size_t flat, int axis) const {
  return static_cast<double>((flat / stride_[axis]) % N_) * spacing();
}

Point TorusGrid::coordinates(std::size_t flat) const {
  Point p{};
  for (int a = 0; a < real_dim(); ++a) p[a] = coordinate(flat, a);
  return p;
}

ScalarField::ScalarField(TorusGrid grid, std::vector<double> values)
    : domain_(grid), values_(std::move(values)) {
  require(values_.size() == grid.size(), ErrorKind::Argument, "field size does not match torus grid");
  for (double v : values_) require(std::isfinite(v), ErrorKind::Argument, "non-finite field value");
}

ScalarField::ScalarField(std::shared_ptr<const BallMesh> mesh, std::vector<double> values)
    : domain_(std::move(mesh)), values_(std::move(values)) {
  const auto& m = *std::get<std::shared_ptr<const BallMesh>>(domain_);
  require(values_.size() == m.size(), ErrorKind::Argument, "field size does not match ball mesh");
  for (double v : values_) require(std::isfinite(v), ErrorKind::Argument, "non-finite field value");
}

ScalarField ScalarField::constant(const TorusGrid& grid, double value) {
  return ScalarField(grid, std::vector<double>(grid.size(), value));
}

ScalarField ScalarField::from_function(const TorusGrid& grid,
                                       const std::function<double(const Point&)>& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = fn(grid.coordinates(i));
  return ScalarField(grid, std::move(v));
}

const TorusGrid& ScalarField::torus() const {
  if (!on_torus()) throw Error(ErrorKind::DomainMismatch, "field does not live on a torus grid");
  return std::get<TorusGrid>(domain_);
}

const BallMesh& ScalarField::ball() const { return *ball_ptr(); }

std::shared_ptr<const BallMesh> ScalarField::ball_ptr() const {
  if (on_torus()) throw Error(ErrorKind::DomainMismatch, "field does not live on a ball mesh");
  return std::get<std::shared_ptr<const BallMesh>>(domain_);
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

ScalarField& ScalarField::normalize_max() {
  const double mx = max();
  for (double& v : values_) v -= mx;
  return *this;
}

ScalarField ScalarField::map(const std::function<double(double)>& fn) const {
  ScalarField out = *this;
  for (double& v : out.values_) v = fn(v);
  return out;
}

}  // namespace cmalab
