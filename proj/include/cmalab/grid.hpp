#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "cmalab/error.hpp"

namespace cmalab {

inline constexpr int kMaxRealDim = 8;
using MultiIndex = std::array<int, kMaxRealDim>;
using Point = std::array<double, kMaxRealDim>;

/// Periodic grid on the unit torus [0,1)^m, m = 2n. Complex coordinates are
/// z_j = x^{2j} + i x^{2j+1} (0-based axes). Flat storage is row-major with
/// the last axis fastest.
class TorusGrid {
 public:
  TorusGrid(int complex_dim, int nodes_per_axis);

  int complex_dim() const { return n_; }
  int real_dim() const { return 2 * n_; }
  int nodes_per_axis() const { return N_; }
  double spacing() const { return 1.0 / N_; }
  std::size_t size() const { return size_; }
  double cell_volume() const;

  MultiIndex multi_index(std::size_t flat) const;
  std::size_t flat_index(const MultiIndex& idx) const;
  /// Index of the node shifted by `delta` nodes along `axis` (periodic).
  std::size_t shifted(std::size_t flat, int axis, int delta) const;
  double coordinate(std::size_t flat, int axis) const;
  Point coordinates(std::size_t flat) const;

  bool operator==(const TorusGrid& other) const { return n_ == other.n_ && N_ == other.N_; }

 private:
  int n_;
  int N_;
  std::size_t size_;
  std::array<std::size_t, kMaxRealDim> stride_{};
};

class BallMesh;

/// Real values sampled on a torus grid or on a ball mesh.
class ScalarField {
 public:
  ScalarField(TorusGrid grid, std::vector<double> values);
  ScalarField(std::shared_ptr<const BallMesh> mesh, std::vector<double> values);

  static ScalarField constant(const TorusGrid& grid, double value);
  static ScalarField from_function(const TorusGrid& grid,
                                   const std::function<double(const Point&)>& fn);

  bool on_torus() const { return std::holds_alternative<TorusGrid>(domain_); }
  const TorusGrid& torus() const;
  const BallMesh& ball() const;
  std::shared_ptr<const BallMesh> ball_ptr() const;

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double max() const;
  double min() const;
  double mean() const;  // torus only: plain node average
  /// Records whether max over nodes is exactly zero.
  bool max_normalized() const { return max() == 0.0; }
  /// Shift so the maximum node value is 0.
  ScalarField& normalize_max();

  ScalarField map(const std::function<double(double)>& fn) const;

 private:
  std::variant<TorusGrid, std::shared_ptr<const BallMesh>> domain_;
  std::vector<double> values_;
};

}  // namespace cmalab
