#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "cmalab/error.hpp"

namespace cmalab {

/// Volume of the unit ball in R^m.
double unit_ball_volume(int m);

/// Node set covering the closed ball B(0, 2*r0) in R^m, m in {1, 2}.
///
/// m = 1: uniform nodes on [-2 r0, 2 r0], endpoints are boundary nodes.
/// m = 2: polar Chebyshev-Fourier collocation. An odd Chebyshev degree
/// keeps the origin off the grid; only positive radii are stored and the
/// reflection u(-r, t) = u(r, t + pi) closes the radial operators. Node
/// index = radial_index * angular_count + angular_index, radial index 0 is
/// the boundary circle.
class BallMesh {
 public:
  static BallMesh interval(double r0, int cells);
  static BallMesh disk(double r0, int radial_degree, int angular_count);

  int real_dim() const { return m_; }
  double r0() const { return r0_; }
  double radius() const { return 2.0 * r0_; }
  std::size_t size() const { return x_.size(); }

  bool is_boundary(std::size_t i) const { return boundary_[i]; }
  double x(std::size_t i) const { return x_[i]; }
  double y(std::size_t i) const { return y_[i]; }
  double distance_from_center(std::size_t i) const;
  /// Quadrature weight of node i (integrates smooth functions over the ball).
  double weight(std::size_t i) const { return weights_[i]; }
  double integrate(const std::vector<double>& v) const;

  // m = 1
  int cells() const { return cells_; }
  double spacing() const { return 2.0 * radius() / cells_; }

  // m = 2
  int radial_count() const { return nr_; }
  int angular_count() const { return nt_; }
  double radial_node(int i) const { return r_[i]; }
  double angular_node(int k) const;
  /// Dense collocation operators acting on the full nodal vector.
  const Eigen::MatrixXd& d_r() const { return dr_; }
  const Eigen::MatrixXd& d_rr() const { return drr_; }
  const Eigen::MatrixXd& d_t() const { return dt_; }
  const Eigen::MatrixXd& d_tt() const { return dtt_; }
  const Eigen::MatrixXd& d_rt() const { return drt_; }

 private:
  BallMesh() = default;

  int m_ = 0;
  double r0_ = 0.0;
  int cells_ = 0;
  int nr_ = 0;
  int nt_ = 0;
  std::vector<double> r_;
  std::vector<double> x_, y_, weights_;
  std::vector<bool> boundary_;
  Eigen::MatrixXd dr_, drr_, dt_, dtt_, drt_;
};

}  // namespace cmalab
