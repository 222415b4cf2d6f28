#include "cmalab/ball_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cmalab {

namespace {

constexpr double kPi = std::numbers::pi;

// Chebyshev differentiation matrix on x_j = cos(pi j / N), j = 0..N.
Eigen::MatrixXd chebyshev_matrix(int N) {
  Eigen::VectorXd x(N + 1), c(N + 1);
  for (int j = 0; j <= N; ++j) {
    x[j] = std::cos(kPi * j / N);
    c[j] = ((j == 0 || j == N) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j <= N; ++j) {
      if (i != j) D(i, j) = (c[i] / c[j]) / (x[i] - x[j]);
    }
  }
  for (int i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
  return D;
}

// Fourier differentiation matrices on t_k = 2 pi k / M, M even.
void fourier_matrices(int M, Eigen::MatrixXd& d1, Eigen::MatrixXd& d2) {
  const double h = 2.0 * kPi / M;
  d1 = Eigen::MatrixXd::Zero(M, M);
  d2 = Eigen::MatrixXd::Zero(M, M);
  for (int k = 0; k < M; ++k) {
    for (int l = 0; l < M; ++l) {
      if (k == l) {
        d2(k, l) = -kPi * kPi / (3.0 * h * h) - 1.0 / 6.0;
        continue;
      }
      const int diff = k - l;
      const double sgn = (std::abs(diff) % 2) ? -1.0 : 1.0;
      const double half = diff * h / 2.0;
      d1(k, l) = 0.5 * sgn / std::tan(half);
      d2(k, l) = -0.5 * sgn / (std::sin(half) * std::sin(half));
    }
  }
}

// Weights on [-1, 1] exact for polynomials of degree < nodes.size().
std::vector<double> interpolatory_weights(const std::vector<double>& nodes) {
  const int M = static_cast<int>(nodes.size());
  Eigen::MatrixXd V(M, M);
  Eigen::VectorXd moments(M);
  for (int k = 0; k < M; ++k) {
    moments[k] = (k % 2) ? 0.0 : 2.0 / (1.0 - static_cast<double>(k) * k);
    for (int i = 0; i < M; ++i) V(k, i) = std::cos(k * std::acos(std::clamp(nodes[i], -1.0, 1.0)));
  }
  Eigen::VectorXd w = V.fullPivLu().solve(moments);
  return {w.data(), w.data() + M};
}

}  // namespace

double unit_ball_volume(int m) {
  require(m >= 1, ErrorKind::Argument, "unit ball dimension must be positive");
  return std::pow(kPi, m / 2.0) / std::tgamma(m / 2.0 + 1.0);
}

BallMesh BallMesh::interval(double r0, int cells) {
  require(r0 > 0.0, ErrorKind::Argument, "ball radius must be positive");
  require(cells >= 4, ErrorKind::Argument, "interval needs at least 4 cells");
  BallMesh mesh;
  mesh.m_ = 1;
  mesh.r0_ = r0;
  mesh.cells_ = cells;
  const double h = mesh.spacing();
  for (int i = 0; i <= cells; ++i) {
    mesh.x_.push_back(-mesh.radius() + i * h);
    mesh.y_.push_back(0.0);
    mesh.boundary_.push_back(i == 0 || i == cells);
    mesh.weights_.push_back((i == 0 || i == cells) ? 0.5 * h : h);
  }
  return mesh;
}

BallMesh BallMesh::disk(double r0, int radial_degree, int angular_count) {
  require(r0 > 0.0, ErrorKind::Argument, "ball radius must be positive");
  require(radial_degree >= 5 && radial_degree % 2 == 1, ErrorKind::Argument,
          "radial Chebyshev degree must be odd and >= 5");
  require(angular_count >= 4 && angular_count % 2 == 0, ErrorKind::Argument,
          "angular node count must be even and >= 4");
  BallMesh mesh;
  mesh.m_ = 2;
  mesh.r0_ = r0;
  const int N = radial_degree;
  const int M = (N + 1) / 2;
  const int T = angular_count;
  const double R = mesh.radius();
  mesh.nr_ = M;
  mesh.nt_ = T;
  for (int i = 0; i < M; ++i) mesh.r_.push_back(R * std::cos(kPi * i / N));

  // quadrature: area element r dr dt = (1/2) d(r^2) dt, interpolatory in r^2
  std::vector<double> s(M);
  for (int i = 0; i < M; ++i) s[i] = 2.0 * (mesh.r_[i] / R) * (mesh.r_[i] / R) - 1.0;
  const auto ws = interpolatory_weights(s);

  const std::size_t size = static_cast<std::size_t>(M) * T;
  for (int i = 0; i < M; ++i) {
    for (int k = 0; k < T; ++k) {
      const double t = 2.0 * kPi * k / T;
      mesh.x_.push_back(mesh.r_[i] * std::cos(t));
      mesh.y_.push_back(mesh.r_[i] * std::sin(t));
      mesh.boundary_.push_back(i == 0);
      mesh.weights_.push_back((2.0 * kPi / T) * 0.5 * (R * R / 2.0) * ws[i]);
    }
  }

  const Eigen::MatrixXd D = chebyshev_matrix(N) / R;
  const Eigen::MatrixXd D2 = D * D;
  mesh.dr_ = Eigen::MatrixXd::Zero(size, size);
  mesh.drr_ = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < M; ++i) {
    for (int k = 0; k < T; ++k) {
      const std::size_t row = static_cast<std::size_t>(i) * T + k;
      for (int j = 0; j <= N; ++j) {
        std::size_t col;
        if (j < M) {
          col = static_cast<std::size_t>(j) * T + k;
        } else {
          col = static_cast<std::size_t>(N - j) * T + (k + T / 2) % T;
        }
        mesh.dr_(row, col) += D(i, j);
        mesh.drr_(row, col) += D2(i, j);
      }
    }
  }
  Eigen::MatrixXd f1, f2;
  fourier_matrices(T, f1, f2);
  mesh.dt_ = Eigen::MatrixXd::Zero(size, size);
  mesh.dtt_ = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < M; ++i) {
    mesh.dt_.block(static_cast<Eigen::Index>(i) * T, static_cast<Eigen::Index>(i) * T, T, T) = f1;
    mesh.dtt_.block(static_cast<Eigen::Index>(i) * T, static_cast<Eigen::Index>(i) * T, T, T) = f2;
  }
  mesh.drt_ = mesh.dr_ * mesh.dt_;
  return mesh;
}

double BallMesh::distance_from_center(std::size_t i) const { return std::hypot(x_[i], y_[i]); }

double BallMesh::angular_node(int k) const { return 2.0 * kPi * k / nt_; }

double BallMesh::integrate(const std::vector<double>& v) const {
  require(v.size() == size(), ErrorKind::Argument, "integrand size does not match ball mesh");
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += weights_[i] * v[i];
  return acc;
}

}  // namespace cmalab
