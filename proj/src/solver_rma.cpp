#include "cmalab/solver_rma.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cmalab {

namespace {

// Polar second-derivative pieces: D^2 psi ~ [[a, b], [b, c]] in the
// rotating frame (e_r, e_t), with
//   a = psi_rr, b = psi_rt / r - psi_t / r^2, c = psi_r / r + psi_tt / r^2.
struct PolarParts {
  Eigen::VectorXd a, b, c;
};

PolarParts polar_parts(const BallMesh& mesh, const Eigen::VectorXd& psi) {
  Eigen::VectorXd r(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) r[i] = mesh.distance_from_center(i);
  const Eigen::VectorXd pr = mesh.d_r() * psi;
  const Eigen::VectorXd pt = mesh.d_t() * psi;
  PolarParts p;
  p.a = mesh.d_rr() * psi;
  p.b = (mesh.d_rt() * psi).cwiseQuotient(r) - pt.cwiseQuotient(r.cwiseProduct(r));
  p.c = pr.cwiseQuotient(r) + (mesh.d_tt() * psi).cwiseQuotient(r.cwiseProduct(r));
  return p;
}

double min_eig(double a, double b, double c) {
  return 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

std::vector<double> interval_second_difference(const BallMesh& mesh, std::span<const double> psi) {
  const int K = mesh.cells();
  const double h2 = mesh.spacing() * mesh.spacing();
  std::vector<double> d(K + 1);
  for (int i = 1; i < K; ++i) d[i] = (psi[i - 1] - 2.0 * psi[i] + psi[i + 1]) / h2;
  // one-sided, exact for cubics
  d[0] = (2.0 * psi[0] - 5.0 * psi[1] + 4.0 * psi[2] - psi[3]) / h2;
  d[K] = (2.0 * psi[K] - 5.0 * psi[K - 1] + 4.0 * psi[K - 2] - psi[K - 3]) / h2;
  return d;
}

ConvexSolution solve_interval(const ScalarField& rho) {
  const auto mesh = rho.ball_ptr();
  const int K = mesh->cells();
  const double h2 = mesh->spacing() * mesh->spacing();
  // Thomas algorithm for psi_{i-1} - 2 psi_i + psi_{i+1} = h^2 rho_i, i = 1..K-1
  const int n = K - 1;
  std::vector<double> cp(n), dp(n);
  for (int j = 0; j < n; ++j) {
    const double diag = -2.0;
    const double rhs = h2 * rho[j + 1];
    if (j == 0) {
      cp[j] = 1.0 / diag;
      dp[j] = rhs / diag;
    } else {
      const double den = diag - cp[j - 1];
      cp[j] = 1.0 / den;
      dp[j] = (rhs - dp[j - 1]) / den;
    }
  }
  std::vector<double> psi(K + 1, 0.0);
  for (int j = n - 1; j >= 0; --j) psi[j + 1] = dp[j] - (j + 1 < n ? cp[j] * psi[j + 2] : 0.0);

  ConvexSolution out{ScalarField(mesh, psi)};
  const auto d = interval_second_difference(*mesh, psi);
  out.convexity_margin = INFINITY;
  for (int i = 1; i < K; ++i) {
    out.convexity_margin = std::min(out.convexity_margin, d[i]);
    out.residual = std::max(out.residual, std::abs(d[i] - rho[i]));
  }
  out.mass = mesh->integrate(d);
  out.rho_mass = mesh->integrate(std::vector<double>(rho.values().begin(), rho.values().end()));
  out.iterations = 1;
  return out;
}

class DiskNewton {
 public:
  DiskNewton(const BallMesh& mesh, const RmaOptions& options) : mesh_(mesh), options_(options) {
    for (std::size_t i = 0; i < mesh.size(); ++i)
      if (!mesh.is_boundary(i)) interior_.push_back(static_cast<Eigen::Index>(i));
    r_.resize(static_cast<Eigen::Index>(mesh.size()));
    for (std::size_t i = 0; i < mesh.size(); ++i) r_[static_cast<Eigen::Index>(i)] = mesh.distance_from_center(i);
    const Eigen::VectorXd inv_r = r_.cwiseInverse();
    const Eigen::VectorXd inv_r2 = inv_r.cwiseProduct(inv_r);
    const auto I = static_cast<Eigen::Index>(interior_.size());
    Lrr_.resize(I, I);
    Lc_.resize(I, I);
    Lb_.resize(I, I);
    for (Eigen::Index p = 0; p < I; ++p) {
      const auto row = interior_[p];
      for (Eigen::Index q = 0; q < I; ++q) {
        const auto col = interior_[q];
        Lrr_(p, q) = mesh.d_rr()(row, col);
        Lc_(p, q) = mesh.d_r()(row, col) * inv_r[row] + mesh.d_tt()(row, col) * inv_r2[row];
        Lb_(p, q) = mesh.d_rt()(row, col) * inv_r[row] - mesh.d_t()(row, col) * inv_r2[row];
      }
    }
  }

  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(interior_.size()); }
  const std::vector<Eigen::Index>& interior() const { return interior_; }

  struct State {
    Eigen::VectorXd a, b, c, residual;
    double res_max = INFINITY;
    double margin = -INFINITY;
  };

  State evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& rho) const {
    State s;
    s.a = Lrr_ * x;
    s.b = Lb_ * x;
    s.c = Lc_ * x;
    s.residual = s.a.cwiseProduct(s.c) - s.b.cwiseProduct(s.b) - rho;
    s.res_max = s.residual.cwiseAbs().maxCoeff();
    s.margin = INFINITY;
    for (Eigen::Index p = 0; p < x.size(); ++p) s.margin = std::min(s.margin, min_eig(s.a[p], s.b[p], s.c[p]));
    return s;
  }

  Eigen::VectorXd direction(const State& s) const {
    const Eigen::MatrixXd J = s.c.asDiagonal() * Lrr_ + s.a.asDiagonal() * Lc_ - 2.0 * (s.b.asDiagonal() * Lb_);
    return J.partialPivLu().solve(-s.residual);
  }

 private:
  const BallMesh& mesh_;
  const RmaOptions& options_;
  std::vector<Eigen::Index> interior_;
  Eigen::VectorXd r_;
  Eigen::MatrixXd Lrr_, Lc_, Lb_;
};

ConvexSolution solve_disk(const ScalarField& rho, const RmaOptions& options) {
  const auto mesh = rho.ball_ptr();
  DiskNewton newton(*mesh, options);
  const auto& interior = newton.interior();
  const Eigen::Index I = newton.unknowns();
  Eigen::VectorXd target(I);
  for (Eigen::Index p = 0; p < I; ++p) target[p] = rho[static_cast<std::size_t>(interior[p])];
  const double rho_bar = target.mean();

  // exact start: det of sqrt(rho_bar) (|x|^2 - R^2) / 2 is rho_bar
  const double R = mesh->radius();
  Eigen::VectorXd x(I);
  for (Eigen::Index p = 0; p < I; ++p) {
    const double rr = mesh->distance_from_center(static_cast<std::size_t>(interior[p]));
    x[p] = 0.5 * std::sqrt(rho_bar) * (rr * rr - R * R);
  }

  ConvexSolution out{ScalarField(mesh, std::vector<double>(mesh->size(), 0.0))};
  std::vector<double> schedule{0.25, 0.5, 0.75, 1.0};
  double t_done = 0.0;
  Eigen::VectorXd x_done = x;
  int refinements = 0;
  std::size_t stage = 0;
  DiskNewton::State st;
  while (stage < schedule.size()) {
    const double t = schedule[stage];
    const Eigen::VectorXd rho_t = (1.0 - t) * Eigen::VectorXd::Constant(I, rho_bar) + t * target;
    st = newton.evaluate(x, rho_t);
    bool ok = false;
    for (int it = 0; it <= options.max_newton; ++it) {
      if (st.res_max <= options.tol * std::max(1.0, rho_t.cwiseAbs().maxCoeff())) {
        ok = true;
        break;
      }
      if (it == options.max_newton) break;
      const Eigen::VectorXd dx = newton.direction(st);
      ++out.iterations;
      double alpha = 1.0;
      bool accepted = false;
      for (int h = 0; h <= options.max_halvings; ++h) {
        const Eigen::VectorXd trial = x + alpha * dx;
        auto ts = newton.evaluate(trial, rho_t);
        if (ts.margin > 0.0 && ts.res_max < st.res_max) {
          x = trial;
          st = std::move(ts);
          accepted = true;
          break;
        }
        alpha *= 0.5;
        ++out.damped_steps;
      }
      if (!accepted) break;
    }
    if (ok) {
      ++out.continuation_steps;
      t_done = t;
      x_done = x;
      ++stage;
      continue;
    }
    if (++refinements > options.max_refinements) {
      std::ostringstream os;
      os << "real Monge-Ampere Newton stalled at stage t=" << t << " residual=" << st.res_max
         << " margin=" << st.margin;
      throw Error(st.margin > 0.0 ? ErrorKind::NonConvergence : ErrorKind::ConvexityFailure, os.str());
    }
    schedule.insert(schedule.begin() + static_cast<std::ptrdiff_t>(stage), 0.5 * (t_done + t));
    x = x_done;
  }

  std::vector<double> psi(mesh->size(), 0.0);
  for (Eigen::Index p = 0; p < I; ++p) psi[static_cast<std::size_t>(interior[p])] = x[p];
  out.psi = ScalarField(mesh, psi);
  out.residual = st.res_max;
  out.convexity_margin = st.margin;
  out.mass = mesh->integrate(hessian_determinant(*mesh, psi));
  out.rho_mass = mesh->integrate(std::vector<double>(rho.values().begin(), rho.values().end()));
  return out;
}

}  // namespace

std::vector<double> hessian_determinant(const BallMesh& mesh, std::span<const double> psi) {
  require(psi.size() == mesh.size(), ErrorKind::Argument, "field does not match the ball mesh");
  if (mesh.real_dim() == 1) return interval_second_difference(mesh, psi);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(psi.data(), static_cast<Eigen::Index>(psi.size()));
  const auto p = polar_parts(mesh, v);
  std::vector<double> out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[i] = p.a[k] * p.c[k] - p.b[k] * p.b[k];
  }
  return out;
}

std::vector<double> hessian_min_eigenvalue(const BallMesh& mesh, std::span<const double> psi) {
  require(psi.size() == mesh.size(), ErrorKind::Argument, "field does not match the ball mesh");
  if (mesh.real_dim() == 1) return interval_second_difference(mesh, psi);
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(psi.data(), static_cast<Eigen::Index>(psi.size()));
  const auto p = polar_parts(mesh, v);
  std::vector<double> out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[i] = min_eig(p.a[k], p.b[k], p.c[k]);
  }
  return out;
}

std::vector<double> gradient_norm(const BallMesh& mesh, std::span<const double> psi) {
  require(psi.size() == mesh.size(), ErrorKind::Argument, "field does not match the ball mesh");
  std::vector<double> out(psi.size(), 0.0);
  if (mesh.real_dim() == 1) {
    const int K = mesh.cells();
    const double h = mesh.spacing();
    for (int i = 1; i < K; ++i) out[i] = std::abs(psi[i + 1] - psi[i - 1]) / (2.0 * h);
    out[0] = std::abs(-3.0 * psi[0] + 4.0 * psi[1] - psi[2]) / (2.0 * h);
    out[K] = std::abs(3.0 * psi[K] - 4.0 * psi[K - 1] + psi[K - 2]) / (2.0 * h);
    return out;
  }
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(psi.data(), static_cast<Eigen::Index>(psi.size()));
  const Eigen::VectorXd pr = mesh.d_r() * v;
  const Eigen::VectorXd pt = mesh.d_t() * v;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[i] = std::hypot(pr[k], pt[k] / mesh.distance_from_center(i));
  }
  return out;
}

ConvexSolution solve_rma(const ScalarField& rho, const RmaOptions& options) {
  require(!rho.on_torus(), ErrorKind::DomainMismatch, "real Monge-Ampere data must live on a ball mesh");
  const BallMesh& mesh = rho.ball();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    require(std::isfinite(rho[i]), ErrorKind::Argument, "density must be finite");
    if (!mesh.is_boundary(i)) require(rho[i] > 0.0, ErrorKind::Argument, "density must be positive inside the ball");
  }
  ConvexSolution out = mesh.real_dim() == 1 ? solve_interval(rho) : solve_disk(rho, options);
  out.boundary_residual = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i)
    if (mesh.is_boundary(i)) out.boundary_residual = std::max(out.boundary_residual, std::abs(out.psi[i]));
  return out;
}

AbpReport abp_check(const ConvexSolution& sol) {
  const BallMesh& mesh = sol.psi.ball();
  const int m = mesh.real_dim();
  const double beta = unit_ball_volume(m);
  AbpReport r;
  r.observed = std::max(0.0, -sol.psi.min());
  r.mass = std::max(0.0, sol.mass);
  const double root = std::pow(r.mass, 1.0 / m);
  r.bound_printed = 4.0 * mesh.r0() / beta * root;
  r.bound_standard = 4.0 * mesh.r0() / std::pow(beta, 1.0 / m) * root;
  r.satisfies_printed = r.observed <= r.bound_printed;
  r.satisfies_standard = r.observed <= r.bound_standard;
  r.pass = r.observed <= std::max(r.bound_printed, r.bound_standard);
  return r;
}

GradientReport interior_gradient_check(const ConvexSolution& sol) {
  const BallMesh& mesh = sol.psi.ball();
  const auto g = gradient_norm(mesh, sol.psi.values());
  GradientReport r;
  r.bound = 4.0 / unit_ball_volume(mesh.real_dim());
  for (std::size_t i = 0; i < mesh.size(); ++i)
    if (mesh.distance_from_center(i) <= mesh.r0() * (1.0 + 1e-12)) r.observed = std::max(r.observed, g[i]);
  r.pass = r.observed <= r.bound + 1e-8;
  return r;
}

}  // namespace cmalab
