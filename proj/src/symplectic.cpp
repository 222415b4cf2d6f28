#include "cmalab/symplectic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cmalab/functionals.hpp"
#include "cmalab/green.hpp"
#include "cmalab/hermitian.hpp"
#include "cmalab/spectral.hpp"

namespace cmalab {

namespace {

using Mat = Eigen::MatrixXd;

Mat node_matrix(const std::vector<double>& field, std::size_t node, int m) {
  Mat A(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) A(r, c) = field[(node * m + r) * m + c];
  return A;
}

void store(std::vector<double>& field, std::size_t node, const Mat& A) {
  const auto m = A.rows();
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) field[(node * m + r) * m + c] = A(r, c);
}

std::vector<double> component(const std::vector<double>& field, int m, int r, int c) {
  const std::size_t N = field.size() / (static_cast<std::size_t>(m) * m);
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = field[(i * m + r) * m + c];
  return out;
}

// max over i < j < l of |d_l w_ij + d_j w_li + d_i w_jl| with spectral derivatives.
double closedness_defect(const Spectral& spectral, const std::vector<double>& w, int m) {
  // dw[l][i][j] per node
  std::vector<std::vector<double>> d(static_cast<std::size_t>(m) * m * m);
  auto at = [&](int l, int i, int j) -> std::vector<double>& { return d[(l * m + i) * m + j]; };
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) at(l, i, j) = spectral.first_derivative(component(w, m, i, j), l);
  double worst = 0.0;
  const std::size_t N = w.size() / (static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int l = j + 1; l < m; ++l)
        for (std::size_t p = 0; p < N; ++p)
          worst = std::max(worst, std::abs(at(l, i, j)[p] + at(j, l, i)[p] + at(i, j, l)[p]));
  return worst;
}

// Central differences of every J entry: layout [node][axis][r][c].
std::vector<double> j_derivatives(const AlmostComplexData& data) {
  const TorusGrid& grid = data.grid;
  const int m = data.real_dim();
  const std::size_t N = grid.size();
  const double inv2h = 0.5 / grid.spacing();
  const std::size_t block = static_cast<std::size_t>(m) * m;
  std::vector<double> out(N * m * block);
  for (std::size_t i = 0; i < N; ++i) {
    for (int l = 0; l < m; ++l) {
      const std::size_t up = grid.shifted(i, l, 1), down = grid.shifted(i, l, -1);
      for (std::size_t e = 0; e < block; ++e)
        out[(i * m + l) * block + e] = (data.J[up * block + e] - data.J[down * block + e]) * inv2h;
    }
  }
  return out;
}

struct JTerms {
  std::vector<double> trace;   // a_l = J_k^j d_l J_j^k, [node][l]
  std::vector<double> tensor;  // T^q_ik = J_j^q d_i J_k^j, [node][q][i][k]
};

JTerms j_terms(const AlmostComplexData& data) {
  const int m = data.real_dim();
  const std::size_t N = data.grid.size();
  const std::size_t block = static_cast<std::size_t>(m) * m;
  const auto dJ = j_derivatives(data);
  JTerms t;
  t.trace.assign(N * m, 0.0);
  t.tensor.assign(N * m * block, 0.0);
  for (std::size_t p = 0; p < N; ++p) {
    const Mat J = node_matrix(data.J, p, m);
    for (int l = 0; l < m; ++l) {
      Mat dl(m, m);
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) dl(r, c) = dJ[(p * m + l) * block + r * m + c];
      // J_k^j = J(j, k), so sum_{j,k} J(j,k) dJ(k,j) = tr(J dJ)
      t.trace[p * m + l] = (J * dl).trace();
      // J_j^q d_l J_k^j = (J dJ)(q, k)
      const Mat prod = J * dl;
      for (int q = 0; q < m; ++q)
        for (int k = 0; k < m; ++k) t.tensor[((p * m + q) * m + l) * m + k] = prod(q, k);
    }
  }
  return t;
}

std::vector<double> packed(const std::vector<double>& field, int m) {
  const std::size_t N = field.size() / (static_cast<std::size_t>(m) * m);
  const std::size_t P = static_cast<std::size_t>(pair_count(m));
  std::vector<double> out(N * P);
  for (std::size_t i = 0; i < N; ++i)
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b)
        out[i * P + pair_index(m, a, b)] = 0.5 * (field[(i * m + a) * m + b] + field[(i * m + b) * m + a]);
  return out;
}

std::string strip_kind(const Error& e) {
  const std::string what = e.what();
  const auto pos = what.find(": ");
  return pos == std::string::npos ? what : what.substr(pos + 2);
}

template <class Fn>
auto run_stage(MainnewReport& report, const std::string& name, Fn&& fn) {
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      report.stages[name] = true;
    } else {
      auto value = fn();
      report.stages[name] = true;
      return value;
    }
  } catch (const Error& e) {
    report.stages[name] = false;
    throw Error(e.kind(), "stage " + name + ": " + strip_kind(e));
  }
}

}  // namespace

AlmostComplexData make_almost_complex(const TorusGrid& grid, std::vector<double> J, std::vector<double> Omega,
                                      std::vector<double> g_tilde) {
  const int m = grid.real_dim();
  const std::size_t size = grid.size() * m * m;
  require(J.size() == size && Omega.size() == size && g_tilde.size() == size, ErrorKind::Argument,
          "almost complex data: every field needs m*m entries per node");
  AlmostComplexData d{grid, std::move(J), std::move(Omega), std::vector<double>(size), std::move(g_tilde)};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Mat OJ = node_matrix(d.Omega, p, m) * node_matrix(d.J, p, m);
    store(d.g, p, 0.5 * (OJ + OJ.transpose()));
  }
  return d;
}

ValidationReport validate(const AlmostComplexData& data, double tol) {
  const int m = data.real_dim();
  const std::size_t N = data.grid.size();
  ValidationReport r;
  r.tol = tol;
  r.taming = INFINITY;
  std::vector<double> wt(data.g_tilde.size());
  const Mat I = Mat::Identity(m, m);
  for (std::size_t p = 0; p < N; ++p) {
    const Mat J = node_matrix(data.J, p, m);
    const Mat O = node_matrix(data.Omega, p, m);
    const Mat G = node_matrix(data.g_tilde, p, m);
    r.j_square = std::max(r.j_square, (J * J + I).cwiseAbs().maxCoeff());
    const Mat OJ = O * J;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (OJ + OJ.transpose()), Eigen::EigenvaluesOnly);
    r.taming = std::min(r.taming, es.eigenvalues().minCoeff());
    r.compatibility = std::max(r.compatibility, (J.transpose() * G * J - G).cwiseAbs().maxCoeff());
    const Mat w = G * J;
    r.antisymmetry = std::max(r.antisymmetry, (w + w.transpose()).cwiseAbs().maxCoeff());
    r.antisymmetry = std::max(r.antisymmetry, (O + O.transpose()).cwiseAbs().maxCoeff());
    store(wt, p, w);
  }
  const Spectral spectral(data.grid);
  r.omega_closed = closedness_defect(spectral, data.Omega, m);
  r.tilde_closed = closedness_defect(spectral, wt, m);
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) r.failures.push_back(what);
  };
  check(r.j_square <= tol, "J^2 != -I");
  check(r.taming > 0.0, "Omega does not tame J");
  check(r.omega_closed <= tol, "d Omega != 0");
  check(r.compatibility <= tol, "g~ is not J-compatible");
  check(r.antisymmetry <= tol, "omega~ or Omega is not antisymmetric");
  check(r.tilde_closed <= tol, "d omega~ != 0");
  r.pass = r.failures.empty();
  return r;
}

std::vector<double> christoffel_contraction(const AlmostComplexData& data, const ValidationReport& validation) {
  if (!validation.pass) {
    std::string why = "validation failed:";
    for (const auto& f : validation.failures) why += " " + f + ";";
    throw Error(ErrorKind::Precondition, why);
  }
  const int m = data.real_dim();
  const std::size_t N = data.grid.size();
  const auto t = j_terms(data);
  std::vector<double> out(N * m, 0.0);
  for (std::size_t p = 0; p < N; ++p) {
    const Mat Ginv = node_matrix(data.g_tilde, p, m).inverse();
    for (int q = 0; q < m; ++q) {
      double acc = 0.0;
      for (int l = 0; l < m; ++l) acc -= 0.5 * Ginv(q, l) * t.trace[p * m + l];
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) acc -= Ginv(i, k) * t.tensor[((p * m + q) * m + i) * m + k];
      out[p * m + q] = acc;
    }
  }
  return out;
}

CJReport measure_CJ(const AlmostComplexData& data) {
  const int m = data.real_dim();
  const std::size_t N = data.grid.size();
  CJReport r;
  r.chart_min = INFINITY;
  r.chart_max = -INFINITY;
  for (std::size_t p = 0; p < N; ++p) {
    Eigen::SelfAdjointEigenSolver<Mat> es(node_matrix(data.g, p, m), Eigen::EigenvaluesOnly);
    r.chart_min = std::min(r.chart_min, es.eigenvalues().minCoeff());
    r.chart_max = std::max(r.chart_max, es.eigenvalues().maxCoeff());
  }
  if (r.chart_min < 0.5 || r.chart_max > 2.0) {
    std::ostringstream os;
    os << "identity chart violates 1/2 <= g <= 2: eigenvalues in [" << r.chart_min << ", " << r.chart_max << "]";
    throw Error(ErrorKind::Chart, os.str());
  }
  const auto t = j_terms(data);
  for (std::size_t p = 0; p < N; ++p) {
    const Mat g = node_matrix(data.g, p, m);
    const Mat ginv = g.inverse();
    double a2 = 0.0;
    for (int l = 0; l < m; ++l)
      for (int k = 0; k < m; ++k) a2 += ginv(l, k) * t.trace[p * m + l] * t.trace[p * m + k];
    double T2 = 0.0;
    auto T = [&](int q, int i, int k) { return t.tensor[((p * m + q) * m + i) * m + k]; };
    for (int q = 0; q < m; ++q)
      for (int qq = 0; qq < m; ++qq)
        for (int i = 0; i < m; ++i)
          for (int ii = 0; ii < m; ++ii)
            for (int k = 0; k < m; ++k)
              for (int kk = 0; kk < m; ++kk)
                T2 += g(q, qq) * ginv(i, ii) * ginv(k, kk) * T(q, i, k) * T(qq, ii, kk);
    const double a = std::sqrt(std::max(a2, 0.0)), b = std::sqrt(std::max(T2, 0.0));
    r.trace_term = std::max(r.trace_term, a);
    r.tensor_term = std::max(r.tensor_term, b);
    r.C_J = std::max(r.C_J, a + b);
  }
  return r;
}

LinearPhi solve_linear_phi(const AlmostComplexData& data) {
  const int m = data.real_dim();
  const std::size_t N = data.grid.size();
  const MetricField metric(data.grid, packed(data.g_tilde, m));
  std::vector<double> f(N);
  double weighted = 0.0, scale = 0.0;
  for (std::size_t p = 0; p < N; ++p) {
    const Mat Ginv = node_matrix(data.g_tilde, p, m).inverse();
    f[p] = m - (Ginv * node_matrix(data.g, p, m)).trace();
    weighted += f[p] * metric.density(p);
    scale += std::abs(f[p]) * metric.density(p);
  }
  auto sol = solve_poisson(metric, f, 1e-13, 1e-8);
  const double top = *std::max_element(sol.u.begin(), sol.u.end());
  for (double& v : sol.u) v -= top;
  const auto lap = metric_laplacian(metric, sol.u);
  LinearPhi out{ScalarField(data.grid, std::move(sol.u)), 0.0, scale > 0.0 ? weighted / scale : 0.0,
                sol.iterations};
  for (std::size_t p = 0; p < N; ++p) out.residual = std::max(out.residual, std::abs(lap[p] - f[p]));
  return out;
}

ManufacturedFamily surface_family(const TorusGrid& grid, double eps_J, const ScalarField& v) {
  require(grid.complex_dim() == 1, ErrorKind::Argument, "the surface family lives on T^2");
  require(v.on_torus() && v.torus() == grid, ErrorKind::DomainMismatch, "conformal factor on a different grid");
  const std::size_t N = grid.size();
  double mean = 0.0;
  for (double x : v.values()) mean += std::exp(x);
  const double shift = std::log(mean / static_cast<double>(N));
  std::vector<double> J(N * 4), Omega(N * 4), gt(N * 4), F(N);
  for (std::size_t p = 0; p < N; ++p) {
    const double f = eps_J * std::sin(2.0 * std::numbers::pi * grid.coordinate(p, 1));
    const double vp = v[p] - shift;
    F[p] = vp;
    J[p * 4 + 1] = -std::exp(f);
    J[p * 4 + 2] = std::exp(-f);
    Omega[p * 4 + 1] = 1.0;
    Omega[p * 4 + 2] = -1.0;
    gt[p * 4 + 0] = std::exp(vp - f);
    gt[p * 4 + 3] = std::exp(vp + f);
  }
  return {make_almost_complex(grid, std::move(J), std::move(Omega), std::move(gt)), ScalarField(grid, std::move(F))};
}

ManufacturedFamily kahler_family(const TorusGrid& grid, const ScalarField& potential) {
  const int n = grid.complex_dim();
  const int m = 2 * n;
  const std::size_t N = grid.size();
  const MetricField metric(complex_hessian(potential, grid).plus_identity());
  std::vector<double> J(N * m * m, 0.0), Omega(N * m * m, 0.0), gt(N * m * m), F(N);
  for (std::size_t p = 0; p < N; ++p) {
    for (int j = 0; j < n; ++j) {
      J[(p * m + 2 * j + 1) * m + 2 * j] = 1.0;
      J[(p * m + 2 * j) * m + 2 * j + 1] = -1.0;
      Omega[(p * m + 2 * j) * m + 2 * j + 1] = 1.0;
      Omega[(p * m + 2 * j + 1) * m + 2 * j] = -1.0;
    }
    const auto g = metric.metric(p);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) gt[(p * m + a) * m + b] = g[pair_index(m, a, b)];
    F[p] = std::log(metric.density(p));
  }
  return {make_almost_complex(grid, std::move(J), std::move(Omega), std::move(gt)), ScalarField(grid, std::move(F))};
}

MainnewReport run_mainnew(const AlmostComplexData& data, const ScalarField& F, const MainnewOptions& options) {
  const TorusGrid& grid = data.grid;
  const int n = grid.complex_dim();
  const int m = 2 * n;
  const std::size_t N = grid.size();
  require(n == 1, ErrorKind::Argument, "the staged pipeline runs on surfaces (real dimension 2)");
  require(F.on_torus() && F.torus() == grid, ErrorKind::DomainMismatch, "F lives on a different grid");
  require(options.r0 > 0.0 && options.r0 <= 0.25, ErrorKind::Argument, "r0 must lie in (0, 1/4]");
  MainnewReport r;
  r.n = n;
  r.r0 = options.r0;
  const double delta = 1.0 / m;
  const double b = m / (m + 1.0);

  r.validation = run_stage(r, "validate", [&] {
    auto v = validate(data);
    if (!v.pass) {
      std::string why = "invalid data:";
      for (const auto& f : v.failures) why += " " + f + ";";
      throw Error(ErrorKind::Precondition, why);
    }
    return v;
  });
  r.cj = run_stage(r, "measure_CJ", [&] { return measure_CJ(data); });
  const LinearPhi lp = run_stage(r, "linear_phi", [&] { return solve_linear_phi(data); });
  r.phi_residual = lp.residual;
  const ScalarField& phi = lp.phi;

  // weights e^{2F} sqrt(det g) on the torus and e^{2F} det g in the chart
  std::vector<double> mu_torus(N), mu_chart(N);
  double max_sqrt_det = 0.0;
  for (std::size_t p = 0; p < N; ++p) {
    const double det = node_matrix(data.g, p, m).determinant();
    max_sqrt_det = std::max(max_sqrt_det, std::sqrt(det));
    mu_torus[p] = std::exp(2.0 * F[p]) * std::sqrt(det);
    mu_chart[p] = std::exp(2.0 * F[p]) * det;
    r.K += mu_torus[p] * grid.cell_volume();
    r.l1_phi += std::abs(phi[p]) * mu_torus[p] * grid.cell_volume();
  }
  r.sup_abs_phi = -phi.min();

  // x0 = argmin phi, first node on ties
  r.x0 = static_cast<std::size_t>(std::min_element(phi.values().begin(), phi.values().end()) - phi.values().begin());
  r.eta = 1.0 / (10.0 * (4.0 + 2.0 * r.cj.C_J * r.r0));
  r.s0 = r.eta * r.r0 * r.r0;

  auto mesh = std::make_shared<const BallMesh>(BallMesh::disk(r.r0, options.radial_degree, options.angular_count));
  const std::size_t M = mesh->size();
  const Point c0 = grid.coordinates(r.x0);
  std::vector<Point> pts(M, Point{});
  for (std::size_t i = 0; i < M; ++i) {
    pts[i][0] = c0[0] + mesh->x(i);
    pts[i][1] = c0[1] + mesh->y(i);
  }
  const Spectral spectral(grid);
  const auto phi_disk = spectral.interpolate(phi.values(), pts);
  const auto mu_disk = spectral.interpolate(mu_chart, pts);
  // the interpolant may dip slightly below the grid minimum between nodes
  r.phi_min = std::min(phi[r.x0], *std::min_element(phi_disk.begin(), phi_disk.end()));
  std::vector<double> u0(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double rr = mesh->distance_from_center(i);
    u0[i] = phi_disk[i] - r.phi_min + r.eta * rr * rr;
  }

  run_stage(r, "containment", [&] {
    r.containment_defect = -INFINITY;
    for (std::size_t i = 0; i < M; ++i)
      if (mesh->distance_from_center(i) >= r.r0) r.containment_defect = std::max(r.containment_defect, r.s0 - u0[i]);
    if (r.containment_defect > options.tol * r.s0) {
      std::ostringstream os;
      os << "sublevel set leaves B(x0, r0): u_s0 = " << -r.containment_defect << " outside";
      throw Error(ErrorKind::InvariantViolation, os.str());
    }
  });

  // uniform constants
  r.C2 = 4.0 / unit_ball_volume(m);
  r.C_ng = r.s0 * max_sqrt_det;
  r.C1 = 2.0 * r.C_ng * r.K;
  r.Lambda_bar = b * std::pow(10.0 * r.cj.C_J * r.C2, m + 1.0) * r.C1;
  r.C3 = std::pow(1.0 / b, b) * std::pow(r.C2 * r.r0 + r.Lambda_bar, b);
  r.C4 = std::pow(r.C3, (m + 1.0) / m);

  bool comparisons_ok = true;
  for (double fraction : options.s_fractions) {
    MainnewComparison cmp;
    cmp.s = fraction * r.s0;
    require(cmp.s > 0.0 && cmp.s <= r.s0, ErrorKind::Argument, "comparison levels must lie in (0, s0]");
    cmp.ell = static_cast<int>(std::ceil(options.ell_factor / cmp.s));
    std::vector<double> us(M), rho(M);
    for (std::size_t i = 0; i < M; ++i) {
      us[i] = u0[i] - cmp.s;
      rho[i] = tau(cmp.ell, -us[i]) * mu_disk[i];
    }
    cmp.A = mesh->integrate(rho);
    for (double& v : rho) v /= cmp.A;
    const std::string tag = "s=" + std::to_string(cmp.s);
    const auto sol = run_stage(r, "rma " + tag, [&] { return solve_rma(ScalarField(mesh, rho), options.rma); });
    cmp.rma_iterations = sol.iterations;
    cmp.rma_residual = sol.residual;
    cmp.abp = abp_check(sol);
    cmp.gradient = interior_gradient_check(sol);
    cmp.constants = choose_constants(ComparisonVariant::Symplectic, 1.0, n, 1.0, cmp.A,
                                     SymplecticExtras{r.cj.C_J, r.C2});
    const auto psi = sol.psi.values();
    const auto Phi = build_phi(us, psi, 0.0, cmp.constants);
    cmp.phi_report = verify_nonpositive(Phi, us, psi, options.tol);
    auto halved = cmp.constants;
    halved.epsilon *= 0.5;
    cmp.halved_report = verify_nonpositive(build_phi(us, psi, 0.0, halved), us, psi, options.tol);
    const double bound = r.C3 * std::pow(cmp.A, 1.0 / (m + 1.0));
    for (std::size_t i = 0; i < M; ++i) {
      cmp.chain_ratio = std::max(cmp.chain_ratio, -us[i] / bound);
      if (us[i] < 0.0) {
        const double barrier = cmp.constants.epsilon * std::pow(-psi[i] + cmp.constants.Lambda, cmp.constants.b);
        cmp.interior_ratio = std::max(cmp.interior_ratio, -us[i] / barrier);
      }
    }
    const bool ok = cmp.A <= r.C1 && cmp.abp.pass && cmp.gradient.pass && cmp.phi_report.pass && cmp.chain_ratio <= 1.0;
    r.stages["comparison " + tag] = ok;
    comparisons_ok = comparisons_ok && ok;
    r.comparisons.push_back(std::move(cmp));
  }

  // profile phi(s) = mass of Omega_s and A_s on (0, s0]
  const int S = options.profile_samples;
  require(S >= 2, ErrorKind::Argument, "profile needs at least two samples");
  for (int j = 1; j <= S; ++j) {
    const double s = r.s0 * j / S;
    double mass = 0.0, excess = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      if (u0[i] < s) {
        const double dm = mu_disk[i] * mesh->weight(i);
        mass += dm;
        excess += (s - u0[i]) * dm;
      }
    }
    r.profile_s.push_back(s);
    r.profile_phi.push_back(mass);
    r.profile_A.push_back(excess);
    if (mass > 0.0) r.additional_ratio = std::max(r.additional_ratio, excess / (r.C4 * std::pow(mass, 1.0 + delta)));
  }
  r.growth = run_stage(r, "growth",
                       [&] { return verify_growth(r.profile_s, r.profile_phi, GrowthVariant::Increasing, r.C4, delta); });
  r.stages["growth"] = r.growth.pass && r.additional_ratio <= 1.0;

  r.c0 = lower_bound(r.C4, delta, r.s0);
  r.phi_s0 = r.profile_phi.back();
  r.A_s0 = r.profile_A.back();
  r.stages["lower_bound"] = r.phi_s0 >= r.c0;
  r.C5 = r.C4 * std::pow(std::pow(2.0, m) * unit_ball_volume(m) * r.K, 1.0 + delta);
  r.stages["A_s0_bound"] = r.A_s0 <= r.C5;
  r.C6 = r.s0 + r.C5 / r.c0;
  r.C7 = 1.0 / r.c0;
  r.C8 = std::max(r.C6, r.C7);
  r.final_bound = r.C8 * (1.0 + r.l1_phi);
  r.stages["final"] = r.sup_abs_phi <= r.final_bound;

  r.pass = comparisons_ok;
  for (const auto& [name, ok] : r.stages) r.pass = r.pass && ok;
  return r;
}

}  // namespace cmalab
