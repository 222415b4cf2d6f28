#include "cmalab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmalab/error.hpp"

namespace cmalab {

namespace {

ScalarField unit_mass(const ScalarField& f) {
  const auto v = f.values();
  const double top = *std::max_element(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - top);
  const double shift = top + std::log(acc / static_cast<double>(v.size()));
  return f.map([shift](double x) { return x - shift; });
}

CmaSolution solve_density(const ScalarField& f, const SolverOptions& options) {
  const TorusGrid& grid = f.torus();
  const int n = grid.complex_dim();
  return solve_cma(grid, OperatorSpec::monge_ampere(n), f.map([n](double x) { return std::exp(x / n); }), options);
}

struct Pair {
  double distance = 0.0, gap = 0.0, defect = 0.0;
  ScalarField v;
};

Pair compare(const ScalarField& f, const ScalarField& u, const ScalarField& h, const ScalarField& v_raw) {
  double up = -INFINITY, down = -INFINITY, distance = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    up = std::max(up, u[i] - v_raw[i]);
    down = std::max(down, v_raw[i] - u[i]);
    distance += std::abs(std::exp(f[i]) - std::exp(h[i]));
  }
  const double shift = 0.5 * (up - down);
  Pair out{0.0, 0.0, 0.0, v_raw.map([shift](double x) { return x + shift; })};
  out.distance = distance / static_cast<double>(u.size());
  double up2 = -INFINITY, down2 = -INFINITY;
  for (std::size_t i = 0; i < u.size(); ++i) {
    up2 = std::max(up2, u[i] - out.v[i]);
    down2 = std::max(down2, out.v[i] - u[i]);
  }
  out.gap = std::max(up2, down2);
  out.defect = std::abs(up2 - down2);
  return out;
}

void check_size(const char* name, double size, double K) {
  if (size > K) {
    std::ostringstream os;
    os << "L^1(log L)^p size of e^" << name << " is " << size << " > K = " << K;
    throw Error(ErrorKind::PremiseViolation, os.str());
  }
}

}  // namespace

double stability_exponent(int n, double p) {
  require(n >= 1 && p > n, ErrorKind::Argument, "stability exponent needs p > n >= 1");
  return 1.0 / (n + 3.0 + (p - n) / (p * n));
}

double log_orlicz_size(const ScalarField& f, double p) {
  double acc = 0.0;
  for (double x : f.values()) acc += std::exp(x) * std::pow(std::log1p(std::exp(x)), p);
  return acc / static_cast<double>(f.size());
}

StabilityInstance run_stability(const ScalarField& f, const ScalarField& h, double p, double K,
                                const SolverOptions& options) {
  require(f.on_torus() && h.on_torus() && f.torus() == h.torus(), ErrorKind::DomainMismatch,
          "densities must live on the same torus grid");
  const ScalarField fn = unit_mass(f), hn = unit_mass(h);
  const double entropy_f = log_orlicz_size(fn, p), entropy_h = log_orlicz_size(hn, p);
  check_size("f", entropy_f, K);
  check_size("h", entropy_h, K);
  auto su = solve_density(fn, options);
  auto sv = solve_density(hn, options);
  auto pair = compare(fn, su.phi, hn, sv.phi);
  StabilityInstance out{fn, hn, std::move(su.phi), std::move(pair.v)};
  out.distance = pair.distance;
  out.gap = pair.gap;
  out.normalization_defect = pair.defect;
  out.entropy_f = entropy_f;
  out.entropy_h = entropy_h;
  out.K = K;
  out.p = p;
  out.beta_ref = stability_exponent(f.torus().complex_dim(), p);
  out.u_report = su.report;
  out.v_report = sv.report;
  return out;
}

StabilitySweep stability_sweep(const ScalarField& f, const ScalarField& f_tilde, double p, double K, int levels,
                               const SolverOptions& options) {
  require(levels >= 2, ErrorKind::Argument, "a sweep needs at least two members");
  require(f.on_torus() && f_tilde.on_torus() && f.torus() == f_tilde.torus(), ErrorKind::DomainMismatch,
          "densities must live on the same torus grid");
  StabilitySweep out;
  out.beta_ref = stability_exponent(f.torus().complex_dim(), p);
  const ScalarField base = unit_mass(f);
  const ScalarField target = unit_mass(f_tilde);
  check_size("f", log_orlicz_size(base, p), K);
  const auto su = solve_density(base, options);
  for (int j = 0; j < levels; ++j) {
    const double t = std::ldexp(1.0, -j);
    ScalarField h(base.torus(), std::vector<double>(base.size()));
    for (std::size_t i = 0; i < base.size(); ++i) h[i] = std::log((1.0 - t) * std::exp(base[i]) + t * std::exp(target[i]));
    h = unit_mass(h);
    check_size("h_t", log_orlicz_size(h, p), K);
    const auto sv = solve_density(h, options);
    const auto pair = compare(base, su.phi, h, sv.phi);
    out.rows.push_back({t, pair.distance, pair.gap, pair.gap / std::pow(pair.distance, out.beta_ref)});
  }
  out.C = out.rows.front().ratio;
  for (std::size_t j = 0; j < out.rows.size(); ++j) {
    const auto& r = out.rows[j];
    out.worst_excess = std::max(out.worst_excess, r.gap / (out.C * std::pow(r.distance, out.beta_ref)));
    if (j > 0 && r.gap > out.rows[j - 1].gap) out.monotone = false;
  }
  // least squares slope over the finest half of the family
  const std::size_t first = out.rows.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = static_cast<double>(out.rows.size() - first);
  for (std::size_t j = first; j < out.rows.size(); ++j) {
    const double x = std::log(out.rows[j].distance), y = std::log(out.rows[j].gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  out.pass = out.worst_excess <= 1.0 + 1e-12 && out.monotone;
  return out;
}

}  // namespace cmalab
