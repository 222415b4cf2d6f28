#include "cmalab/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace cmalab {

double tau(int ell, double t) {
  require(ell >= 1, ErrorKind::Argument, "tau index must be >= 1");
  const double w = 1.0 / ell;
  // rationalized for t < 0 to avoid cancellation
  if (t < 0.0) return 0.5 * w * w / (std::hypot(t, w) - t);
  return 0.5 * (t + std::hypot(t, w));
}

SublevelProfile build_profile(std::span<const double> u, std::span<const double> density,
                              std::span<const double> weights, std::span<const double> s_grid,
                              std::string measure_kind) {
  require(!s_grid.empty(), ErrorKind::Argument, "empty s grid");
  require(u.size() == density.size() && u.size() == weights.size(), ErrorKind::Argument,
          "profile inputs differ in size");
  require(std::is_sorted(s_grid.begin(), s_grid.end()), ErrorKind::Argument, "s grid must be ascending");
  SublevelProfile out;
  out.s.assign(s_grid.begin(), s_grid.end());
  out.phi.assign(s_grid.size(), 0.0);
  out.A.assign(s_grid.size(), 0.0);
  out.measure_kind = std::move(measure_kind);
  for (std::size_t j = 0; j < s_grid.size(); ++j) {
    const double s = s_grid[j];
    double mass = 0.0, excess = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] < -s) {
        const double dm = density[i] * weights[i];
        mass += dm;
        excess += (-u[i] - s) * dm;
      }
    }
    out.phi[j] = mass;
    out.A[j] = excess;
  }
  return out;
}

SublevelProfile build_profile(const ScalarField& u, const ScalarField& density, std::span<const double> s_grid,
                              std::string measure_kind) {
  require(u.on_torus() && density.on_torus() && u.torus() == density.torus(), ErrorKind::DomainMismatch,
          "profile fields must share a torus grid");
  const std::vector<double> w(u.size(), 1.0 / static_cast<double>(u.size()));
  return build_profile(u.values(), density.values(), w, s_grid, std::move(measure_kind));
}

std::vector<double> default_s_grid(const ScalarField& u, int samples) {
  require(samples >= 2, ErrorKind::Argument, "s grid needs at least two samples");
  const double top = std::max(0.0, -u.min());
  std::vector<double> s(samples);
  for (int j = 0; j < samples; ++j) s[j] = top * j / (samples - 1);
  s.back() = top;
  return s;
}

namespace {

EntropyReport entropy_core(const ScalarField& F, double p, int n, double c_omega, const ScalarField* phi) {
  require(p > 0.0, ErrorKind::Argument, "entropy exponent must be positive");
  EntropyReport r;
  r.c_omega = c_omega;
  const double N = static_cast<double>(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double nf = n * F[i];
    const double u = std::exp(nf);
    r.ent_p += u * std::pow(std::log1p(u), p);
    r.nash_p += u * std::pow(std::abs(nf), p);
    if (phi) r.energy += -(*phi)[i] * u;
  }
  r.ent_p /= N;
  r.nash_p /= N;
  r.energy /= N;
  return r;
}

}  // namespace

EntropyReport entropy_report(const ScalarField& F, double p, int n, double c_omega) {
  return entropy_core(F, p, n, c_omega, nullptr);
}

EntropyReport entropy_report(const ScalarField& F, double p, int n, double c_omega, const ScalarField& phi) {
  require(phi.size() == F.size(), ErrorKind::DomainMismatch, "potential and density sizes differ");
  return entropy_core(F, p, n, c_omega, &phi);
}

double trudinger_exponent(int n, double p) {
  require(p > 0.0 && p < n, ErrorKind::Argument, "Trudinger exponent needs 0 < p < n");
  return n / (n - p);
}

TrudingerEnergy trudinger_energy_check(const ScalarField& phi, const ScalarField& F, double p, double q,
                                       double alpha) {
  require(phi.size() == F.size(), ErrorKind::DomainMismatch, "potential and density sizes differ");
  require(phi.max() <= 1e-12, ErrorKind::Precondition, "potential must be max-normalized to 0");
  const int n = phi.on_torus() ? phi.torus().complex_dim() : 1;
  TrudingerEnergy out;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double v = std::max(0.0, -phi[i]);
    out.exponential += std::exp(alpha * std::pow(v, q));
    out.moment += std::pow(v, p * q) * std::exp(n * F[i]);
  }
  out.exponential /= static_cast<double>(phi.size());
  out.moment /= static_cast<double>(phi.size());
  return out;
}

double young_constant(double p) {
  require(p > 0.0, ErrorKind::Argument, "Young exponent must be positive");
  return std::max({1.0, std::pow(2.0, p - 1.0), std::pow(p / std::exp(1.0), p)});
}

YoungSplit young_split(const ScalarField& v, const ScalarField& F, double p, int n) {
  require(v.size() == F.size(), ErrorKind::DomainMismatch, "field sizes differ");
  require(v.min() >= 0.0, ErrorKind::Argument, "young_split needs v >= 0");
  YoungSplit out;
  out.c_p = young_constant(p);
  const std::size_t N = v.size();
  out.lhs.resize(N);
  out.density_piece.resize(N);
  out.exponential_piece.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double nf = n * F[i];
    const double u = std::exp(nf);
    out.lhs[i] = u * std::pow(v[i], p);
    out.density_piece[i] = out.c_p * u * (1.0 + std::pow(std::abs(nf), p));
    out.exponential_piece[i] = out.c_p * std::exp(2.0 * v[i]);
    const double ratio = out.lhs[i] / (out.density_piece[i] + out.exponential_piece[i]);
    out.worst_ratio = std::max(out.worst_ratio, ratio);
  }
  out.pass = out.worst_ratio <= 1.0;
  return out;
}

}  // namespace cmalab
