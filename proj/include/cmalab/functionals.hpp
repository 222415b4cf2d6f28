#pragma once

#include <span>
#include <string>
#include <vector>

#include "cmalab/grid.hpp"

namespace cmalab {

/// Smooth positive family decreasing in ell towards max(t, 0):
/// tau_ell(t) = (t + sqrt(t^2 + ell^-2)) / 2.
double tau(int ell, double t);

/// phi(s) and A_s sampled on an ascending s grid.
struct SublevelProfile {
  std::vector<double> s;
  std::vector<double> phi;  // weighted mass of {u < -s}
  std::vector<double> A;    // weighted integral of (-u - s) over {u < -s}
  std::string measure_kind;
};

/// Generic form: node values u, nonnegative density, quadrature weights.
/// Callers pick the weights, e.g. 1/size for normalized torus averages.
SublevelProfile build_profile(std::span<const double> u, std::span<const double> density,
                              std::span<const double> weights, std::span<const double> s_grid,
                              std::string measure_kind = "density");

/// Torus form with the normalized measure (1/V) density dV.
SublevelProfile build_profile(const ScalarField& u, const ScalarField& density, std::span<const double> s_grid,
                              std::string measure_kind = "k^n");

/// `samples` uniform points from 0 to max(-u) inclusive.
std::vector<double> default_s_grid(const ScalarField& u, int samples = 64);

struct EntropyReport {
  double ent_p = 0.0;    // mean e^{nF} (log(1 + e^{nF}))^p
  double nash_p = 0.0;   // mean e^{nF} |nF|^p
  double energy = 0.0;   // mean (-phi) e^{nF}; 0 unless a potential was supplied
  double c_omega = 1.0;
  double volume = 1.0;
};

EntropyReport entropy_report(const ScalarField& F, double p, int n, double c_omega);
EntropyReport entropy_report(const ScalarField& F, double p, int n, double c_omega, const ScalarField& phi);

/// n / (n - p) for p < n.
double trudinger_exponent(int n, double p);

struct TrudingerEnergy {
  double exponential = 0.0;  // mean e^{alpha (-phi)^q}
  double moment = 0.0;       // mean (-phi)^{pq} e^{nF}
};

TrudingerEnergy trudinger_energy_check(const ScalarField& phi, const ScalarField& F, double p, double q,
                                       double alpha);

/// Pointwise e^{nF} v^p <= c_p (e^{nF}(1 + |nF|^p) + e^{2v}).
struct YoungSplit {
  double c_p = 1.0;
  std::vector<double> lhs;
  std::vector<double> density_piece;    // c_p e^{nF}(1 + |nF|^p)
  std::vector<double> exponential_piece;  // c_p e^{2v}
  double worst_ratio = 0.0;             // max lhs / (sum of pieces)
  bool pass = true;
};

double young_constant(double p);
YoungSplit young_split(const ScalarField& v, const ScalarField& F, double p, int n);

}  // namespace cmalab
