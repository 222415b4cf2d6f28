#pragma once

#include <span>

namespace cmalab {

/// Decreasing profiles are right-continuous steps phi(x) = phi_i on
/// [s_i, s_{i+1}) and stay at the last value beyond the grid; the premise is
/// r phi(s + r) <= C phi(s)^{1+delta} for all s >= s_0, r > 0.
/// Increasing profiles are left-continuous steps phi(x) = phi_i on
/// (s_{i-1}, s_i] (piece 0 reaches down to 0); the premise is
/// t phi(s - t) <= C phi(s)^{1+delta} for 0 < t < s <= s_last.
enum class GrowthVariant { Decreasing, Increasing };

struct GrowthCertificate {
  GrowthVariant variant = GrowthVariant::Decreasing;
  double constant = 0.0;          // the C tested
  double delta = 0.0;
  double minimal_constant = 0.0;  // sup of the ratio over the step function, may be +inf
  double worst_s = 0.0;           // pair attaining the sup (r or t as the gap)
  double worst_gap = 0.0;
  bool pass = false;
};

/// Exhaustive check over the step function defined by the samples.
GrowthCertificate verify_growth(std::span<const double> s, std::span<const double> phi, GrowthVariant variant,
                                double constant, double delta);

/// Value of the step function at x under the variant's continuity convention.
double step_value(std::span<const double> s, std::span<const double> phi, GrowthVariant variant, double x);

/// Halving iteration: the decreasing profile vanishes beyond
/// S0 = 2 B phi0^delta / (1 - 2^-delta).
double vanishing_bound(double B, double delta, double phi0);

/// Increasing profile positive on (0, s0] with the premise satisfies
/// phi(s0) >= c0 = (s0 (1 - 2^-delta) / (2 C))^{1/delta}.
double lower_bound(double C, double delta, double s0);

}  // namespace cmalab
