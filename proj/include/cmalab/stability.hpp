#pragma once

#include <vector>

#include "cmalab/grid.hpp"
#include "cmalab/solver_cma.hpp"

namespace cmalab {

/// (n + 3 + (p - n) / (p n))^{-1}; requires p > n.
double stability_exponent(int n, double p);

/// mean e^f (log(1 + e^f))^p, the L^1 (log L)^p size of e^f on the unit torus.
double log_orlicz_size(const ScalarField& f, double p);

/// Two Monge-Ampere solutions (I + Hc u)^n = e^f, (I + Hc v)^n = e^h with
/// mean e^f = mean e^h = 1 and v shifted so that max(u - v) = max(v - u).
struct StabilityInstance {
  ScalarField f, h;
  ScalarField u, v;
  double distance = 0.0;  // mean |e^f - e^h|
  double gap = 0.0;       // max |u - v|
  double normalization_defect = 0.0;
  double entropy_f = 0.0, entropy_h = 0.0;
  double K = 0.0;
  double p = 0.0;
  double beta_ref = 0.0;
  SolveReport u_report, v_report;
};

/// f and h are shifted to unit mass first. Throws PremiseViolation when
/// either L^1 (log L)^p size exceeds K; solver failures propagate.
StabilityInstance run_stability(const ScalarField& f, const ScalarField& h, double p, double K,
                                const SolverOptions& options = {});

struct StabilityRow {
  double t = 0.0;
  double distance = 0.0;
  double gap = 0.0;
  double ratio = 0.0;  // gap / distance^beta_ref
};

struct StabilitySweep {
  std::vector<StabilityRow> rows;
  double beta_ref = 0.0;
  double C = 0.0;          // ratio of the t = 1 member, applied to the whole family
  double slope = 0.0;      // log-log slope of gap against distance over the finest half
  double worst_excess = 0.0;  // max gap / (C distance^beta_ref)
  bool monotone = true;    // gap decreases with t
  bool pass = false;       // worst_excess <= 1 and monotone
};

/// Family h_t = log((1 - t) e^f + t e^{f_tilde}), t = 2^{-j}, j = 0..levels-1.
/// The f solve is shared by every member.
StabilitySweep stability_sweep(const ScalarField& f, const ScalarField& f_tilde, double p, double K, int levels = 9,
                               const SolverOptions& options = {});

}  // namespace cmalab
