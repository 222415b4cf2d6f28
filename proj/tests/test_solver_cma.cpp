#include <gtest/gtest.h>


#include <cmath>
#include <numbers>
#include <random>

#include "cmalab/solver_cma.hpp"
#include "oracles.hpp"

using namespace cmalab;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField smooth_density(const TorusGrid& g, double amp) {
  auto F = ScalarField::from_function(g, [&](const Point& p) {
    double v = std::cos(2 * kPi * p[0]);
    for (int a = 1; a < g.real_dim(); a += 2) v *= std::cos(2 * kPi * p[a]);
    return amp * v + 0.5 * amp * std::sin(2 * kPi * (p[0] + p[1]));
  });
  const auto d = normalize_density(F, g.complex_dim());
  return d.normalized.map([](double x) { return std::exp(x); });
}

}  // namespace

TEST(NormalizeDensity, ZeroAndConstantFields) {
  TorusGrid g(1, 8);
  auto d0 = normalize_density(ScalarField::constant(g, 0.0), 1);
  EXPECT_DOUBLE_EQ(d0.c_omega, 1.0);
  for (double v : d0.normalized.values()) EXPECT_DOUBLE_EQ(v, 0.0);
  auto d1 = normalize_density(ScalarField::constant(g, 2.5), 1);
  for (double v : d1.normalized.values()) EXPECT_NEAR(v, 0.0, 1e-15);
  EXPECT_NEAR(d1.c_omega, std::exp(2.5), 1e-12);
}

TEST(NormalizeDensity, MassIdentityOnRandomField) {
  TorusGrid g(2, 6);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(g.size());
  for (double& x : v) x = u(rng);
  auto d = normalize_density(ScalarField(g, v), 2);
  double mass = 0.0;
  for (double x : d.normalized.values()) mass += std::exp(2 * x);
  EXPECT_NEAR(mass / g.size(), 1.0, 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(std::exp(v[i]), d.c_omega * std::exp(d.normalized[i]), 1e-12 * std::exp(v[i]));
}

TEST(SolveCma, UnitDensityNeedsNoIterations) {
  TorusGrid g(2, 8);
  auto sol = solve_cma(g, OperatorSpec::monge_ampere(2), ScalarField::constant(g, 1.0));
  EXPECT_EQ(sol.report.iterations, 0);
  for (double v : sol.phi.values()) EXPECT_EQ(v, 0.0);
}

TEST(SolveCma, OneDimensionalReductionMatchesPoissonOracle) {
  const int N = 64;
  TorusGrid g(1, N);
  auto k = smooth_density(g, 0.4);
  auto sol = solve_cma(g, OperatorSpec::monge_ampere(1), k);
  // 1 + Laplacian(phi) / 4 = c k, c = 1 / mean(k)
  const double c = 1.0 / k.mean();
  std::vector<double> rhs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = 4.0 * (c * k[i] - 1.0);
  auto u = oracle::spectral_poisson(rhs, N);
  const double top = *std::max_element(u.begin(), u.end());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(sol.phi[i], u[i] - top, 1e-10);
  EXPECT_NEAR(sol.report.rescale, c, 1e-12);
}

TEST(SolveCma, TwoDimensionalMongeAmpereConverges) {
  TorusGrid g(2, 8);
  auto k = smooth_density(g, 0.3);
  auto sol = solve_cma(g, OperatorSpec::monge_ampere(2), k);
  EXPECT_LE(sol.report.final_residual, 1e-10);
  EXPECT_GT(sol.report.positivity_margin, 0.0);
  EXPECT_EQ(sol.phi.max(), 0.0);
  // mass: mean det(I + Hc phi) = c^n mean(k^n)
  const auto det = monge_ampere_density(sol.phi);
  double mdet = 0.0, mk = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    mdet += det[i];
    mk += std::pow(sol.k_effective[i], 2);
  }
  EXPECT_NEAR(mdet / g.size(), mk / g.size(), 1e-10);
}
