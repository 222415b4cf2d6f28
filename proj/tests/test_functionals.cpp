#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cmalab/functionals.hpp"

using namespace cmalab;

TEST(Tau, ClosedFormAtZero) {
  for (int ell : {1, 2, 7, 64}) EXPECT_DOUBLE_EQ(tau(ell, 0.0), 0.5 / ell);
}

TEST(Tau, EnvelopeMonotonicityAndLimit) {
  for (int ell = 1; ell <= 64; ++ell) {
    for (int i = 0; i <= 400; ++i) {
      const double t = -10.0 + 0.05 * i;
      const double v = tau(ell, t);
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, 1.0 + std::max(t, 0.0));
      EXPECT_GE(v, std::max(t, 0.0));
      EXPECT_LE(tau(ell + 1, t), v);
    }
  }
  EXPECT_GT(tau(1, 5.0), 5.0);
  EXPECT_LE(tau(1, 5.0), 5.5);
  double prev = tau(1, -3.0);
  for (int ell = 2; ell <= 4096; ell *= 2) {
    const double v = tau(ell, -3.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-7);
}

TEST(Tau, RejectsZeroIndex) { EXPECT_THROW(tau(0, 1.0), Error); }

TEST(Profile, ZeroPotential) {
  TorusGrid g(1, 8);
  auto u = ScalarField::constant(g, 0.0);
  auto d = ScalarField::constant(g, 1.0);
  const std::vector<double> s{0.1, 0.5, 1.0};
  auto p = build_profile(u, d, s);
  for (std::size_t j = 0; j < s.size(); ++j) {
    EXPECT_EQ(p.phi[j], 0.0);
    EXPECT_EQ(p.A[j], 0.0);
  }
}

TEST(Profile, ConstantMinusOne) {
  TorusGrid g(1, 8);
  auto u = ScalarField::constant(g, -1.0);
  auto d = ScalarField::constant(g, 1.0);
  const std::vector<double> s{0.0, 0.25, 0.5, 0.999, 1.0, 1.5};
  auto p = build_profile(u, d, s);
  for (std::size_t j = 0; j < s.size(); ++j) {
    EXPECT_NEAR(p.phi[j], s[j] < 1.0 ? 1.0 : 0.0, 1e-14);
    EXPECT_NEAR(p.A[j], s[j] < 1.0 ? 1.0 - s[j] : 0.0, 1e-14);
  }
}

TEST(Profile, EmptyGridRejected) {
  TorusGrid g(1, 4);
  auto u = ScalarField::constant(g, 0.0);
  EXPECT_THROW(build_profile(u, u, std::vector<double>{}), Error);
}

TEST(Profile, ReverseHolderGrowthOnRandomPotentials) {
  TorusGrid g(1, 16);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(g.size()), dens(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = -3.0 * uni(rng);
      dens[i] = 0.1 + uni(rng);
    }
    ScalarField u(g, v), d(g, dens);
    auto s = default_s_grid(u, 40);
    auto p = build_profile(u, d, s);
    for (std::size_t j = 1; j < s.size(); ++j) {
      EXPECT_LE(p.phi[j], p.phi[j - 1]);
      EXPECT_LE(p.A[j], p.A[j - 1] + 1e-15);
    }
    // A_s >= r phi(s + r) for every sampled pair
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i; j < s.size(); ++j) EXPECT_GE(p.A[i] + 1e-14, (s[j] - s[i]) * p.phi[j]);
  }
}

TEST(DefaultGrid, SpansZeroToDepth) {
  TorusGrid g(1, 4);
  auto u = ScalarField::from_function(g, [](const Point& p) { return -p[0]; });
  auto s = default_s_grid(u);
  ASSERT_EQ(s.size(), 64u);
  EXPECT_EQ(s.front(), 0.0);
  EXPECT_EQ(s.back(), -u.min());
}

TEST(Entropy, ZeroDensityField) {
  TorusGrid g(1, 8);
  auto F = ScalarField::constant(g, 0.0);
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    auto r = entropy_report(F, p, 1, 1.0);
    EXPECT_NEAR(r.ent_p, std::pow(std::log(2.0), p), 1e-15);
    EXPECT_EQ(r.nash_p, 0.0);
  }
}

TEST(Entropy, TwoValueClosedForm) {
  TorusGrid g(1, 8);
  const double c = 0.7;
  const int n = 2;
  auto F = ScalarField::from_function(g, [&](const Point& p) { return p[0] < 0.5 ? c : -c; });
  const double p = 2.5;
  auto r = entropy_report(F, p, n, 1.0);
  const double up = std::exp(n * c), dn = std::exp(-n * c);
  const double ent = 0.5 * (up * std::pow(std::log(1 + up), p) + dn * std::pow(std::log(1 + dn), p));
  const double nash = 0.5 * (up + dn) * std::pow(n * c, p);
  EXPECT_NEAR(r.ent_p, ent, 1e-12);
  EXPECT_NEAR(r.nash_p, nash, 1e-12);
}

TEST(Entropy, IncreasingInPWhenLargeValuesDominate) {
  TorusGrid g(1, 16);
  auto F = ScalarField::from_function(g, [](const Point& p) { return 2.0 * std::cos(6.283185307179586 * p[0]); });
  double prev_ent = 0.0, prev_nash = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    auto r = entropy_report(F, p, 1, 1.0);
    EXPECT_GT(r.ent_p, prev_ent);
    EXPECT_GT(r.nash_p, prev_nash);
    prev_ent = r.ent_p;
    prev_nash = r.nash_p;
  }
}

TEST(Entropy, EnergyAgainstPotential) {
  TorusGrid g(1, 4);
  auto F = ScalarField::constant(g, 0.0);
  auto phi = ScalarField::constant(g, -2.0);
  EXPECT_NEAR(entropy_report(F, 1.0, 1, 1.0, phi).energy, 2.0, 1e-15);
}

TEST(Trudinger, ZeroPotentialAndExponent) {
  TorusGrid g(2, 4);
  auto phi = ScalarField::constant(g, 0.0);
  auto F = ScalarField::constant(g, 0.3);
  auto r = trudinger_energy_check(phi, F, 1.0, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(r.exponential, 1.0);
  EXPECT_EQ(r.moment, 0.0);
  EXPECT_DOUBLE_EQ(trudinger_exponent(2, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(trudinger_exponent(4, 2.0), 2.0);
  EXPECT_THROW(trudinger_exponent(2, 2.0), Error);
}

TEST(Trudinger, RequiresMaxNormalized) {
  TorusGrid g(1, 4);
  auto phi = ScalarField::constant(g, 0.5);
  EXPECT_THROW(trudinger_energy_check(phi, phi, 1.0, 1.0, 1.0), Error);
}

TEST(Young, ZeroField) {
  TorusGrid g(1, 8);
  auto v = ScalarField::constant(g, 0.0);
  auto F = ScalarField::from_function(g, [](const Point& p) { return p[0] - 0.5; });
  auto y = young_split(v, F, 2.0, 1);
  EXPECT_TRUE(y.pass);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(y.lhs[i], 0.0);
    EXPECT_GE(y.density_piece[i] + y.exponential_piece[i], y.c_p);
  }
}

TEST(Young, PointwiseOverWideRange) {
  TorusGrid g(1, 64);
  for (double p : {0.5, 1.0, 2.0, 3.0, 6.0, 12.0}) {
    for (double vmax : {0.5, 5.0, 40.0}) {
      for (double famp : {0.1, 3.0, 20.0}) {
        auto v = ScalarField::from_function(g, [&](const Point& x) { return vmax * x[0]; });
        auto F = ScalarField::from_function(g, [&](const Point& x) { return famp * std::sin(19.0 * x[0]); });
        auto y = young_split(v, F, p, 1);
        EXPECT_TRUE(y.pass) << "p=" << p << " vmax=" << vmax << " famp=" << famp << " ratio=" << y.worst_ratio;
      }
    }
  }
}

TEST(Young, SpikeAtOneNode) {
  TorusGrid g(1, 8);
  std::vector<double> vv(g.size(), 0.0);
  vv[3] = 25.0;
  auto y = young_split(ScalarField(g, vv), ScalarField::constant(g, 1.5), 3.0, 2);
  EXPECT_TRUE(y.pass);
}

TEST(Young, LogTwoBranchAtUnitDensity) {
  // eta(u) = (log(1 + u))^p at u = e^{nF} = 1
  EXPECT_NEAR(std::pow(std::log1p(std::exp(0.0)), 2.0), std::pow(std::log(2.0), 2.0), 1e-15);
  TorusGrid g(1, 4);
  auto r = entropy_report(ScalarField::constant(g, 0.0), 2.0, 1, 1.0);
  EXPECT_NEAR(r.ent_p, std::pow(std::log(2.0), 2.0), 1e-15);
}
