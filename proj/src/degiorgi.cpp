#include "cmalab/degiorgi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmalab/error.hpp"

namespace cmalab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_profile(std::span<const double> s, std::span<const double> phi, GrowthVariant variant) {
  require(!s.empty() && s.size() == phi.size(), ErrorKind::Argument, "profile needs matching nonempty samples");
  for (std::size_t i = 0; i < s.size(); ++i) {
    require(phi[i] >= 0.0, ErrorKind::InvariantViolation, "profile values must be nonnegative");
    if (i == 0) continue;
    require(s[i] > s[i - 1], ErrorKind::InvariantViolation, "profile samples must be strictly ascending");
    const bool monotone = variant == GrowthVariant::Decreasing ? phi[i] <= phi[i - 1] : phi[i] >= phi[i - 1];
    require(monotone, ErrorKind::InvariantViolation, "profile is not monotone for the requested variant");
  }
}

}  // namespace

double step_value(std::span<const double> s, std::span<const double> phi, GrowthVariant variant, double x) {
  if (variant == GrowthVariant::Decreasing) {
    // last sample with s_i <= x
    auto it = std::upper_bound(s.begin(), s.end(), x);
    if (it == s.begin()) return phi.front();
    return phi[static_cast<std::size_t>(it - s.begin()) - 1];
  }
  // first sample with s_i >= x
  auto it = std::lower_bound(s.begin(), s.end(), x);
  if (it == s.end()) return phi.back();
  return phi[static_cast<std::size_t>(it - s.begin())];
}

GrowthCertificate verify_growth(std::span<const double> s, std::span<const double> phi, GrowthVariant variant,
                                double constant, double delta) {
  require(delta > 0.0, ErrorKind::Argument, "growth exponent must be positive");
  check_profile(s, phi, variant);
  GrowthCertificate cert;
  cert.variant = variant;
  cert.constant = constant;
  cert.delta = delta;
  const std::size_t K = s.size();
  double best = 0.0;
  auto consider = [&](double ratio, double at, double gap) {
    if (ratio > best) {
      best = ratio;
      cert.worst_s = at;
      cert.worst_gap = gap;
    }
  };
  if (variant == GrowthVariant::Decreasing) {
    // s in piece i, s + r in piece j >= i; sup r = s_{j+1} - s_i
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = i; j < K; ++j) {
        if (phi[j] == 0.0) break;
        if (j + 1 == K) {
          consider(kInf, s[i], kInf);
          break;
        }
        const double gap = s[j + 1] - s[i];
        consider(gap * phi[j] / std::pow(phi[i], 1.0 + delta), s[i], gap);
      }
    }
  } else {
    // s in piece i (s -> s_i), s - t in piece j <= i; sup t = s_i - lower end of piece j
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        if (phi[j] == 0.0) continue;
        const double low = j == 0 ? 0.0 : s[j - 1];
        const double gap = s[i] - low;
        if (gap <= 0.0) continue;
        if (phi[i] == 0.0) {
          consider(kInf, s[i], gap);
          continue;
        }
        consider(gap * phi[j] / std::pow(phi[i], 1.0 + delta), s[i], gap);
      }
    }
  }
  cert.minimal_constant = best;
  cert.pass = best <= constant;
  return cert;
}

double vanishing_bound(double B, double delta, double phi0) {
  require(delta > 0.0, ErrorKind::Argument, "De Giorgi exponent must be positive");
  require(B >= 0.0 && phi0 >= 0.0, ErrorKind::Argument, "De Giorgi inputs must be nonnegative");
  if (phi0 == 0.0) return 0.0;
  return 2.0 * B * std::pow(phi0, delta) / (1.0 - std::pow(2.0, -delta));
}

double lower_bound(double C, double delta, double s0) {
  require(delta > 0.0, ErrorKind::Argument, "De Giorgi exponent must be positive");
  require(C > 0.0 && s0 > 0.0, ErrorKind::Argument, "lower bound needs positive C and s0");
  return std::pow(s0 * (1.0 - std::pow(2.0, -delta)) / (2.0 * C), 1.0 / delta);
}

}  // namespace cmalab
