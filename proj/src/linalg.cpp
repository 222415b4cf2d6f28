#include "cmalab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace cmalab {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

KrylovResult gmres(const LinearMap& apply, const LinearMap& precondition, std::span<const double> rhs,
                   std::span<double> x, double tol, int restart, int max_iterations) {
  const std::size_t n = rhs.size();
  KrylovResult res;
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  std::vector<std::vector<double>> V(restart + 1, std::vector<double>(n));
  std::vector<std::vector<double>> H(restart + 1, std::vector<double>(restart, 0.0));
  std::vector<double> cs(restart), sn(restart), g(restart + 1), w(n), z(n), r(n);

  while (res.iterations < max_iterations) {
    apply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    double beta = norm2(r);
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < restart && res.iterations < max_iterations; ++k, ++res.iterations) {
      precondition(V[k], z);
      apply(z, w);
      for (int j = 0; j <= k; ++j) {
        H[j][k] = dot(w, V[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= H[j][k] * V[j][i];
      }
      // one reorthogonalization pass
      for (int j = 0; j <= k; ++j) {
        const double c = dot(w, V[j]);
        H[j][k] += c;
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * V[j][i];
      }
      H[k + 1][k] = norm2(w);
      if (H[k + 1][k] > 0.0)
        for (std::size_t i = 0; i < n; ++i) V[k + 1][i] = w[i] / H[k + 1][k];
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
        H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
        H[j][k] = t;
      }
      const double denom = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = H[k][k] / denom;
      sn[k] = H[k + 1][k] / denom;
      H[k][k] = denom;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) / bnorm <= tol) {
        ++k;
        ++res.iterations;
        break;
      }
    }
    // back substitution and update x += M^{-1} V y
    std::vector<double> y(k);
    for (int j = k - 1; j >= 0; --j) {
      double s = g[j];
      for (int l = j + 1; l < k; ++l) s -= H[j][l] * y[l];
      y[j] = s / H[j][j];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) w[i] += y[j] * V[j][i];
    precondition(w, z);
    for (std::size_t i = 0; i < n; ++i) x[i] += z[i];
  }
  apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  res.relative_residual = norm2(r) / bnorm;
  res.converged = res.relative_residual <= tol;
  return res;
}

KrylovResult pcg(const LinearMap& apply, const LinearMap& precondition, std::span<const double> rhs,
                 std::span<double> x, double tol, int max_iterations) {
  const std::size_t n = rhs.size();
  KrylovResult res;
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - q[i];
  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  for (; res.iterations < max_iterations; ++res.iterations) {
    res.relative_residual = norm2(r) / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      break;
    }
    apply(p, q);
    const double alpha = rz / dot(p, q);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

}  // namespace cmalab
