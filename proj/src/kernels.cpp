#include "cmalab/kernels.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "cmalab/spectral.hpp"

namespace cmalab {

namespace {

using SmallC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using SmallR = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;

void eigen_block(std::span<const cplx> h, int n, std::span<double> lambda, SmallC* vectors) {
  if (n == 1) {
    lambda[0] = h[0].real();
    if (vectors) *vectors = SmallC::Ones(1, 1);
    return;
  }
  SmallC H(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) H(j, k) = h[j * n + k];
  Eigen::SelfAdjointEigenSolver<SmallC> es(H, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  for (int j = 0; j < n; ++j) lambda[j] = es.eigenvalues()[j];
  if (vectors) *vectors = es.eigenvectors();
}

void linearize_one(const OperatorSpec& spec, const std::vector<std::vector<double>>& hess, bool want_coeff,
                   std::size_t i, NodeLinearization& out) {
  const int n = spec.dim();
  const int P = pair_count(2 * n);
  cplx h[16];
  double lambda[4], grad[4];
  relative_endomorphism_at(hess, n, i, {h, static_cast<std::size_t>(n * n)});
  SmallC U;
  eigen_block({h, static_cast<std::size_t>(n * n)}, n, {lambda, static_cast<std::size_t>(n)},
              want_coeff ? &U : nullptr);
  std::span<const double> lam{lambda, static_cast<std::size_t>(n)};
  out.margin[i] = spec.cone_margin(lam);
  if (!spec.in_cone(lam)) {
    out.value[i] = std::numeric_limits<double>::quiet_NaN();
    if (want_coeff)
      for (int p = 0; p < P; ++p) out.coeff[i * P + p] = 0.0;
    return;
  }
  out.value[i] = spec.value_and_gradient(lam, {grad, static_cast<std::size_t>(n)});
  if (!want_coeff) return;
  cplx M[16];
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      cplx acc = 0.0;
      for (int l = 0; l < n; ++l) acc += U(j, l) * grad[l] * std::conj(U(k, l));
      M[j * n + k] = acc;
    }
  hermitian_to_real_coefficients({M, static_cast<std::size_t>(n * n)}, n,
                                 {out.coeff.data() + i * P, static_cast<std::size_t>(P)});
}

}  // namespace

void relative_endomorphism_at(const std::vector<std::vector<double>>& hess, int n, std::size_t i,
                              std::span<cplx> h) {
  const int m = 2 * n;
  auto d = [&](int a, int b) { return hess[pair_index(m, a, b)][i]; };
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double re = d(2 * j, 2 * k) + d(2 * j + 1, 2 * k + 1);
      const double im = d(2 * j, 2 * k + 1) - d(2 * j + 1, 2 * k);
      h[j * n + k] = 0.25 * cplx(re, im) + (j == k ? 1.0 : 0.0);
    }
  }
}

void hermitian_to_real_coefficients(std::span<const cplx> M, int n, std::span<double> coeff) {
  const int m = 2 * n;
  double A[8][8] = {};
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // tr(M H) = sum_{j,k} M_kj H_jk
      const double P = M[k * n + j].real();
      const double Q = M[k * n + j].imag();
      A[2 * j][2 * k] += 0.25 * P;
      A[2 * j + 1][2 * k + 1] += 0.25 * P;
      A[2 * j][2 * k + 1] -= 0.25 * Q;
      A[2 * j + 1][2 * k] += 0.25 * Q;
    }
  }
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) coeff[pair_index(m, a, b)] = (a == b) ? A[a][a] : A[a][b] + A[b][a];
}

void linearize_nodes(const OperatorSpec& spec, const std::vector<std::vector<double>>& hess, bool want_coeff,
                     Exec exec, NodeLinearization& out) {
  const int n = spec.dim();
  const int P = pair_count(2 * n);
  require(static_cast<int>(hess.size()) == P, ErrorKind::Argument, "real Hessian has wrong pair count");
  const std::size_t nodes = hess[0].size();
  out.value.assign(nodes, 0.0);
  out.margin.assign(nodes, 0.0);
  if (want_coeff) out.coeff.assign(nodes * P, 0.0);
  const auto count = static_cast<std::ptrdiff_t>(nodes);
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) linearize_one(spec, hess, want_coeff, i, out);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) linearize_one(spec, hess, want_coeff, i, out);
  }
  std::size_t outside = 0;
  for (double v : out.value) outside += std::isnan(v) ? 1 : 0;
  out.outside = outside;
}

void eigenvalues_nodes(std::span<const cplx> entries, int n, Exec exec, std::span<double> out) {
  const std::size_t block = static_cast<std::size_t>(n) * n;
  const auto count = static_cast<std::ptrdiff_t>(entries.size() / block);
  require(out.size() == static_cast<std::size_t>(count) * n, ErrorKind::Argument, "eigenvalue output size mismatch");
  auto one = [&](std::ptrdiff_t i) {
    eigen_block(entries.subspan(i * block, block), n, out.subspan(i * n, n), nullptr);
  };
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  }
}

void contract_nodes(std::span<const double> coeff, const std::vector<std::vector<double>>& second, Exec exec,
                    std::span<double> out) {
  const std::size_t P = second.size();
  const auto count = static_cast<std::ptrdiff_t>(out.size());
  auto one = [&](std::ptrdiff_t i) {
    double acc = 0.0;
    for (std::size_t p = 0; p < P; ++p) acc += coeff[i * P + p] * second[p][i];
    out[i] = acc;
  };
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) one(i);
  }
}

void divergence_form_apply(const TorusGrid& grid, std::span<const double> coeff, std::span<const double> v,
                           Exec exec, std::span<double> out) {
  const int m = grid.real_dim();
  const std::size_t P = static_cast<std::size_t>(pair_count(m));
  const std::size_t N = grid.size();
  require(coeff.size() == N * P && v.size() == N && out.size() == N, ErrorKind::Argument,
          "divergence-form apply: size mismatch");
  const double inv_h = 1.0 / grid.spacing();
  // flux_a = sum_b C_ab D+_b v, stored node-major
  std::vector<double> flux(N * m);
  auto flux_one = [&](std::ptrdiff_t i) {
    double d[kMaxRealDim];
    for (int b = 0; b < m; ++b) d[b] = (v[grid.shifted(i, b, 1)] - v[i]) * inv_h;
    for (int a = 0; a < m; ++a) {
      double acc = 0.0;
      for (int b = 0; b < m; ++b) acc += coeff[i * P + pair_index(m, a, b)] * d[b];
      flux[i * m + a] = acc;
    }
  };
  // (D+_a)^T f at i is (f_{i - e_a} - f_i) / h
  auto div_one = [&](std::ptrdiff_t i) {
    double acc = 0.0;
    for (int a = 0; a < m; ++a) acc += flux[grid.shifted(i, a, -1) * m + a] - flux[i * m + a];
    out[i] = acc * inv_h;
  };
  const auto count = static_cast<std::ptrdiff_t>(N);
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) flux_one(i);
    for (std::ptrdiff_t i = 0; i < count; ++i) div_one(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) flux_one(i);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) div_one(i);
  }
}

}  // namespace cmalab
