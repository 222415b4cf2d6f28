#include "cmalab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace cmalab {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

int pair_index(int m, int a, int b) {
  if (a > b) std::swap(a, b);
  require(a >= 0 && b < m, ErrorKind::Argument, "axis pair out of range");
  return a * m - a * (a - 1) / 2 + (b - a);
}

struct Spectral::Impl {
  TorusGrid grid;
  int m;
  int N;
  std::size_t spec_size;
  std::vector<short> kappa;  // spec_size * m
  double* rbuf = nullptr;
  fftw_complex* cbuf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  explicit Impl(const TorusGrid& g) : grid(g), m(g.real_dim()), N(g.nodes_per_axis()) {
    const int half = N / 2 + 1;
    spec_size = static_cast<std::size_t>(half);
    for (int a = 0; a < m - 1; ++a) spec_size *= static_cast<std::size_t>(N);
    kappa.resize(spec_size * m);
    for (std::size_t s = 0; s < spec_size; ++s) {
      std::size_t rest = s;
      const int last = static_cast<int>(rest % half);
      rest /= half;
      kappa[s * m + (m - 1)] = static_cast<short>(last);
      for (int a = m - 2; a >= 0; --a) {
        int i = static_cast<int>(rest % N);
        rest /= N;
        kappa[s * m + a] = static_cast<short>(i <= N / 2 ? i : i - N);
      }
    }
    rbuf = fftw_alloc_real(grid.size());
    cbuf = fftw_alloc_complex(spec_size);
    std::vector<int> dims(m, N);
    std::lock_guard lock(plan_mutex());
    fwd = fftw_plan_dft_r2c(m, dims.data(), rbuf, cbuf, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r(m, dims.data(), cbuf, rbuf, FFTW_ESTIMATE);
    if (!fwd || !inv) throw Error(ErrorKind::Solver, "FFTW plan creation failed");
  }

  ~Impl() {
    std::lock_guard lock(plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(rbuf);
    fftw_free(cbuf);
  }
};

Spectral::Spectral(const TorusGrid& grid) : impl_(std::make_unique<Impl>(grid)) {}
Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

const TorusGrid& Spectral::grid() const { return impl_->grid; }
std::size_t Spectral::spectral_size() const { return impl_->spec_size; }

void Spectral::forward(std::span<const double> in, std::vector<cplx>& out) const {
  require(in.size() == impl_->grid.size(), ErrorKind::Argument, "spectral forward: size mismatch");
  std::copy(in.begin(), in.end(), impl_->rbuf);
  fftw_execute(impl_->fwd);
  out.resize(impl_->spec_size);
  for (std::size_t s = 0; s < impl_->spec_size; ++s) out[s] = {impl_->cbuf[s][0], impl_->cbuf[s][1]};
}

void Spectral::inverse(std::span<const cplx> in, std::span<double> out) const {
  require(in.size() == impl_->spec_size && out.size() == impl_->grid.size(), ErrorKind::Argument,
          "spectral inverse: size mismatch");
  for (std::size_t s = 0; s < impl_->spec_size; ++s) {
    impl_->cbuf[s][0] = in[s].real();
    impl_->cbuf[s][1] = in[s].imag();
  }
  fftw_execute(impl_->inv);
  const double scale = 1.0 / static_cast<double>(impl_->grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = impl_->rbuf[i] * scale;
}

int Spectral::kappa(std::size_t s, int axis) const { return impl_->kappa[s * impl_->m + axis]; }

bool Spectral::is_nyquist(std::size_t s, int axis) const {
  return std::abs(kappa(s, axis)) == impl_->N / 2;
}

cplx Spectral::first_symbol(std::size_t s, int axis) const {
  if (is_nyquist(s, axis)) return {0.0, 0.0};
  return {0.0, kTwoPi * kappa(s, axis)};
}

double Spectral::second_symbol(std::size_t s, int a, int b) const {
  if (a == b) {
    const double k = kTwoPi * kappa(s, a);
    return -k * k;
  }
  return (first_symbol(s, a) * first_symbol(s, b)).real();
}

std::vector<double> Spectral::first_derivative(std::span<const double> v, int axis) const {
  std::vector<cplx> spec;
  forward(v, spec);
  for (std::size_t s = 0; s < spec.size(); ++s) spec[s] *= first_symbol(s, axis);
  std::vector<double> out(v.size());
  inverse(spec, out);
  return out;
}

std::vector<double> Spectral::second_derivative(std::span<const double> v, int a, int b) const {
  std::vector<cplx> spec;
  forward(v, spec);
  for (std::size_t s = 0; s < spec.size(); ++s) spec[s] *= second_symbol(s, a, b);
  std::vector<double> out(v.size());
  inverse(spec, out);
  return out;
}

std::vector<std::vector<double>> Spectral::hessian(std::span<const double> v) const {
  const int m = impl_->m;
  std::vector<cplx> spec, work(impl_->spec_size);
  forward(v, spec);
  std::vector<std::vector<double>> out(pair_count(m), std::vector<double>(v.size()));
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      for (std::size_t s = 0; s < spec.size(); ++s) work[s] = spec[s] * second_symbol(s, a, b);
      inverse(work, out[pair_index(m, a, b)]);
    }
  }
  return out;
}

std::vector<double> Spectral::laplacian(std::span<const double> v) const {
  std::vector<cplx> spec;
  forward(v, spec);
  for (std::size_t s = 0; s < spec.size(); ++s) {
    double sym = 0.0;
    for (int a = 0; a < impl_->m; ++a) sym += second_symbol(s, a, a);
    spec[s] *= sym;
  }
  std::vector<double> out(v.size());
  inverse(spec, out);
  return out;
}

std::vector<double> Spectral::solve_constant_coefficient(std::span<const double> rhs,
                                                         std::span<const double> coeff) const {
  const int m = impl_->m;
  require(static_cast<int>(coeff.size()) == pair_count(m), ErrorKind::Argument,
          "constant-coefficient solve: wrong coefficient count");
  std::vector<cplx> spec;
  forward(rhs, spec);
  for (std::size_t s = 0; s < spec.size(); ++s) {
    double sym = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) sym += coeff[pair_index(m, a, b)] * second_symbol(s, a, b);
    if (s == 0) {
      spec[s] = 0.0;
    } else {
      require(std::abs(sym) > 1e-14, ErrorKind::Solver, "constant-coefficient operator is singular");
      spec[s] /= sym;
    }
  }
  std::vector<double> out(rhs.size());
  inverse(spec, out);
  return out;
}

std::vector<double> Spectral::interpolate(std::span<const double> v, std::span<const Point> points) const {
  const int m = impl_->m;
  const int N = impl_->N;
  std::vector<cplx> spec;
  forward(v, spec);
  const double scale = 1.0 / static_cast<double>(impl_->grid.size());
  std::vector<double> out(points.size());
  // per axis table of exp(2 pi i k x) for k = -N/2..N/2
  std::vector<cplx> table(static_cast<std::size_t>(m) * (N + 1));
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (int a = 0; a < m; ++a)
      for (int k = -N / 2; k <= N / 2; ++k)
        table[a * (N + 1) + (k + N / 2)] = std::polar(1.0, kTwoPi * k * points[p][a]);
    double acc = 0.0;
    for (std::size_t s = 0; s < spec.size(); ++s) {
      cplx e = spec[s];
      for (int a = 0; a < m; ++a) e *= table[a * (N + 1) + (kappa(s, a) + N / 2)];
      const int klast = kappa(s, m - 1);
      const double w = (klast == 0 || klast == N / 2) ? 1.0 : 2.0;
      acc += w * e.real();
    }
    out[p] = acc * scale;
  }
  return out;
}

}  // namespace cmalab
