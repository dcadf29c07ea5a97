#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace kexpm {

/// Thrown when an adaptive quadrature fails to meet its tolerance within budget.
class QuadratureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Gauss(7)/Kronrod(15) rule on [-1,1].  Nodes and weights are the classical
// QUADPACK values; exactness (degree 22 for the Kronrod part) is verified in
// the unit tests, which pins down the constants.
inline constexpr double kGkNode[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename T>
inline double abs_of(const T& x) {
  return std::abs(x);
}

// One Gauss-Kronrod panel: Kronrod value plus |K15 - G7| as error estimate.
template <typename F, typename T>
void gk15_panel(F&& f, double a, double b, T& kronrod, double& err) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  T gauss{};
  T kron{};
  kron += kKronrodW[7] * f(mid);
  gauss += kGaussW[3] * f(mid);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGkNode[i];
    const T fsum = f(mid - dx) + f(mid + dx);
    kron += kKronrodW[i] * fsum;
    if (i % 2 == 1) gauss += kGaussW[i / 2] * fsum;
  }
  kronrod = half * kron;
  err = std::abs(half) * abs_of<T>(kron - gauss);
}

template <typename F, typename T>
T gk_adaptive(F& f, double a, double b, double tol, int depth, std::size_t& panels) {
  if (++panels > (std::size_t{1} << 20))
    throw QuadratureError("adaptive quadrature: panel budget exceeded");
  T value;
  double err;
  gk15_panel(f, a, b, value, err);
  // The relative floor keeps roundoff-limited panels (large integrand values
  // near an integrable peak) from forcing unreachable absolute tolerances.
  if (err <= tol || err <= 1e-12 * abs_of<T>(value)) return value;
  if (depth <= 0)
    throw QuadratureError("adaptive quadrature: tolerance not met at maximum depth");
  const double mid = 0.5 * (a + b);
  return gk_adaptive<F, T>(f, a, mid, 0.5 * tol, depth - 1, panels) +
         gk_adaptive<F, T>(f, mid, b, 0.5 * tol, depth - 1, panels);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a,b] to absolute tolerance.
template <typename F>
auto integrate(F&& f, double a, double b, double abs_tol, int max_depth = 48)
    -> decltype(f(a)) {
  using T = decltype(f(a));
  if (a == b) return T{};
  std::size_t panels = 0;
  return detail::gk_adaptive<F, T>(f, a, b, abs_tol, max_depth, panels);
}

/// Integrates f along the straight segment from z0 to z1 in the complex plane.
template <typename F>
std::complex<double> integrate_segment(F&& f, std::complex<double> z0,
                                       std::complex<double> z1, double abs_tol,
                                       int max_depth = 48) {
  const std::complex<double> dz = z1 - z0;
  auto g = [&](double t) { return f(z0 + t * dz) * dz; };
  return integrate(g, 0.0, 1.0, abs_tol, max_depth);
}

/// Composite Simpson rule with n (even) subintervals from tabulated values
/// f[0..n] at equispaced nodes spanning an interval of length len.
inline double simpson_tabulated(const double* f, int n, double len) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("simpson_tabulated: subinterval count must be even and >= 2");
  double odd = 0.0, even = 0.0;
  for (int i = 1; i < n; i += 2) odd += f[i];
  for (int i = 2; i < n; i += 2) even += f[i];
  const double h = len / n;
  return h / 3.0 * (f[0] + f[n] + 4.0 * odd + 2.0 * even);
}

}  // namespace kexpm
