// Test-side numerical oracles, kept independent of the library's own
// evaluation paths.
#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

namespace oracles {

/// Romberg integration of a smooth real integrand.
template <typename F>
double romberg(F&& f, double a, double b, double tol = 1e-14, int max_level = 22) {
  double table[24][24];
  double h = b - a;
  table[0][0] = 0.5 * h * (f(a) + f(b));
  long n = 1;
  for (int i = 1; i <= max_level; ++i) {
    h *= 0.5;
    double sum = 0.0;
    for (long j = 1; j <= n; ++j) sum += f(a + (2 * j - 1) * h);
    table[i][0] = 0.5 * table[i - 1][0] + h * sum;
    double p4 = 4.0;
    for (int k = 1; k <= i; ++k) {
      table[i][k] = table[i][k - 1] + (table[i][k - 1] - table[i - 1][k - 1]) / (p4 - 1.0);
      p4 *= 4.0;
    }
    if (i > 3 && std::abs(table[i][i] - table[i - 1][i - 1]) < tol)
      return table[i][i];
    n *= 2;
  }
  return table[max_level][max_level];
}

/// Independent evaluation of (sn, cn, dn) at a complex argument by RK4
/// integration of the defining ODE system
///   sn' = cn dn,  cn' = -sn dn,  dn' = -m sn cn,  (sn,cn,dn)(0) = (0,1,1)
/// along the straight path from 0 to u.
struct JacobiOde {
  std::complex<double> sn, cn, dn;
};

inline JacobiOde jacobi_ode(std::complex<double> u, double m, int steps = 4000) {
  using C = std::complex<double>;
  struct State {
    C s, c, d;
  };
  auto rhs = [m](const State& y, C dir) {
    return State{dir * y.c * y.d, dir * (-y.s * y.d), dir * (-m * y.s * y.c)};
  };
  State y{C(0), C(1), C(1)};
  const double h = 1.0 / steps;
  const C dir = u;
  auto axpy = [](const State& y, double a, const State& k) {
    return State{y.s + a * k.s, y.c + a * k.c, y.d + a * k.d};
  };
  for (int i = 0; i < steps; ++i) {
    const State k1 = rhs(y, dir);
    const State k2 = rhs(axpy(y, 0.5 * h, k1), dir);
    const State k3 = rhs(axpy(y, 0.5 * h, k2), dir);
    const State k4 = rhs(axpy(y, h, k3), dir);
    y.s += h / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
    y.c += h / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);
    y.d += h / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
  }
  return {y.s, y.c, y.d};
}

}  // namespace oracles
