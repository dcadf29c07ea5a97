#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "kexpm/elliptic.hpp"
#include "kexpm/quadrature.hpp"

namespace kexpm {

/// Rectangle [a,b] x [-c,c] enclosing the field of values of an operator:
/// a and b are the extreme eigenvalues of the Hermitian part, c the largest
/// magnitude among eigenvalues of the skew-Hermitian part.
struct SpectralBox {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  bool estimated = false;  // true when obtained from a Lanczos sweep with margin

  double alpha() const { return 0.5 * (b - a); }
  double beta() const { return c; }
  double center() const { return 0.5 * (a + b); }
  bool degenerate() const { return !(b > a) || !(c > 0.0); }
};

/// Parameters of the exterior-of-rectangle conformal map.
struct ConformalParams {
  double m;        // modulus solving the aspect-ratio equation
  double m1;       // 1 - m
  double K, E;     // complete integrals at m
  double Kp, Ep;   // complete integrals at m1
  double alpha;    // rectangle half-width
  double beta;     // rectangle half-height
  double lambda;   // (E'-mK')/alpha == (E-m1 K)/beta
  double capacity; // logarithmic capacity 1/(2 lambda)
};

/// g(m) = f(m)/f(1-m) with f(m) = E(m)-(1-m)K(m); strictly increasing from 0
/// to infinity on (0,1).  The rectangle aspect ratio beta/alpha equals g(m).
inline double modulus_equation(double m) {
  return elliptic_f(m) / elliptic_f(1.0 - m);
}

/// Unique m in (0,1) with g(m) = ratio, by bisection.
inline double solve_modulus(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio))
    throw std::domain_error("solve_modulus: aspect ratio must be positive and finite");
  double lo = 1e-15, hi = 1.0 - 1e-15;
  if (ratio <= modulus_equation(lo)) return lo;
  if (ratio >= modulus_equation(hi)) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = modulus_equation(mid);
    if (g == ratio) return mid;
    (g < ratio ? lo : hi) = mid;
    const double width = hi - lo;
    if (width <= 1e-14 && width <= 1e-13 * std::min(mid, 1.0 - mid))
      return 0.5 * (lo + hi);
  }
  throw std::runtime_error("solve_modulus: bisection did not converge in 200 iterations");
}

/// Solves the modulus equation for the box and assembles the map parameters.
inline ConformalParams build_conformal(const SpectralBox& box) {
  if (box.degenerate())
    throw std::invalid_argument(
        "build_conformal: box is degenerate (b <= a or c <= 0); use the "
        "Hermitian or skew-Hermitian bound instead");
  ConformalParams cp;
  cp.alpha = box.alpha();
  cp.beta = box.beta();
  cp.m = solve_modulus(cp.beta / cp.alpha);
  cp.m1 = 1.0 - cp.m;
  const auto km = complete_elliptic(cp.m);
  const auto kp = complete_elliptic(cp.m1);
  cp.K = km.K;
  cp.E = km.E;
  cp.Kp = kp.K;
  cp.Ep = kp.E;
  cp.lambda = elliptic_f(cp.m1) / cp.alpha;
  cp.capacity = 0.5 / cp.lambda;
  return cp;
}

/// Integral of sqrt(m+t^2)/sqrt(1+t^2) over [0, upper].  For large upper
/// limits the integrand is split as 1 + (decaying correction) so the adaptive
/// rule never chases an O(upper) value at absolute tolerance.
inline double psi_integral(double m, double upper) {
  if (upper <= 0.0) return 0.0;
  if (upper <= 4.0) {
    return integrate(
        [m](double t) { return std::sqrt(m + t * t) / std::sqrt(1.0 + t * t); },
        0.0, upper, 1e-12);
  }
  const double corr = integrate(
      [m](double t) {
        const double p = std::sqrt(m + t * t);
        const double q = std::sqrt(1.0 + t * t);
        return (m - 1.0) / (q * (p + q));
      },
      0.0, upper, 1e-12);
  return upper + corr;
}

/// Leftmost real coordinate of the level curve C_r: the image of u = -r under
/// the inverse map.
inline double psi_minus_r(const ConformalParams& cp, const SpectralBox& box, double r) {
  if (!(r > 1.0)) throw std::domain_error("psi_minus_r: level radius must exceed 1");
  const double upper = 0.5 * (r - 1.0 / r);
  return box.a - psi_integral(cp.m, upper) / cp.lambda;
}

namespace detail {

// Solves dn(i y | m) = target (> 1) for y on (0, K') by bisection.
inline double dn_axis_inverse(const ConformalParams& cp, double target) {
  auto dn_axis = [&](double y) {
    return jacobi_scd(Complex(0.0, y), cp.m).dn.real();
  };
  double lo = 0.0;
  double hi = cp.Kp * 0.5;
  while (dn_axis(hi) < target) {
    hi = cp.Kp - 0.25 * (cp.Kp - hi);
    if (cp.Kp - hi < 4.0 * kPoleGuard)
      throw std::runtime_error("level_curve: radius too large for pole guard");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * cp.Kp; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dn_axis(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Samples n points of the level curve C_r, ordered by the angle of u = r e^{i theta}.
/// The auxiliary parameter sigma is found on the segment (0, iK') at theta = 0
/// and continued in theta by damped Newton on dn(sigma|m) = (u + 1/u)/2.
inline std::vector<Complex> level_curve(const ConformalParams& cp,
                                        const SpectralBox& box, double r, int n) {
  if (!(r > 1.0)) throw std::domain_error("level_curve: level radius must exceed 1");
  if (n < 8) throw std::invalid_argument("level_curve: need at least 8 samples");

  const double m = cp.m;
  const Complex i_unit(0.0, 1.0);
  std::vector<Complex> points(n);

  auto z_of_sigma = [&](Complex sigma) {
    const Complex eps = jacobi_epsilon(sigma, m);
    return box.center() + cp.alpha - i_unit / cp.lambda * (eps - cp.m1 * sigma);
  };

  Complex sigma(0.0, detail::dn_axis_inverse(cp, 0.5 * (r + 1.0 / r)));
  points[0] = z_of_sigma(sigma);

  const double x_margin = 1e-9;
  for (int j = 1; j < n; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / n;
    const Complex u = std::polar(r, theta);
    const Complex target = 0.5 * (u + 1.0 / u);
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      const auto t = jacobi_scd(sigma, m);
      const Complex g = t.dn - target;
      if (std::abs(g) <= 1e-12 * (1.0 + std::abs(target))) {
        converged = true;
        break;
      }
      const Complex dg = -m * t.sn * t.cn;
      Complex step = -g / dg;
      // Damp so the iterate stays inside the fundamental rectangle and the
      // residual does not grow.
      for (int halvings = 0; halvings < 40; ++halvings) {
        const Complex cand = sigma + step;
        const bool inside = std::abs(cand.real()) <= cp.K + x_margin &&
                            cand.imag() >= x_margin && cand.imag() <= 2.0 * cp.Kp - x_margin;
        bool acceptable = false;
        if (inside) {
          try {
            acceptable = std::abs(jacobi_scd(cand, m).dn - target) <= std::abs(g);
          } catch (const PoleProximityError&) {
          }
        }
        if (acceptable) break;
        step *= 0.5;
      }
      sigma += step;
    }
    if (!converged)
      throw std::runtime_error("level_curve: Newton continuation stalled at theta = " +
                               std::to_string(theta));
    points[j] = z_of_sigma(sigma);
  }
  return points;
}

}  // namespace kexpm
