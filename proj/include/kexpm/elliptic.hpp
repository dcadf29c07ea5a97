#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kexpm/quadrature.hpp"

namespace kexpm {

using Complex = std::complex<double>;

/// Argument within the pole guard radius of a lattice pole of sn/cn/dn.
class PoleProximityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Complete integrals of the first and second kind at parameter m.
struct EllipticPair {
  double m;
  double K;
  double E;
};

/// Values of the three basic Jacobi elliptic functions at one argument.
struct JacobiTriple {
  Complex sn;
  Complex cn;
  Complex dn;
};

namespace detail {

inline constexpr double kModulusClamp = 1e-12;
inline constexpr double kPoleGuard = 1e-8;
inline constexpr double kAgmGap = 1e-15;

inline void require_modulus(double m) {
  if (!(m > 0.0 && m < 1.0))
    throw std::domain_error("elliptic: parameter m must lie in (0,1)");
}

// AGM scale sequence shared by the complete integrals and the Landen
// transformation.  a[i], c[i] with c[i] = (a[i-1]-b[i-1])/2; returns the number
// of levels used.
struct AgmScales {
  double a[24];
  double c[24];
  int levels;
};

inline AgmScales agm_scales(double m) {
  AgmScales s;
  s.a[0] = 1.0;
  s.c[0] = std::sqrt(m);
  double b = std::sqrt(1.0 - m);
  int n = 0;
  while (s.c[n] > kAgmGap && n + 1 < 24) {
    s.c[n + 1] = 0.5 * (s.a[n] - b);
    const double an = 0.5 * (s.a[n] + b);
    b = std::sqrt(s.a[n] * b);
    s.a[n + 1] = an;
    ++n;
  }
  s.levels = n;
  return s;
}

}  // namespace detail

/// K(m) and E(m) by the arithmetic-geometric mean; near the ends of (0,1) the
/// standard series/logarithmic asymptotics take over.
inline EllipticPair complete_elliptic(double m) {
  detail::require_modulus(m);
  const double pi_half = std::numbers::pi / 2.0;
  if (m < detail::kModulusClamp) {
    const double K = pi_half * (1.0 + m * (0.25 + m * 9.0 / 64.0));
    const double E = pi_half * (1.0 - m * (0.25 + m * 3.0 / 64.0));
    return {m, K, E};
  }
  if (m > 1.0 - detail::kModulusClamp) {
    const double m1 = 1.0 - m;
    const double L = 0.5 * std::log(16.0 / m1);
    const double K = L + 0.25 * m1 * (L - 1.0);
    const double E = 1.0 + 0.5 * m1 * (L - 0.5);
    return {m, K, E};
  }
  const auto s = detail::agm_scales(m);
  double sum = 0.5 * m;  // 2^{-1} c_0^2
  double p = 1.0;
  for (int n = 1; n <= s.levels; ++n) {
    sum += p * s.c[n] * s.c[n];
    p *= 2.0;
  }
  const double K = pi_half / s.a[s.levels];
  return {m, K, K * (1.0 - sum)};
}

/// f(m) = E(m) - (1-m) K(m), evaluated without the cancellation the direct
/// difference suffers for small m.  Increasing from 0 to 1 on (0,1).
inline double elliptic_f(double m) {
  detail::require_modulus(m);
  const double pi = std::numbers::pi;
  if (m < detail::kModulusClamp) return pi * m / 4.0 * (1.0 + m / 8.0);
  if (m > 1.0 - detail::kModulusClamp) {
    const auto ke = complete_elliptic(m);
    return ke.E - (1.0 - m) * ke.K;
  }
  const auto s = detail::agm_scales(m);
  double sum = 0.0;
  double p = 1.0;
  for (int n = 1; n <= s.levels; ++n) {
    sum += p * s.c[n] * s.c[n];
    p *= 2.0;
  }
  const double K = (pi / 2.0) / s.a[s.levels];
  return K * (0.5 * m - sum);
}

/// Incomplete integral of the first kind F(phi, m) along the straight segment
/// from 0 to phi.
inline Complex incomplete_f(Complex phi, double m) {
  detail::require_modulus(m);
  if (phi == Complex{}) return {};
  auto integrand = [m](Complex theta) {
    const Complex s = std::sin(theta);
    return 1.0 / std::sqrt(1.0 - m * s * s);
  };
  return integrate_segment(integrand, Complex{}, phi,
                           1e-13 * (1.0 + std::abs(phi)));
}

namespace detail {

struct RealTriple {
  double sn, cn, dn;
};

// Real-argument sn/cn/dn by the descending Landen transformation, with the
// argument folded into [0, K] first.
inline RealTriple jacobi_real(double u, double m) {
  m = std::clamp(m, kModulusClamp, 1.0 - kModulusClamp);
  const auto s = agm_scales(m);
  const double K = (std::numbers::pi / 2.0) / s.a[s.levels];

  double sig_s = 1.0, sig_c = 1.0;
  if (u < 0) {
    u = -u;
    sig_s = -sig_s;
  }
  u = std::fmod(u, 4.0 * K);
  if (u >= 2.0 * K) {
    u -= 2.0 * K;
    sig_s = -sig_s;
    sig_c = -sig_c;
  }
  if (u > K) {
    u = 2.0 * K - u;
    sig_c = -sig_c;
  }

  double phi = std::ldexp(1.0, s.levels) * s.a[s.levels] * u;
  for (int n = s.levels; n >= 1; --n) {
    const double t = std::clamp(s.c[n] / s.a[n] * std::sin(phi), -1.0, 1.0);
    phi = 0.5 * (phi + std::asin(t));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  const double dn = std::sqrt(1.0 - m * sn * sn);
  return {sig_s * sn, sig_c * cn, dn};
}

// Distance from the reduced coordinates of u to the nearest pole of the
// elliptic functions (x = 0 mod 2K, y = K' mod 2K').
inline double pole_distance(double x, double y, double K, double Kp) {
  const double dx = x - 2.0 * K * std::round(x / (2.0 * K));
  const double yy = y - Kp;
  const double dy = yy - 2.0 * Kp * std::round(yy / (2.0 * Kp));
  return std::hypot(dx, dy);
}

}  // namespace detail

/// sn, cn, dn at complex argument u.  The real and imaginary directions are
/// evaluated by the Landen transformation at parameters m and 1-m, then
/// combined through the quotient formulas for a complex argument; the
/// imaginary parts of cn and dn carry negative signs, which is the variant
/// consistent with sn^2+cn^2 = 1 and the derivative identities.
inline JacobiTriple jacobi_scd(Complex u, double m) {
  detail::require_modulus(m);
  const double mc = std::clamp(m, detail::kModulusClamp, 1.0 - detail::kModulusClamp);
  const double m1 = 1.0 - mc;
  const double x = u.real();
  const double y = u.imag();

  const double K = complete_elliptic(mc).K;
  const double Kp = complete_elliptic(m1).K;
  if (detail::pole_distance(x, y, K, Kp) < detail::kPoleGuard)
    throw PoleProximityError("jacobi_scd: argument within pole guard radius");

  const auto r = detail::jacobi_real(x, mc);
  if (y == 0.0) return {r.sn, r.cn, r.dn};

  const auto q = detail::jacobi_real(y, m1);
  const double den = q.cn * q.cn + mc * r.sn * r.sn * q.sn * q.sn;
  const Complex sn(r.sn * q.dn / den, r.cn * r.dn * q.sn * q.cn / den);
  const Complex cn(r.cn * q.cn / den, -r.sn * r.dn * q.sn * q.dn / den);
  const Complex dn(r.dn * q.cn * q.dn / den, -mc * r.sn * r.cn * q.sn / den);
  return {sn, cn, dn};
}

namespace detail {

inline double segment_pole_distance(Complex z0, Complex z1, double K, double Kp) {
  const double xlo = std::min(z0.real(), z1.real());
  const double xhi = std::max(z0.real(), z1.real());
  const double ylo = std::min(z0.imag(), z1.imag());
  const double yhi = std::max(z0.imag(), z1.imag());
  const long llo = static_cast<long>(std::floor(xlo / (2.0 * K))) - 1;
  const long lhi = static_cast<long>(std::ceil(xhi / (2.0 * K))) + 1;
  const long nlo = static_cast<long>(std::floor((ylo - Kp) / (2.0 * Kp))) - 1;
  const long nhi = static_cast<long>(std::ceil((yhi - Kp) / (2.0 * Kp))) + 1;
  const Complex d = z1 - z0;
  const double dd = std::norm(d);
  double best = std::numeric_limits<double>::infinity();
  for (long l = llo; l <= lhi; ++l) {
    for (long n = nlo; n <= nhi; ++n) {
      const Complex p(2.0 * K * l, Kp * (2.0 * n + 1.0));
      double t = dd > 0 ? std::clamp(((p - z0) * std::conj(d)).real() / dd, 0.0, 1.0) : 0.0;
      best = std::min(best, std::abs(z0 + t * d - p));
    }
  }
  return best;
}

}  // namespace detail

/// Jacobi epsilon function E(sigma|m) = integral of dn^2 from 0 to sigma along
/// the straight segment.  When the segment would pass the pole at iK' (targets
/// above the Im = K' line), the quasi-periodicity E(u + 2iK') = E(u) +
/// 2i(K'-E') reroutes the path below the pole.
inline Complex jacobi_epsilon(Complex sigma, double m, bool allow_reflect = true) {
  detail::require_modulus(m);
  if (sigma == Complex{}) return {};
  const double mc = std::clamp(m, detail::kModulusClamp, 1.0 - detail::kModulusClamp);
  const auto km = complete_elliptic(mc);
  const auto kp = complete_elliptic(1.0 - mc);
  const double dist = detail::segment_pole_distance({}, sigma, km.K, kp.K);
  if (dist < detail::kPoleGuard) {
    if (allow_reflect && sigma.imag() > kp.K) {
      const Complex shift(0.0, 2.0 * (kp.K - kp.E));
      return shift - jacobi_epsilon(Complex(0.0, 2.0 * kp.K) - sigma, m, false);
    }
    throw PoleProximityError("jacobi_epsilon: integration path within pole guard radius");
  }
  auto dn2 = [mc](Complex z) {
    const Complex dn = jacobi_scd(z, mc).dn;
    return dn * dn;
  };
  return integrate_segment(dn2, Complex{}, sigma, 1e-12);
}

}  // namespace kexpm
