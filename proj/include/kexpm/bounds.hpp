#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kexpm/conformal.hpp"
#include "kexpm/krylov.hpp"
#include "kexpm/operators.hpp"

namespace kexpm {

enum class BoundMode { general, skew };
enum class SkewQMethod { quartic, simplified };

inline constexpr double kCrouzeixConstant = 11.08;
inline constexpr double kLogOverflow = 700.0;

/// Inputs shared by the bound evaluations for one (operator, tau) pair.
/// In skew mode the box carries the spectral interval [a,b] of the Hermitian
/// generator H (the operator is e^{i tau H}) and c is zero.
struct BoundContext {
  SpectralBox box;
  std::optional<ConformalParams> cp;
  double tau = 0.0;
  double norm_a = 0.0;
  BoundMode mode = BoundMode::general;
  double rho_skew = 0.0;               // (b-a)/4 in skew mode
  std::optional<double> rho_disk;      // radius of a disk |z-rho|<rho containing W(A)
  double crouzeix_q = kCrouzeixConstant;
  int simpson_n = 10;
};

inline BoundContext make_context(const SpectralBox& box, double tau, double norm_a,
                                 BoundMode mode = BoundMode::general,
                                 std::optional<double> rho_disk = {}) {
  if (!(tau > 0.0)) throw std::domain_error("make_context: tau must be positive");
  BoundContext ctx;
  ctx.box = box;
  ctx.tau = tau;
  ctx.norm_a = norm_a;
  ctx.mode = mode;
  ctx.rho_disk = rho_disk;
  if (mode == BoundMode::skew) {
    ctx.rho_skew = 0.25 * (box.b - box.a);
  } else if (!box.degenerate()) {
    ctx.cp = build_conformal(box);
  }
  return ctx;
}

namespace detail {

inline double from_log(double lg) {
  return lg > kLogOverflow ? std::numeric_limits<double>::infinity() : std::exp(lg);
}

}  // namespace detail

/// Rectangle [a,b] x [-c,c] enclosing the field of values.  Dimensions up to
/// 2000 take the exact dense path; larger operators get a 60-step Lanczos
/// estimate with a 1% outward margin, flagged as estimated.
inline SpectralBox spectral_box(const LinearOperator& op) {
  const Eigen::Index n = op.dim();
  const Structure tag = op.structure();

  if (n <= 2000) {
    const Matrix D = operator_to_dense(op);
    SpectralBox box;
    if (tag == Structure::skew_hermitian) {
      box.a = box.b = 0.0;
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> eh(0.5 * (D + D.adjoint()),
                                               Eigen::EigenvaluesOnly);
      box.a = eh.eigenvalues().minCoeff();
      box.b = eh.eigenvalues().maxCoeff();
    }
    if (tag == Structure::hermitian) {
      box.c = 0.0;
    } else {
      const Matrix S = (D - D.adjoint()) / std::complex<double>(0.0, 2.0);
      Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
      box.c = std::max(std::abs(es.eigenvalues().minCoeff()),
                       std::abs(es.eigenvalues().maxCoeff()));
    }
    return box;
  }

  // sparse path: Lanczos extremal-eigenvalue estimation on the Hermitian and
  // skew-Hermitian parts
  struct PartOperator final : LinearOperator {
    const LinearOperator* base;
    bool herm;
    Eigen::Index dim() const override { return base->dim(); }
    void apply(const Vector& x, Vector& y) const override {
      Vector ax(base->dim()), ahx(base->dim());
      base->apply(x, ax);
      base->apply_adjoint(x, ahx);
      if (herm)
        y = 0.5 * (ax + ahx);
      else
        y = (ax - ahx) / std::complex<double>(0.0, 2.0);
    }
    void apply_adjoint(const Vector& x, Vector& y) const override { apply(x, y); }
    double norm_estimate() const override { return base->norm_estimate(); }
    Structure structure() const override { return Structure::hermitian; }
  };

  Vector v0(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v0[i] = std::cos(0.7 * static_cast<double>(i) + 0.3);
  v0 /= v0.norm();
  const int steps = static_cast<int>(std::min<Eigen::Index>(60, n));

  SpectralBox box;
  box.estimated = true;
  PartOperator part;
  part.base = &op;

  if (tag == Structure::skew_hermitian) {
    box.a = box.b = 0.0;
  } else {
    part.herm = true;
    const auto dec = lanczos(part, v0, steps);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dec.tridiag(dec.k),
                                                      Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    const double margin = 0.01 * std::max(hi - lo, 1e-300);
    box.a = lo - margin;
    box.b = hi + margin;
  }
  if (tag == Structure::hermitian) {
    box.c = 0.0;
  } else {
    part.herm = false;
    const auto dec = lanczos(part, v0, steps);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dec.tridiag(dec.k),
                                                      Eigen::EigenvaluesOnly);
    const double cmax = std::max(std::abs(es.eigenvalues().minCoeff()),
                                 std::abs(es.eigenvalues().maxCoeff()));
    box.c = 1.01 * cmax;
  }
  return box;
}

inline SpectralBox spectral_box(const Matrix& a, Structure tag = Structure::general) {
  DenseOperator op(a, tag);
  return spectral_box(op);
}

/// Context whose rectangle encloses the field of values of the reduced matrix
/// H_j instead of the full operator (the decay bound applies to either; the
/// default experiments use the operator box).
inline BoundContext context_from_reduced(const KrylovDecomposition& dec, int j, double tau,
                                         double norm_a,
                                         BoundMode mode = BoundMode::general) {
  return make_context(spectral_box(dec.reduced(j)), tau, norm_a, mode);
}

/// A posteriori estimate: factor * e^{-min(nu,0) tau} * Simpson(|h(t)|, [0,tau]).
/// The factor is h_{k+1,k}; in skew mode it is additionally capped by the
/// half-range of the Ritz values (the shifted-operator norm bound), which at
/// k = 1 degenerates and the residual coefficient alone is used.
inline double aposteriori_estimate(const KrylovDecomposition& dec, int j, double tau,
                                   double nu, BoundMode mode, int simpson_n = 10) {
  if (!(tau > 0.0)) throw std::domain_error("aposteriori_estimate: tau must be positive");
  if (simpson_n < 2 || simpson_n % 2 != 0)
    throw std::invalid_argument("aposteriori_estimate: Simpson subintervals must be even");
  double factor = dec.subdiag(j);
  if (factor == 0.0) return 0.0;
  if (mode == BoundMode::skew && dec.tridiagonal && j >= 2) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dec.tridiag(j),
                                                      Eigen::EigenvaluesOnly);
    const double half = 0.5 * (es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff());
    if (half > 0.0) factor = std::min(factor, half);
  }
  std::vector<double> ts(simpson_n + 1);
  for (int i = 0; i <= simpson_n; ++i) ts[i] = tau * i / simpson_n;
  const auto hs = h_entry_series(dec, j, ts,
                                 mode == BoundMode::skew ? ApproxMode::unitary
                                                         : ApproxMode::real_exponential);
  std::vector<double> mags(simpson_n + 1);
  for (int i = 0; i <= simpson_n; ++i) mags[i] = std::abs(hs.values[i]);
  const double integral = simpson_tabulated(mags.data(), simpson_n, tau);
  return factor * std::exp(-std::min(nu, 0.0) * tau) * integral;
}

/// Leftmost point z~ of the level curve with r = 1/q, from the rectangle data.
inline double tilde_z(const ConformalParams& cp, double a, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("tilde_z: q must lie in (0,1)");
  const double upper = 0.5 * (1.0 / q - q);
  return a - psi_integral(cp.m, upper) / cp.lambda;
}

/// Crude lower bound on z~ obtained from sqrt(m+s^2) <= sqrt(1+s^2).
inline double tilde_z_crude(const ConformalParams& cp, double a, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("tilde_z_crude: q must lie in (0,1)");
  return a - 0.5 * (1.0 / q - q) / cp.lambda;
}

namespace detail {

inline double apriori_nonhermitian_log(const BoundContext& ctx, int k, double q,
                                       double zt) {
  return std::log(2.0 * ctx.crouzeix_q * ctx.tau * ctx.norm_a) +
         (k - 1) * std::log(q) - std::log1p(-q) - ctx.tau * std::min(ctx.box.a, 0.0) -
         ctx.tau * zt;
}

}  // namespace detail

/// A priori bound 2 Q tau ||A|| q^{k-1}/(1-q) e^{-tau min(a,0) - tau z~} for a
/// nondegenerate rectangle; evaluates in log space and reports overflow as inf.
inline double apriori_nonhermitian(const BoundContext& ctx, int k, double q) {
  if (k < 1) throw std::domain_error("apriori_nonhermitian: k must be >= 1");
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("apriori_nonhermitian: q must lie in (0,1)");
  if (!ctx.cp) throw std::logic_error("apriori_nonhermitian: context has no conformal map");
  const double zt = tilde_z(*ctx.cp, ctx.box.a, q);
  return detail::from_log(detail::apriori_nonhermitian_log(ctx, k, q, zt));
}

/// Same bound with the crude z~ (always >= the quadrature version).
inline double apriori_nonhermitian_crude(const BoundContext& ctx, int k, double q) {
  if (k < 1) throw std::domain_error("apriori_nonhermitian: k must be >= 1");
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("apriori_nonhermitian: q must lie in (0,1)");
  if (!ctx.cp) throw std::logic_error("apriori_nonhermitian: context has no conformal map");
  const double zt = tilde_z_crude(*ctx.cp, ctx.box.a, q);
  return detail::from_log(detail::apriori_nonhermitian_log(ctx, k, q, zt));
}

/// Rate that zeroes the crude exponent for positive definite operators:
/// q = 1/(sqrt(a^2 lambda^2 + 1) + a lambda).
inline double crude_q(const ConformalParams& cp, double a) {
  if (!(a > 0.0)) throw std::domain_error("crude_q: requires a > 0");
  const double al = a * cp.lambda;
  return 1.0 / (std::sqrt(al * al + 1.0) + al);
}

/// Root of (k-1)q + (2-k)q^2 = C(1-q) sqrt((1-q^2)^2 + 4 m q^2), C = tau/(2 lambda):
/// the stationary point of the k-th bound as a function of q.
inline double optimal_q_nonhermitian(const BoundContext& ctx, int k) {
  if (k < 1) throw std::domain_error("optimal_q_nonhermitian: k must be >= 1");
  if (!ctx.cp) throw std::logic_error("optimal_q_nonhermitian: context has no conformal map");
  const double C = ctx.tau / (2.0 * ctx.cp->lambda);
  const double m = ctx.cp->m;
  auto f = [&](double q) {
    const double one_q2 = 1.0 - q * q;
    return (k - 1) * q + (2 - k) * q * q -
           C * (1.0 - q) * std::sqrt(one_q2 * one_q2 + 4.0 * m * q * q);
  };
  double lo = 1e-12, hi = 1.0 - 1e-12;
  if (f(lo) >= 0.0) return lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-15) return 0.5 * (lo + hi);
  }
  throw std::runtime_error("optimal_q_nonhermitian: bisection did not converge");
}

/// Threshold rate for the nearly-Hermitian regime: the unique q with
/// a lambda = psi_integral(m, (1/q - q)/2), where a lambda = 2 f(1-m)/(kappa-1).
inline double threshold_q_m0(double kappa, double m) {
  if (!(kappa > 1.0)) throw std::domain_error("threshold_q_m0: kappa must exceed 1");
  detail::require_modulus(m);
  const double a_lambda = 2.0 * elliptic_f(1.0 - m) / (kappa - 1.0);
  auto excess = [&](double q) {
    return psi_integral(m, 0.5 * (1.0 / q - q)) - a_lambda;
  };
  double lo = 0.5 / (a_lambda + 2.0);  // integral here is >= a_lambda + 0.5
  double hi = 1.0 - 1e-12;
  if (excess(lo) < 0.0) lo = 1e-12;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-14) break;
  }
  return 0.5 * (lo + hi);
}

/// Closed-form limit of the threshold rate as m -> 0.
inline double threshold_q_closed_form(double kappa) {
  if (!(kappa > 1.0)) throw std::domain_error("threshold_q_closed_form: kappa must exceed 1");
  const double s = std::sqrt(kappa);
  return (s - 1.0) / (s + 1.0);
}

/// Skew-Hermitian a priori bound
///   4 min{1/(1-q^2), tau rho / q} / (1-q) * q^k * e^{tau rho (1/q - q)}.
inline double apriori_skew(double rho, double tau, int k, double q) {
  if (k < 1) throw std::domain_error("apriori_skew: k must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("apriori_skew: q must lie in (0,1)");
  if (!(rho >= 0.0)) throw std::domain_error("apriori_skew: rho must be >= 0");
  const double trho = tau * rho;
  const double min_term = std::min(1.0 / (1.0 - q * q), trho / q);
  if (min_term == 0.0) return 0.0;
  const double lg = std::log(4.0 * min_term) - std::log1p(-q) + k * std::log(q) +
                    trho * (1.0 / q - q);
  return detail::from_log(lg);
}

/// Minimizer of the skew bound in q: either the quartic stationarity condition
/// tau rho q^4 + (3-k) q^3 + q^2 + k q - tau rho = 0, or the two-stage
/// simplified form (exactly 1 in the stagnation regime k <= 2 tau rho).
inline double optimal_q_skew(double tau_rho, int k, SkewQMethod method) {
  if (k < 1) throw std::domain_error("optimal_q_skew: k must be >= 1");
  if (!(tau_rho > 0.0)) throw std::domain_error("optimal_q_skew: tau*rho must be positive");
  if (method == SkewQMethod::simplified) {
    if (k <= 2.0 * tau_rho) return 1.0;
    const double disc = std::sqrt(static_cast<double>(k) * k - 4.0 * tau_rho * tau_rho);
    return std::min(2.0 * tau_rho / (k + disc), 1.0 - 1e-12);
  }
  auto f = [&](double q) {
    return tau_rho * q * q * q * q + (3.0 - k) * q * q * q + q * q + k * q - tau_rho;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-15) return 0.5 * (lo + hi);
  }
  throw std::runtime_error("optimal_q_skew: bisection did not converge");
}

struct ReferenceBounds {
  double saad = std::numeric_limits<double>::infinity();
  std::optional<double> hochbruck_lubich;
};

/// Saad's norm bound 2 (tau ||A||)^k / k! and, where applicable, the
/// Hochbruck-Lubich bound (disk form in general mode, skew form in skew mode).
inline ReferenceBounds reference_bounds(const BoundContext& ctx, int k) {
  if (k < 1) throw std::domain_error("reference_bounds: k must be >= 1");
  ReferenceBounds out;
  const double ta = ctx.tau * ctx.norm_a;
  out.saad = detail::from_log(std::log(2.0) + k * std::log(ta) - std::lgamma(k + 1.0));

  if (ctx.mode == BoundMode::skew) {
    const double tr = ctx.tau * ctx.rho_skew;
    if (tr > 0.0 && k >= 2.0 * tr) {
      const double lg = std::log(12.0) - tr * tr / k + k * (1.0 + std::log(tr / k));
      out.hochbruck_lubich = detail::from_log(lg);
    }
  } else if (ctx.rho_disk) {
    const double tr = ctx.tau * *ctx.rho_disk;
    if (tr > 0.0 && k >= 2.0 * tr) {
      const double lg = std::log(12.0) - tr + k * (1.0 + std::log(tr / k));
      out.hochbruck_lubich = detail::from_log(lg);
    }
  }
  return out;
}

/// One row of a convergence study.
struct ConvergenceRecord {
  int k = 0;
  std::optional<double> err_true;
  double est_post = 0.0;
  double bnd_prior = std::numeric_limits<double>::infinity();
  double q_used = 0.0;
  std::optional<double> bnd_saad;
  std::optional<double> bnd_hl;
};

struct PriorBound {
  double value = std::numeric_limits<double>::infinity();
  double q = 0.0;
};

/// A priori bound minimized over the candidate rates for one step count,
/// routing degenerate boxes to the nearly-Hermitian rate (c = 0) or the
/// shifted skew-Hermitian bound (b = a).
inline PriorBound best_prior_bound(const BoundContext& ctx, int k) {
  PriorBound best;
  auto consider = [&best](double value, double q) {
    if (value < best.value) {
      best.value = value;
      best.q = q;
    }
  };

  if (ctx.mode == BoundMode::skew) {
    const double tr = ctx.tau * ctx.rho_skew;
    if (tr <= 0.0) return {0.0, 1.0};
    const double q1 = optimal_q_skew(tr, k, SkewQMethod::quartic);
    consider(apriori_skew(ctx.rho_skew, ctx.tau, k, q1), q1);
    const double q2 = optimal_q_skew(tr, k, SkewQMethod::simplified);
    if (q2 < 1.0) consider(apriori_skew(ctx.rho_skew, ctx.tau, k, q2), q2);
    return best;
  }

  if (ctx.cp) {
    const double q1 = optimal_q_nonhermitian(ctx, k);
    consider(apriori_nonhermitian(ctx, k, q1), q1);
    if (ctx.box.a > 0.0) {
      const double q2 = crude_q(*ctx.cp, ctx.box.a);
      consider(apriori_nonhermitian(ctx, k, q2), q2);
    }
    return best;
  }

  // degenerate rectangles
  if (ctx.box.c == 0.0 && ctx.box.a > 0.0) {
    // Hermitian positive definite: nearly-Hermitian threshold rate
    const double q0 = threshold_q_closed_form(ctx.box.b / ctx.box.a);
    const double lg = std::log(2.0 * ctx.crouzeix_q * ctx.tau * ctx.norm_a) +
                      (k - 1) * std::log(q0) - std::log1p(-q0);
    return {detail::from_log(lg), q0};
  }
  if (ctx.box.b == ctx.box.a && ctx.box.c > 0.0) {
    // shifted skew-Hermitian: A = a I - i H with spec(H) in [-c, c]
    const double rho = 0.5 * ctx.box.c;
    const double tr = ctx.tau * rho;
    const double shift = -ctx.tau * ctx.box.a;
    const double q1 = optimal_q_skew(tr, k, SkewQMethod::quartic);
    consider(detail::from_log(shift + std::log(apriori_skew(rho, ctx.tau, k, q1))), q1);
    return best;
  }
  throw std::invalid_argument(
      "best_prior_bound: no bound route for a degenerate box with a <= 0");
}

/// Assembles the per-iteration convergence table: a posteriori estimate, a
/// priori bound minimized over q, optional reference bounds, and the true
/// error against a supplied reference solution.
inline std::vector<ConvergenceRecord> bound_curve(const BoundContext& ctx,
                                                  const KrylovDecomposition& dec,
                                                  int k_range, bool want_reference,
                                                  const Vector* w_reference = nullptr) {
  const int kmax = std::min(k_range, dec.k);
  const ApproxMode mode = ctx.mode == BoundMode::skew ? ApproxMode::unitary
                                                      : ApproxMode::real_exponential;
  const double nu = ctx.mode == BoundMode::skew ? 0.0 : ctx.box.a;
  std::vector<ConvergenceRecord> records;
  records.reserve(kmax);
  for (int k = 1; k <= kmax; ++k) {
    ConvergenceRecord rec;
    rec.k = k;
    rec.est_post = aposteriori_estimate(dec, k, ctx.tau, nu, ctx.mode, ctx.simpson_n);
    const PriorBound pb = best_prior_bound(ctx, k);
    rec.bnd_prior = pb.value;
    rec.q_used = pb.q;
    if (want_reference) {
      const auto ref = reference_bounds(ctx, k);
      rec.bnd_saad = ref.saad;
      rec.bnd_hl = ref.hochbruck_lubich;
    }
    if (w_reference)
      rec.err_true = (*w_reference - krylov_approx(dec, k, ctx.tau, mode)).norm();
    records.push_back(rec);
  }
  return records;
}

}  // namespace kexpm
