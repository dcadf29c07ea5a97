#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "kexpm/operators.hpp"

namespace kexpm {

enum class ApproxMode { real_exponential, unitary };

/// Result of k Arnoldi (or Lanczos) steps: orthonormal basis V of the Krylov
/// space, the reduced Hessenberg (or tridiagonal) matrix, and the residual
/// coefficient h_{k+1,k}.  Prefix views reduced(j), basis(j), subdiag(j) for
/// j <= k expose the j-step decomposition, which the recurrence nests exactly.
struct KrylovDecomposition {
  Matrix V;          // n x (k+1); column k is the next basis direction (zero after breakdown)
  Matrix H;          // (k+1) x k with the subdiagonal h_{j+1,j} in row j+1
  int k = 0;         // completed steps
  bool breakdown = false;
  bool tridiagonal = false;  // built by the Lanczos specialization
  double operator_norm = 0.0;

  Eigen::Index dim() const { return V.rows(); }

  auto basis(int j) const { return V.leftCols(j); }
  Matrix reduced(int j) const { return H.topLeftCorner(j, j); }
  double subdiag(int j) const { return H(j, j - 1).real(); }
  double h_next() const { return k > 0 ? subdiag(k) : 0.0; }

  /// Real symmetric tridiagonal content of a Lanczos decomposition.
  Eigen::MatrixXd tridiag(int j) const {
    if (!tridiagonal)
      throw std::logic_error("KrylovDecomposition: not a Lanczos decomposition");
    return H.topLeftCorner(j, j).real();
  }
};

namespace detail {

inline constexpr double kBreakdownTol = 1e-14;

// Modified Gram-Schmidt projection of w against the first j columns of V,
// accumulating the coefficients into h.
inline void mgs_pass(const Matrix& V, int j, Vector& w, Eigen::VectorXcd& h) {
  for (int i = 0; i < j; ++i) {
    const std::complex<double> c = V.col(i).dot(w);  // conjugated dot
    h[i] += c;
    w -= c * V.col(i);
  }
}

inline void krylov_steps(const LinearOperator& A, KrylovDecomposition& dec, int k_max,
                         bool lanczos) {
  const Eigen::Index n = A.dim();
  Vector w(n);
  while (dec.k < k_max && !dec.breakdown) {
    const int j = dec.k;
    A.apply(dec.V.col(j), w);
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(j + 1);
    // one MGS sweep plus one full reorthogonalization pass
    mgs_pass(dec.V, j + 1, w, h);
    mgs_pass(dec.V, j + 1, w, h);
    const double beta = w.norm();
    if (lanczos) {
      // enforce the real symmetric tridiagonal structure; the discarded
      // coefficients are reorthogonalization roundoff
      if (j > 0) dec.H(j - 1, j) = dec.H(j, j - 1);
      dec.H(j, j) = h[j].real();
    } else {
      dec.H.col(j).head(j + 1) = h;
    }
    dec.H(j + 1, j) = beta;
    dec.k = j + 1;
    if (beta <= kBreakdownTol * dec.operator_norm) {
      dec.breakdown = true;
      dec.H(j + 1, j) = 0.0;
      dec.V.col(j + 1).setZero();
    } else {
      dec.V.col(j + 1) = w / beta;
    }
  }
}

inline KrylovDecomposition krylov_start(const LinearOperator& A, const Vector& v,
                                        int k_max, bool lanczos) {
  const Eigen::Index n = A.dim();
  if (v.size() != n)
    throw std::invalid_argument("krylov: start vector dimension mismatch");
  if (k_max < 1 || k_max > n)
    throw std::invalid_argument("krylov: step budget must satisfy 1 <= k_max <= n");
  const double vnorm = v.norm();
  if (vnorm == 0.0) throw std::invalid_argument("krylov: zero start vector");

  KrylovDecomposition dec;
  dec.V = Matrix::Zero(n, k_max + 1);
  dec.H = Matrix::Zero(k_max + 1, k_max);
  dec.V.col(0) = v / vnorm;
  dec.tridiagonal = lanczos;
  dec.operator_norm = A.norm_estimate();
  krylov_steps(A, dec, k_max, lanczos);
  return dec;
}

}  // namespace detail

/// Arnoldi reduction with one full reorthogonalization pass per step.  Happy
/// breakdown freezes the decomposition once h_{k+1,k} <= 1e-14 ||A||.
inline KrylovDecomposition arnoldi(const LinearOperator& A, const Vector& v, int k_max) {
  return detail::krylov_start(A, v, k_max, false);
}

/// Lanczos reduction of a Hermitian operator to a real symmetric tridiagonal
/// matrix, with full reorthogonalization.
inline KrylovDecomposition lanczos(const LinearOperator& A, const Vector& v, int k_max) {
  if (A.structure() == Structure::general)
    throw std::invalid_argument("lanczos: operator must be tagged hermitian");
  return detail::krylov_start(A, v, k_max, true);
}

/// Resumes a decomposition up to a larger step budget.
inline void extend(KrylovDecomposition& dec, const LinearOperator& A, int new_k_max) {
  if (new_k_max <= dec.k || dec.breakdown) return;
  if (new_k_max > A.dim())
    throw std::invalid_argument("extend: step budget exceeds operator dimension");
  const Eigen::Index old_cols = dec.H.cols();
  dec.V.conservativeResize(Eigen::NoChange, new_k_max + 1);
  dec.V.rightCols(new_k_max - old_cols).setZero();
  Matrix H = Matrix::Zero(new_k_max + 1, new_k_max);
  H.topLeftCorner(old_cols + 1, old_cols) = dec.H;
  dec.H = std::move(H);
  detail::krylov_steps(A, dec, new_k_max, dec.tridiagonal);
}

/// Dense matrix exponential by scaling and squaring with the order-13 diagonal
/// Pade approximant; scaling from the 1-norm.
inline Matrix dense_expm(const Matrix& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("dense_expm: matrix must be square");
  if (M.rows() > 2000) throw std::invalid_argument("dense_expm: dimension guard (n <= 2000)");
  const Eigen::Index n = M.rows();
  if (n == 0) return M;

  static constexpr double b[14] = {64764752532480000.0, 32382376266240000.0,
                                   7771770303897600.0,  1187353796428800.0,
                                   129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,
                                   1323241920.0,        40840800.0,
                                   960960.0,            16380.0,
                                   182.0,               1.0};
  static constexpr double theta13 = 5.371920351148152;

  const double norm1 = M.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13)
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Matrix A = M / std::exp2(squarings);

  const Matrix I = Matrix::Identity(n, n);
  const Matrix A2 = A * A;
  const Matrix A4 = A2 * A2;
  const Matrix A6 = A4 * A2;
  Matrix U = A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2);
  U += b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I;
  U = A * U;
  Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2);
  V += b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;

  Matrix F = (V - U).partialPivLu().solve(V + U);
  for (int s = 0; s < squarings; ++s) F = F * F;
  if (!F.allFinite())
    throw std::overflow_error("dense_expm: result overflowed double range");
  return F;
}

/// Krylov approximation w_j(tau): V_j e^{-tau H_j} e_1 in real-exponential
/// mode, V_j e^{i tau T_j} e_1 in unitary mode.
inline Vector krylov_approx(const KrylovDecomposition& dec, int j, double tau,
                            ApproxMode mode) {
  if (j < 1 || j > dec.k) throw std::invalid_argument("krylov_approx: bad step index");
  Vector y;
  if (mode == ApproxMode::unitary) {
    if (!dec.tridiagonal)
      throw std::invalid_argument(
          "krylov_approx: unitary mode requires a Lanczos decomposition");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dec.tridiag(j));
    const Eigen::VectorXd q1 = es.eigenvectors().row(0);
    Eigen::VectorXcd phase(j);
    for (int i = 0; i < j; ++i)
      phase[i] = std::polar(1.0, tau * es.eigenvalues()[i]) * q1[i];
    y = es.eigenvectors().cast<std::complex<double>>() * phase;
  } else {
    y = dense_expm(-tau * dec.reduced(j)).col(0);
  }
  return dec.basis(j) * y;
}

/// h(t) = last-row/first-column entry of e^{-t H_j} (or of e^{i t T_j} in
/// unitary mode) for a batch of times, from one spectral factorization.
struct EntrySeries {
  std::vector<std::complex<double>> values;
  bool used_fallback = false;
};

inline EntrySeries h_entry_series(const KrylovDecomposition& dec, int j,
                                  const std::vector<double>& ts, ApproxMode mode) {
  if (j < 1 || j > dec.k) throw std::invalid_argument("h_entry_series: bad step index");
  for (double t : ts)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw std::invalid_argument("h_entry_series: times must be finite and >= 0");

  EntrySeries out;
  out.values.resize(ts.size());

  if (j == 1) {
    const std::complex<double> h11 = dec.H(0, 0);
    for (std::size_t i = 0; i < ts.size(); ++i)
      out.values[i] = mode == ApproxMode::unitary
                          ? std::exp(std::complex<double>(0, ts[i]) * h11)
                          : std::exp(-ts[i] * h11);
    return out;
  }

  if (mode == ApproxMode::unitary) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dec.tridiag(j));
    const Eigen::VectorXd row = es.eigenvectors().row(j - 1);
    const Eigen::VectorXd col = es.eigenvectors().row(0);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      std::complex<double> acc{};
      for (int l = 0; l < j; ++l)
        acc += row[l] * col[l] * std::polar(1.0, ts[i] * es.eigenvalues()[l]);
      out.values[i] = acc;
    }
    return out;
  }

  const Matrix Hj = dec.reduced(j);
  Eigen::ComplexEigenSolver<Matrix> es(Hj);
  bool ok = es.info() == Eigen::Success;
  Eigen::VectorXcd left, right;
  if (ok) {
    const Matrix& P = es.eigenvectors();
    Eigen::PartialPivLU<Matrix> lu(P);
    right = lu.solve(Vector::Unit(j, 0));  // P^{-1} e_1
    left = P.row(j - 1);                   // e_j^T P
    // reject badly conditioned eigenbases
    const double kappa = P.cwiseAbs().colwise().sum().maxCoeff() *
                         lu.inverse().cwiseAbs().colwise().sum().maxCoeff();
    ok = right.allFinite() && kappa < 1e8;
  }
  if (ok) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      std::complex<double> acc{};
      for (int l = 0; l < j; ++l)
        acc += left[l] * right[l] * std::exp(-ts[i] * es.eigenvalues()[l]);
      out.values[i] = acc;
    }
  } else {
    out.used_fallback = true;
    for (std::size_t i = 0; i < ts.size(); ++i)
      out.values[i] = dense_expm(-ts[i] * Hj)(j - 1, 0);
  }
  return out;
}

}  // namespace kexpm
