#include <catch2/catch.hpp>
#include <random>

#include "kexpm/krylov.hpp"
#include "kexpm/problems.hpp"

using namespace kexpm;

namespace {

Matrix random_complex(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = std::complex<double>(nd(rng), nd(rng));
  return a;
}

Vector random_unit(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = std::complex<double>(nd(rng), nd(rng));
  return v / v.norm();
}

}  // namespace

TEST_CASE("arnoldi basics") {
  SECTION("identity operator breaks down at k = 1") {
    DenseOperator op(Matrix::Identity(6, 6));
    const auto dec = arnoldi(op, Vector::Ones(6) / std::sqrt(6.0), 6);
    CHECK(dec.k == 1);
    CHECK(dec.breakdown);
    CHECK(dec.h_next() == 0.0);
    CHECK(std::abs(dec.reduced(1)(0, 0) - 1.0) < 1e-15);
  }
  SECTION("full-dimension run: invariants and exactness") {
    const int n = 30;
    const Matrix A = random_complex(n, 1);
    DenseOperator op(A);
    const Vector v = random_unit(n, 2);
    const auto dec = arnoldi(op, v, n);
    REQUIRE(dec.k == n);
    CHECK(dec.h_next() <= 1e-10 * op.norm_estimate());

    const auto V = dec.basis(n);
    CHECK((V.adjoint() * V - Matrix::Identity(n, n)).norm() < 1e-10);
    Matrix R = A * V - V * dec.reduced(n);
    R.col(n - 1) -= dec.h_next() * dec.V.col(n);
    CHECK(R.norm() < 1e-10 * op.norm_estimate());

    const double tau = 0.6;
    const Vector w = krylov_approx(dec, n, tau, ApproxMode::real_exponential);
    const Vector ref = dense_expm(-tau * A) * v;
    CHECK((w - ref).norm() < 1e-10);
  }
  SECTION("invariants hold at every step on a sparse operator") {
    auto p = convection_diffusion(14);  // n = 196
    const auto dec = arnoldi(*p.op, p.v, 50);
    const Matrix A = operator_to_dense(*p.op);
    for (int j : {1, 5, 20, 50}) {
      const auto V = dec.basis(j);
      CHECK((V.adjoint() * V - Matrix::Identity(j, j)).norm() < 1e-10);
      Matrix R = A * V - V * dec.reduced(j);
      R.col(j - 1) -= dec.subdiag(j) * dec.V.col(j);
      CHECK(R.norm() < 1e-10 * p.op->norm_estimate());
      CHECK(dec.subdiag(j) <= p.op->norm_estimate());
    }
  }
  SECTION("input validation") {
    DenseOperator op(Matrix::Identity(4, 4));
    CHECK_THROWS_AS(arnoldi(op, Vector::Zero(4), 2), std::invalid_argument);
    CHECK_THROWS_AS(arnoldi(op, Vector::Ones(3), 2), std::invalid_argument);
    CHECK_THROWS_AS(arnoldi(op, Vector::Ones(4), 9), std::invalid_argument);
  }
}

TEST_CASE("lanczos") {
  SECTION("one-dimensional operator breaks down immediately") {
    DiagonalOperator op(Eigen::VectorXd::Ones(1));
    const auto dec = lanczos(op, Vector::Ones(1), 1);
    CHECK(dec.k == 1);
    CHECK(dec.breakdown);
    CHECK(std::abs(dec.tridiag(1)(0, 0) - 1.0) < 1e-15);
  }
  SECTION("agrees with arnoldi on a Hermitian operator") {
    auto p = diagonal_skew(200);
    const auto a = arnoldi(*p.op, p.v, 20);
    const auto l = lanczos(*p.op, p.v, 20);
    CHECK((a.reduced(20) - l.reduced(20)).norm() < 1e-10);
    // tridiagonal entries are real
    CHECK(l.reduced(20).imag().cwiseAbs().maxCoeff() < 1e-14);
  }
  SECTION("Ritz values interlace inside the spectrum of diag(j/n)") {
    auto p = diagonal_skew(1000);
    const auto dec = lanczos(*p.op, p.v, 30);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dec.tridiag(30));
    CHECK(es.eigenvalues().minCoeff() >= 1.0 / 1000 - 1e-12);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
  }
  SECTION("requires a hermitian structure tag") {
    DenseOperator op(random_complex(5, 9));
    CHECK_THROWS_AS(lanczos(op, random_unit(5, 10), 3), std::invalid_argument);
  }
}

TEST_CASE("extend resumes a decomposition") {
  auto p = convection_diffusion(10);  // n = 100
  auto inc = arnoldi(*p.op, p.v, 1);
  for (int k = 2; k <= 24; ++k) extend(inc, *p.op, k);
  const auto full = arnoldi(*p.op, p.v, 24);
  CHECK((inc.reduced(24) - full.reduced(24)).norm() < 1e-13);
  CHECK((inc.basis(24) - full.basis(24)).norm() < 1e-13);
}

TEST_CASE("dense_expm") {
  SECTION("exp(0) = I") {
    CHECK((dense_expm(Matrix::Zero(5, 5)) - Matrix::Identity(5, 5)).norm() < 1e-15);
  }
  SECTION("diagonal case") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 0.3;
    d(1, 1) = std::complex<double>(-1.0, 2.0);
    d(2, 2) = 4.0;
    const Matrix e = dense_expm(d);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(e(i, i) - std::exp(d(i, i))) < 1e-13 * std::abs(std::exp(d(i, i))));
  }
  SECTION("symmetric involution against the hyperbolic closed form") {
    Matrix M(2, 2);
    M << 0, 1, 1, 0;
    const double t = 0.7;
    const Matrix e = dense_expm(-t * M);
    CHECK(std::abs(e(0, 0) - std::cosh(t)) < 1e-12);
    CHECK(std::abs(e(0, 1) + std::sinh(t)) < 1e-12);
  }
  SECTION("guards") {
    CHECK_THROWS_AS(dense_expm(Matrix::Ones(2, 3)), std::invalid_argument);
    Matrix big = Matrix::Identity(2, 2) * 1e8;
    CHECK_THROWS_AS(dense_expm(big), std::overflow_error);
    CHECK_THROWS_AS(dense_expm(Matrix::Zero(2001, 2001)), std::invalid_argument);
  }
}

TEST_CASE("krylov_approx") {
  auto p = diagonal_skew(400);
  const auto dec = lanczos(*p.op, p.v, 30);
  SECTION("tau = 0 returns the start vector") {
    const Vector w = krylov_approx(dec, 10, 0.0, ApproxMode::unitary);
    CHECK((w - p.v).norm() < 1e-12);
  }
  SECTION("unitary mode conserves the norm") {
    for (double tau : {0.5, 2.0, 7.0})
      CHECK(std::abs(krylov_approx(dec, 30, tau, ApproxMode::unitary).norm() - 1.0) < 1e-10);
  }
  SECTION("matches the diagonal reference at convergence") {
    const Vector w = krylov_approx(dec, 30, 2.0, ApproxMode::unitary);
    const Vector ref = reference_solution(p, 2.0);
    CHECK((w - ref).norm() < 1e-10);
  }
  SECTION("unitary mode rejects non-Lanczos decompositions") {
    DenseOperator op(random_complex(8, 21));
    const auto a = arnoldi(op, random_unit(8, 22), 5);
    CHECK_THROWS_AS(krylov_approx(a, 3, 1.0, ApproxMode::unitary), std::invalid_argument);
  }
}

TEST_CASE("h_entry_series") {
  SECTION("zero matrix has zero corner entry") {
    KrylovDecomposition dec;
    dec.V = Matrix::Zero(4, 4);
    dec.H = Matrix::Zero(4, 3);
    dec.k = 3;
    const auto hs = h_entry_series(dec, 3, {0.0, 0.5, 2.0}, ApproxMode::real_exponential);
    for (const auto& h : hs.values) CHECK(std::abs(h) < 1e-15);
  }
  SECTION("2x2 closed form") {
    KrylovDecomposition dec;
    dec.V = Matrix::Zero(2, 3);
    dec.H = Matrix::Zero(3, 2);
    dec.H(0, 1) = 1.0;
    dec.H(1, 0) = 1.0;
    dec.k = 2;
    const auto hs = h_entry_series(dec, 2, {0.7}, ApproxMode::real_exponential);
    CHECK(std::abs(hs.values[0] - (-std::sinh(0.7))) < 1e-12);
    CHECK(hs.values[0].real() == Approx(-0.758584).margin(5e-7));
  }
  SECTION("k = 1 scalar case") {
    KrylovDecomposition dec;
    dec.V = Matrix::Zero(2, 2);
    dec.H = Matrix::Zero(2, 1);
    dec.H(0, 0) = std::complex<double>(0.4, -0.2);
    dec.k = 1;
    const auto hs = h_entry_series(dec, 1, {1.3}, ApproxMode::real_exponential);
    CHECK(std::abs(hs.values[0] - std::exp(-1.3 * dec.H(0, 0))) < 1e-14);
  }
  SECTION("matches dense_expm entries") {
    const int n = 24;
    const Matrix A = 0.4 * random_complex(n, 31);
    DenseOperator op(A);
    const auto dec = arnoldi(op, random_unit(n, 32), 12);
    const std::vector<double> ts{0.0, 0.4, 1.1, 2.7};
    const auto hs = h_entry_series(dec, 9, ts, ApproxMode::real_exponential);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto direct = dense_expm(-ts[i] * dec.reduced(9))(8, 0);
      CHECK(std::abs(hs.values[i] - direct) < 1e-11 * (1.0 + std::abs(direct)));
    }
  }
  SECTION("shift covariance") {
    auto p = diagonal_skew(300);
    const auto dec = lanczos(*p.op, p.v, 16);
    auto shifted = dec;
    const double alpha = 0.41;
    shifted.H.topLeftCorner(16, 16).diagonal().array() -= alpha;
    const std::vector<double> ts{0.3, 1.7, 4.0};
    const auto h0 = h_entry_series(dec, 16, ts, ApproxMode::unitary);
    const auto h1 = h_entry_series(shifted, 16, ts, ApproxMode::unitary);
    for (std::size_t i = 0; i < ts.size(); ++i)
      CHECK(std::abs(h1.values[i] - std::polar(1.0, -ts[i] * alpha) * h0.values[i]) < 1e-11);
  }
  SECTION("defective reduced matrix falls back to the dense path") {
    KrylovDecomposition dec;
    dec.V = Matrix::Zero(3, 4);
    dec.H = Matrix::Zero(4, 3);
    dec.H.topLeftCorner(3, 3) << 1, 1, 0,  // Jordan block: no eigenbasis
        0, 1, 1, 0, 0, 1;
    dec.k = 3;
    const std::vector<double> ts{0.5, 1.5};
    const auto hs = h_entry_series(dec, 3, ts, ApproxMode::real_exponential);
    CHECK(hs.used_fallback);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto direct = dense_expm(-ts[i] * dec.reduced(3))(2, 0);
      CHECK(std::abs(hs.values[i] - direct) < 1e-13);
    }
  }
  SECTION("rejects negative times") {
    KrylovDecomposition dec;
    dec.V = Matrix::Zero(2, 2);
    dec.H = Matrix::Zero(2, 1);
    dec.k = 1;
    CHECK_THROWS_AS(h_entry_series(dec, 1, {-1.0}, ApproxMode::real_exponential),
                    std::invalid_argument);
  }
}

TEST_CASE("operator linearity holds statistically") {
  auto p = convection_diffusion(12);
  std::mt19937 rng(77);
  std::normal_distribution<double> nd;
  const Eigen::Index n = p.op->dim();
  for (int trial = 0; trial < 5; ++trial) {
    Vector x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = std::complex<double>(nd(rng), nd(rng));
      y[i] = std::complex<double>(nd(rng), nd(rng));
    }
    const Vector lhs = (*p.op)(x + y);
    const Vector rhs = (*p.op)(x) + (*p.op)(y);
    CHECK((lhs - rhs).norm() < 1e-12 * (lhs.norm() + 1.0));
  }
}

TEST_CASE("logarithmic-norm contraction of the exponential") {
  std::mt19937 rng(505);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 20;
    Matrix B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) B(i, j) = std::complex<double>(nd(rng), nd(rng));
    const double shift = 1.05 * B.norm();
    const Matrix A = B + shift * Matrix::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Matrix> eh(0.5 * (A + A.adjoint()), Eigen::EigenvaluesOnly);
    const double nu = eh.eigenvalues().minCoeff();
    REQUIRE(nu > 0.0);
    for (double t : {0.1, 1.0, 5.0}) {
      const Matrix E = dense_expm(-t * A);
      const double opnorm = E.jacobiSvd().singularValues()(0);
      CHECK(opnorm <= std::exp(-t * nu) * (1.0 + 1e-10));
    }
  }
}
