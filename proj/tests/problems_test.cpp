#include <catch2/catch.hpp>
#include <algorithm>
#include <cmath>

#include "kexpm/problems.hpp"

using namespace kexpm;

TEST_CASE("lattice_normal_matrix") {
  SECTION("N = 3 on [1,2] x [-1,1]") {
    const SpectralBox box{1.0, 2.0, 1.0};
    auto p = lattice_normal_matrix(3, box);
    REQUIRE(p.op->dim() == 6);
    const Matrix A = operator_to_dense(*p.op);
    Eigen::ComplexEigenSolver<Matrix> es(A);
    std::vector<std::pair<double, double>> eigs;
    for (int i = 0; i < 6; ++i)
      eigs.emplace_back(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
    std::sort(eigs.begin(), eigs.end());
    const std::vector<std::pair<double, double>> expect{
        {1.0, -1.0}, {1.0, 1.0}, {1.5, -1.0}, {1.5, 1.0}, {2.0, -1.0}, {2.0, 1.0}};
    for (int i = 0; i < 6; ++i) {
      CHECK(eigs[i].first == Approx(expect[i].first).margin(1e-12));
      CHECK(eigs[i].second == Approx(expect[i].second).margin(1e-12));
    }
  }
  SECTION("normality") {
    auto p = lattice_normal_matrix(7, SpectralBox{0.2, 1.9, 0.6});
    const Matrix A = operator_to_dense(*p.op);
    const double scale = p.op->norm_estimate();
    CHECK((A * A.adjoint() - A.adjoint() * A).norm() <= 1e-12 * scale * scale);
  }
  SECTION("field of values check: spectral box equals the construction box") {
    const SpectralBox in{0.2, 1.9, 0.6};
    auto p = lattice_normal_matrix(7, in);
    const auto box = spectral_box(*p.op);
    CHECK(std::abs(box.a - in.a) < 1e-10);
    CHECK(std::abs(box.b - in.b) < 1e-10);
    CHECK(std::abs(box.c - in.c) < 1e-10);
  }
  SECTION("benchmark instance dimensions") {
    const double s2 = std::sqrt(2.0) / 2.0;
    auto p = lattice_normal_matrix(31, SpectralBox{1.0 - s2, 1.0 + s2, s2});
    CHECK(p.op->dim() == 31 * 30);
    CHECK(std::abs(p.v.norm() - 1.0) < 1e-14);
  }
  SECTION("input validation") {
    CHECK_THROWS_AS(lattice_normal_matrix(4, SpectralBox{0, 1, 1}), std::domain_error);
    CHECK_THROWS_AS(lattice_normal_matrix(5, SpectralBox{0, 1, 0}), std::domain_error);
  }
}

TEST_CASE("example2_box") {
  SECTION("square at m = 1/2") {
    const auto box = example2_box(0.5);
    CHECK(box.alpha() == Approx(box.beta()).epsilon(1e-14));
    CHECK(box.alpha() == Approx(elliptic_f(0.5)).epsilon(1e-14));
    CHECK(box.a == 0.0);
  }
  SECTION("m near zero is a flat rectangle") {
    const auto box = example2_box(0.01);
    CHECK(box.beta() / box.alpha() < 0.05);
  }
  SECTION("modulus round trip") {
    for (double m : {0.01, 0.1, 0.9, 0.99}) {
      const auto box = example2_box(m);
      CHECK(std::abs(solve_modulus(box.beta() / box.alpha()) - m) < 1e-12);
    }
  }
}

TEST_CASE("convection_diffusion") {
  SECTION("benchmark instance: dimension, norm, positive definiteness") {
    auto p = convection_diffusion(20);
    REQUIRE(p.op->dim() == 400);
    CHECK(p.op->norm_estimate() == Approx(8.0).margin(1e-12));
    // accurate 2-norm via a dense SVD
    const Matrix A = operator_to_dense(*p.op);
    const double norm2 = A.jacobiSvd().singularValues()(0);
    CHECK(norm2 >= 7.5);
    CHECK(norm2 <= 8.0);
    const auto box = spectral_box(*p.op);
    CHECK(box.a > 0.0);
  }
  SECTION("dropping convection yields a symmetric matrix") {
    auto p = convection_diffusion(9, kDefaultSeed, false);
    const Matrix A = operator_to_dense(*p.op);
    CHECK((A - A.transpose()).norm() < 1e-14);
  }
}

TEST_CASE("diagonal_skew") {
  SECTION("benchmark instance n = 1000") {
    auto p = diagonal_skew(1000);
    CHECK(p.op->norm_estimate() == Approx(1.0).margin(1e-15));
    CHECK(4.0 * p.rho_skew == Approx(0.999).margin(1e-12));
    CHECK(p.mode == BoundMode::skew);
  }
  SECTION("norm conservation of the reference evolution") {
    auto p = diagonal_skew(300);
    for (double tau : {0.5, 2.0, 50.0})
      CHECK(std::abs(reference_solution(p, tau).norm() - 1.0) < 1e-14);
  }
  SECTION("n = 1 is exact at the first step") {
    auto p = diagonal_skew(1);
    const auto dec = lanczos(*p.op, p.v, 1);
    const Vector w = krylov_approx(dec, 1, 0.9, ApproxMode::unitary);
    CHECK(std::abs(w[0] - std::polar(1.0, 0.9) * p.v[0]) < 1e-14);
  }
}

TEST_CASE("reference_solution") {
  SECTION("tau = 0 returns the start vector") {
    auto p1 = lattice_normal_matrix(5, SpectralBox{0.5, 1.5, 0.4});
    CHECK((reference_solution(p1, 0.0) - p1.v).norm() < 1e-14);
    auto p2 = diagonal_skew(20);
    CHECK((reference_solution(p2, 0.0) - p2.v).norm() < 1e-14);
  }
  SECTION("block closed form agrees with the dense exponential") {
    auto p = lattice_normal_matrix(7, SpectralBox{0.3, 1.4, 0.9});
    const double tau = 1.7;
    const Vector block = reference_solution(p, tau);
    const Vector dense = dense_expm(-tau * operator_to_dense(*p.op)) * p.v;
    CHECK((block - dense).norm() < 1e-11);
  }
  SECTION("diagonal closed form agrees with the dense exponential") {
    auto p = diagonal_skew(120);
    const double tau = 2.3;
    // the evolution operator is e^{i tau H}, i.e. e^{-tau A} with A = -iH
    Matrix A = Matrix::Zero(120, 120);
    for (int j = 0; j < 120; ++j) A(j, j) = std::complex<double>(0.0, -p.diag[j]);
    const Vector dense = dense_expm(-tau * A) * p.v;
    CHECK((reference_solution(p, tau) - dense).norm() < 1e-11);
  }
  SECTION("generators honour box_exact") {
    auto p1 = lattice_normal_matrix(7, SpectralBox{0.3, 1.4, 0.9});
    REQUIRE(p1.box_exact.has_value());
    const auto box = spectral_box(*p1.op);
    CHECK(std::abs(box.a - p1.box_exact->a) < 1e-10);
    CHECK(std::abs(box.b - p1.box_exact->b) < 1e-10);
    CHECK(std::abs(box.c - p1.box_exact->c) < 1e-10);
    auto p2 = diagonal_skew(50);
    REQUIRE(p2.box_exact.has_value());
    const auto box2 = spectral_box(*p2.op);
    CHECK(std::abs(box2.a - p2.box_exact->a) < 1e-10);
    CHECK(std::abs(box2.b - p2.box_exact->b) < 1e-10);
  }
}

TEST_CASE("seeded start vectors") {
  const Vector a = seeded_unit_vector(100, 123);
  const Vector b = seeded_unit_vector(100, 123);
  const Vector c = seeded_unit_vector(100, 124);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).norm() > 1e-2);
  CHECK(std::abs(a.norm() - 1.0) < 1e-14);
}
