#include <catch2/catch.hpp>
#include <cmath>

#include "kexpm/conformal.hpp"
#include "oracles.hpp"

using namespace kexpm;

TEST_CASE("solve_modulus") {
  SECTION("aspect ratio 1 gives the square modulus exactly") {
    CHECK(std::abs(solve_modulus(1.0) - 0.5) < 1e-13);
  }
  SECTION("forward round trip at m = 0.9") {
    const double ratio = modulus_equation(0.9);
    CHECK(std::abs(solve_modulus(ratio) - 0.9) < 1e-12);
  }
  SECTION("flat rectangles give small moduli") {
    CHECK(solve_modulus(1e-4) < 1e-3);
  }
  SECTION("log-spaced round trips") {
    for (int i = 0; i < 50; ++i) {
      const double rho = std::pow(10.0, -3.0 + 6.0 * i / 49.0);
      const double m = solve_modulus(rho);
      CHECK(std::abs(modulus_equation(m) - rho) < 1e-12 * rho);
    }
  }
  SECTION("rejects nonpositive ratios") {
    CHECK_THROWS_AS(solve_modulus(0.0), std::domain_error);
    CHECK_THROWS_AS(solve_modulus(-2.0), std::domain_error);
  }
}

TEST_CASE("build_conformal") {
  SECTION("box built from the modulus equation at m = 0.5") {
    const double f = elliptic_f(0.5);
    const SpectralBox box{0.0, 2.0 * f, f};
    const auto cp = build_conformal(box);
    CHECK(std::abs(cp.m - 0.5) < 1e-13);
    CHECK(std::abs(cp.lambda - 1.0) < 1e-13);
    CHECK(std::abs(cp.capacity - 0.5) < 1e-13);
  }
  SECTION("square boxes have modulus one half") {
    const double s2 = std::sqrt(2.0) / 2.0;
    const auto cp = build_conformal(SpectralBox{1.0 - s2, 1.0 + s2, s2});
    CHECK(std::abs(cp.m - 0.5) < 1e-13);
  }
  SECTION("both ratio expressions agree") {
    for (double m : {0.01, 0.2, 0.77, 0.99}) {
      const double alpha = elliptic_f(1.0 - m), beta = elliptic_f(m);
      const auto cp = build_conformal(SpectralBox{-0.3, -0.3 + 2.0 * alpha, beta});
      CHECK(std::abs(elliptic_f(cp.m) / cp.beta - elliptic_f(cp.m1) / cp.alpha) <=
            1e-10 * cp.lambda);
      CHECK(cp.lambda > 0.0);
    }
  }
  SECTION("degenerate boxes are rejected") {
    CHECK_THROWS_AS(build_conformal(SpectralBox{0.0, 1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_conformal(SpectralBox{1.0, 1.0, 0.5}), std::invalid_argument);
  }
}

TEST_CASE("psi_minus_r") {
  const double f = elliptic_f(0.5);
  const SpectralBox box{0.0, 2.0 * f, f};  // lambda = 1, a = 0
  const auto cp = build_conformal(box);

  SECTION("collapses to the left edge as r -> 1") {
    CHECK(std::abs(psi_minus_r(cp, box, 1.0 + 1e-12) - box.a) < 1e-10);
  }
  SECTION("strictly decreasing in r") {
    double prev = box.a;
    for (double r : {1.1, 1.5, 2.0, 5.0}) {
      const double p = psi_minus_r(cp, box, r);
      CHECK(p < prev);
      prev = p;
    }
  }
  SECTION("r = 2 against the quadrature oracle") {
    const double oracle = oracles::romberg(
        [](double t) { return std::sqrt(0.5 + t * t) / std::sqrt(1.0 + t * t); }, 0.0,
        0.75);
    CHECK(std::abs(psi_minus_r(cp, box, 2.0) - (0.0 - oracle)) < 1e-10);
    CHECK(psi_minus_r(cp, box, 2.0) == Approx(-0.566045196652959).margin(1e-10));
  }
  SECTION("rejects r <= 1") {
    CHECK_THROWS_AS(psi_minus_r(cp, box, 1.0), std::domain_error);
    CHECK_THROWS_AS(psi_minus_r(cp, box, 0.7), std::domain_error);
  }
}

TEST_CASE("level_curve geometry") {
  for (double m : {0.1, 0.9}) {
    const double alpha = elliptic_f(1.0 - m), beta = elliptic_f(m);
    const SpectralBox box{0.2, 0.2 + 2.0 * alpha, beta};
    const auto cp = build_conformal(box);
    for (double r : {1.2, 2.0}) {
      const int n = 64;
      const auto pts = level_curve(cp, box, r, n);
      REQUIRE(static_cast<int>(pts.size()) == n);
      const double psi = psi_minus_r(cp, box, r);

      // theta = pi lands on the leftmost point
      CHECK(std::abs(pts[n / 2].real() - psi) < 1e-8);
      CHECK(std::abs(pts[n / 2].imag()) < 1e-8);

      // minimum of Re over the curve is attained at theta = pi
      int argmin = 0;
      for (int j = 1; j < n; ++j)
        if (pts[j].real() < pts[argmin].real()) argmin = j;
      CHECK(argmin == n / 2);

      // centered odd symmetry between theta = 0 and theta = pi
      const double center = box.center();
      CHECK(std::abs((pts[0].real() - center) + (psi - center)) < 1e-6);

      // every sample lies strictly outside the rectangle
      for (const auto& z : pts) {
        const bool inside = z.real() >= box.a && z.real() <= box.b &&
                            std::abs(z.imag()) <= box.c;
        CHECK_FALSE(inside);
      }
    }
  }
}

TEST_CASE("level_curve input validation") {
  const auto box = SpectralBox{0.0, 2.0, 1.0};
  const auto cp = build_conformal(box);
  CHECK_THROWS_AS(level_curve(cp, box, 0.9, 64), std::domain_error);
  CHECK_THROWS_AS(level_curve(cp, box, 2.0, 4), std::invalid_argument);
}

TEST_CASE("exterior map normalization at large radius") {
  const double m = 0.5;
  const double alpha = elliptic_f(1.0 - m), beta = elliptic_f(m);
  const SpectralBox box{0.0, 2.0 * alpha, beta};
  const auto cp = build_conformal(box);
  double prev = 1.0;
  for (double r : {1e2, 1e3}) {
    const auto pts = level_curve(cp, box, r, 8);
    const double ratio = std::abs((pts[0] - box.center()) * 2.0 * cp.lambda / r - 1.0);
    CHECK(ratio <= 10.0 / r);
    CHECK(ratio < prev);
    prev = ratio;
  }
}
