#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kexpm/bounds.hpp"
#include "kexpm/krylov.hpp"
#include "kexpm/operators.hpp"

namespace kexpm {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Reproducible normalized start vector (real entries, Box-Muller from a
/// seeded Mersenne Twister).
inline Vector seeded_unit_vector(Eigen::Index n, std::uint64_t seed = kDefaultSeed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  };
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = std::sqrt(-2.0 * std::log(uniform())) *
           std::cos(2.0 * std::numbers::pi * uniform());
  return v / v.norm();
}

enum class ReferenceMethod { eigen_block, eigen_diagonal, dense_expm };

/// A benchmark operator with its start vector and the data needed to evaluate
/// the exact solution.
struct TestProblem {
  std::shared_ptr<LinearOperator> op;
  Vector v;
  ReferenceMethod reference = ReferenceMethod::dense_expm;
  std::optional<SpectralBox> box_exact;
  BoundMode mode = BoundMode::general;
  double rho_skew = 0.0;

  // reference payloads
  std::vector<std::pair<double, double>> blocks;  // (x, y) per 2x2 rotation block
  Eigen::VectorXd diag;                           // diagonal entries
};

/// Normal block-diagonal matrix whose eigenvalues x_l +- i y_j form a lattice
/// filling the rectangle [a,b] x [-c,c]:
///   x_l = a + (l-1)(b-a)/(N-1), l = 1..N,   y_j = 2jc/(N-1), j = 1..(N-1)/2.
/// Dimension N(N-1); the corner eigenvalues make the convex hull the full
/// rectangle.
inline TestProblem lattice_normal_matrix(int N, const SpectralBox& box,
                                         std::uint64_t seed = kDefaultSeed) {
  if (N < 3 || N % 2 == 0)
    throw std::domain_error("lattice_normal_matrix: N must be odd and >= 3");
  if (box.degenerate())
    throw std::domain_error("lattice_normal_matrix: box must be nondegenerate");

  TestProblem p;
  std::vector<CsrMatrix::Triplet> trip;
  Eigen::Index at = 0;
  for (int l = 1; l <= N; ++l) {
    const double x = box.a + (l - 1) * (box.b - box.a) / (N - 1);
    for (int j = 1; j <= (N - 1) / 2; ++j) {
      const double y = 2.0 * j * box.c / (N - 1);
      trip.emplace_back(at, at, x);
      trip.emplace_back(at, at + 1, y);
      trip.emplace_back(at + 1, at, -y);
      trip.emplace_back(at + 1, at + 1, x);
      p.blocks.emplace_back(x, y);
      at += 2;
    }
  }
  const Eigen::Index n = at;  // N(N-1)
  // exact 2-norm of a normal matrix: largest eigenvalue modulus
  const double norm = std::max(std::hypot(box.a, box.c), std::hypot(box.b, box.c));
  p.op = std::make_shared<CsrOperator>(CsrMatrix::from_triplets(n, n, std::move(trip)),
                                       Structure::general, norm);
  p.v = seeded_unit_vector(n, seed);
  p.reference = ReferenceMethod::eigen_block;
  p.box_exact = box;
  return p;
}

/// Rectangle whose aspect ratio reproduces a prescribed modulus m:
/// half-width f(1-m), half-height f(m), anchored at a = 0.
inline SpectralBox example2_box(double m) {
  detail::require_modulus(m);
  const double alpha = elliptic_f(1.0 - m);
  const double beta = elliptic_f(m);
  return SpectralBox{0.0, 2.0 * alpha, beta};
}

/// Finite-difference convection-diffusion operator: A is the h^2-scaled
/// five-point discretization of -(Laplacian u - u_x - u_y) on the unit square
/// with zero boundary values and centered convection terms; diagonal 4,
/// off-diagonals -1 +- h/2.
inline TestProblem convection_diffusion(int grid_n, std::uint64_t seed = kDefaultSeed,
                                        bool with_convection = true) {
  if (grid_n < 3) throw std::domain_error("convection_diffusion: grid must be >= 3");
  const double h = 1.0 / (grid_n + 1);
  const double conv = with_convection ? 0.5 * h : 0.0;
  const Eigen::Index n = static_cast<Eigen::Index>(grid_n) * grid_n;

  std::vector<CsrMatrix::Triplet> trip;
  trip.reserve(5 * static_cast<std::size_t>(n));
  auto id = [grid_n](int ix, int iy) {
    return static_cast<Eigen::Index>(iy) * grid_n + ix;
  };
  for (int iy = 0; iy < grid_n; ++iy) {
    for (int ix = 0; ix < grid_n; ++ix) {
      const Eigen::Index row = id(ix, iy);
      trip.emplace_back(row, row, 4.0);
      if (ix + 1 < grid_n) trip.emplace_back(row, id(ix + 1, iy), -1.0 + conv);
      if (ix > 0) trip.emplace_back(row, id(ix - 1, iy), -1.0 - conv);
      if (iy + 1 < grid_n) trip.emplace_back(row, id(ix, iy + 1), -1.0 + conv);
      if (iy > 0) trip.emplace_back(row, id(ix, iy - 1), -1.0 - conv);
    }
  }
  TestProblem p;
  p.op = std::make_shared<CsrOperator>(CsrMatrix::from_triplets(n, n, std::move(trip)),
                                       with_convection ? Structure::general
                                                       : Structure::hermitian);
  p.v = seeded_unit_vector(n, seed);
  p.reference = ReferenceMethod::dense_expm;
  return p;
}

/// Hermitian diagonal operator with entries j/n; the benchmark target is the
/// unitary evolution w(tau) = e^{i tau H} v.
inline TestProblem diagonal_skew(Eigen::Index n, std::uint64_t seed = kDefaultSeed) {
  if (n < 1) throw std::domain_error("diagonal_skew: dimension must be >= 1");
  Eigen::VectorXd d(n);
  for (Eigen::Index j = 0; j < n; ++j)
    d[j] = static_cast<double>(j + 1) / static_cast<double>(n);
  TestProblem p;
  p.diag = d;
  p.op = std::make_shared<DiagonalOperator>(std::move(d), Structure::hermitian);
  p.v = seeded_unit_vector(n, seed);
  p.reference = ReferenceMethod::eigen_diagonal;
  p.mode = BoundMode::skew;
  p.rho_skew = 0.25 * (1.0 - 1.0 / static_cast<double>(n));
  p.box_exact = SpectralBox{1.0 / static_cast<double>(n), 1.0, 0.0};
  return p;
}

/// Exact (up to rounding) solution of the benchmark evolution at time tau.
inline Vector reference_solution(const TestProblem& p, double tau) {
  switch (p.reference) {
    case ReferenceMethod::eigen_block: {
      Vector w(p.v.size());
      for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        const auto [x, y] = p.blocks[b];
        const double decay = std::exp(-tau * x);
        const double c = std::cos(tau * y), s = std::sin(tau * y);
        const Eigen::Index at = static_cast<Eigen::Index>(2 * b);
        const auto v0 = p.v[at], v1 = p.v[at + 1];
        w[at] = decay * (c * v0 - s * v1);
        w[at + 1] = decay * (s * v0 + c * v1);
      }
      return w;
    }
    case ReferenceMethod::eigen_diagonal: {
      Vector w(p.v.size());
      for (Eigen::Index j = 0; j < p.v.size(); ++j)
        w[j] = std::polar(1.0, tau * p.diag[j]) * p.v[j];
      return w;
    }
    case ReferenceMethod::dense_expm:
    default: {
      if (p.op->dim() > 2000)
        throw std::invalid_argument("reference_solution: dense path guarded at n <= 2000");
      return dense_expm(-tau * operator_to_dense(*p.op)) * p.v;
    }
  }
}

}  // namespace kexpm
