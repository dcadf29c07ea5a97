#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace kexpm {

using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

enum class Structure { general, hermitian, skew_hermitian };

/// Matrix-free operator contract: dimension, matvec, adjoint matvec, a
/// certified upper estimate of the 2-norm, and a structure tag.
class LinearOperator {
public:
  virtual ~LinearOperator() = default;
  virtual Eigen::Index dim() const = 0;
  virtual void apply(const Vector& x, Vector& y) const = 0;
  virtual void apply_adjoint(const Vector& x, Vector& y) const = 0;
  virtual double norm_estimate() const = 0;
  virtual Structure structure() const { return Structure::general; }

  Vector operator()(const Vector& x) const {
    Vector y(dim());
    apply(x, y);
    return y;
  }
};

/// Compressed-row sparse matrix over complex doubles.
class CsrMatrix {
public:
  CsrMatrix() = default;

  using Triplet = std::tuple<Eigen::Index, Eigen::Index, std::complex<double>>;

  static CsrMatrix from_triplets(Eigen::Index rows, Eigen::Index cols,
                                 std::vector<Triplet> entries) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& p, const Triplet& q) {
      return std::tie(std::get<0>(p), std::get<1>(p)) <
             std::tie(std::get<0>(q), std::get<1>(q));
    });
    CsrMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
    m.col_.reserve(entries.size());
    m.val_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      auto [r, c, v] = entries[i];
      if (r < 0 || r >= rows || c < 0 || c >= cols)
        throw std::out_of_range("CsrMatrix: entry index out of range");
      // duplicates sum
      if (!m.col_.empty() && i > 0) {
        auto [pr, pc, pv] = entries[i - 1];
        if (pr == r && pc == c) {
          m.val_.back() += v;
          continue;
        }
      }
      m.col_.push_back(c);
      m.val_.push_back(v);
      ++m.row_ptr_[static_cast<std::size_t>(r) + 1];
    }
    for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r)
      m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index nonzeros() const { return static_cast<Eigen::Index>(val_.size()); }

  void apply(const Vector& x, Vector& y) const {
    y.setZero(rows_);
    for (Eigen::Index r = 0; r < rows_; ++r) {
      std::complex<double> acc{};
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        acc += val_[k] * x[col_[k]];
      y[r] = acc;
    }
  }

  void apply_adjoint(const Vector& x, Vector& y) const {
    y.setZero(cols_);
    for (Eigen::Index r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        y[col_[k]] += std::conj(val_[k]) * x[r];
  }

  double norm_one() const {
    std::vector<double> colsum(cols_, 0.0);
    for (Eigen::Index r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        colsum[col_[k]] += std::abs(val_[k]);
    return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
  }

  double norm_inf() const {
    double best = 0.0;
    for (Eigen::Index r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += std::abs(val_[k]);
      best = std::max(best, s);
    }
    return best;
  }

  double norm_frobenius() const {
    double s = 0.0;
    for (const auto& v : val_) s += std::norm(v);
    return std::sqrt(s);
  }

  /// Certified upper bound on the 2-norm: min(sqrt(norm1*norminf), frobenius).
  double norm_two_upper() const {
    return std::min(std::sqrt(norm_one() * norm_inf()), norm_frobenius());
  }

  Matrix to_dense() const {
    Matrix d = Matrix::Zero(rows_, cols_);
    for (Eigen::Index r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        d(r, col_[k]) += val_[k];
    return d;
  }

  template <typename Visitor>
  void for_each(Visitor&& visit) const {
    for (Eigen::Index r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        visit(r, col_[k], val_[k]);
  }

  bool is_real() const {
    for (const auto& v : val_)
      if (v.imag() != 0.0) return false;
    return true;
  }

private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Eigen::Index> col_;
  std::vector<std::complex<double>> val_;
};

/// LinearOperator backed by a CsrMatrix.
class CsrOperator final : public LinearOperator {
public:
  CsrOperator(CsrMatrix m, Structure tag = Structure::general,
              std::optional<double> norm_upper = {})
      : m_(std::move(m)), tag_(tag) {
    if (m_.rows() != m_.cols())
      throw std::invalid_argument("CsrOperator: matrix must be square");
    norm_ = norm_upper.value_or(m_.norm_two_upper());
  }

  Eigen::Index dim() const override { return m_.rows(); }
  void apply(const Vector& x, Vector& y) const override { m_.apply(x, y); }
  void apply_adjoint(const Vector& x, Vector& y) const override { m_.apply_adjoint(x, y); }
  double norm_estimate() const override { return norm_; }
  Structure structure() const override { return tag_; }

  const CsrMatrix& matrix() const { return m_; }

private:
  CsrMatrix m_;
  Structure tag_;
  double norm_;
};

/// LinearOperator for a real diagonal matrix.
class DiagonalOperator final : public LinearOperator {
public:
  explicit DiagonalOperator(Eigen::VectorXd d, Structure tag = Structure::hermitian)
      : d_(std::move(d)), tag_(tag) {}

  Eigen::Index dim() const override { return d_.size(); }
  void apply(const Vector& x, Vector& y) const override {
    y = d_.cast<std::complex<double>>().cwiseProduct(x);
  }
  void apply_adjoint(const Vector& x, Vector& y) const override { apply(x, y); }
  double norm_estimate() const override { return d_.cwiseAbs().maxCoeff(); }
  Structure structure() const override { return tag_; }

  const Eigen::VectorXd& diagonal() const { return d_; }

private:
  Eigen::VectorXd d_;
  Structure tag_;
};

/// LinearOperator over a dense matrix (test and desk-scale use).
class DenseOperator final : public LinearOperator {
public:
  explicit DenseOperator(Matrix a, Structure tag = Structure::general)
      : a_(std::move(a)), tag_(tag) {
    if (a_.rows() != a_.cols())
      throw std::invalid_argument("DenseOperator: matrix must be square");
    norm_ = std::min(std::sqrt(a_.cwiseAbs().colwise().sum().maxCoeff() *
                               a_.cwiseAbs().rowwise().sum().maxCoeff()),
                     a_.norm());
  }

  Eigen::Index dim() const override { return a_.rows(); }
  void apply(const Vector& x, Vector& y) const override { y = a_ * x; }
  void apply_adjoint(const Vector& x, Vector& y) const override { y = a_.adjoint() * x; }
  double norm_estimate() const override { return norm_; }
  Structure structure() const override { return tag_; }

  const Matrix& matrix() const { return a_; }

private:
  Matrix a_;
  Structure tag_;
  double norm_;
};

/// Reconstructs the dense matrix of an operator column by column.
inline Matrix operator_to_dense(const LinearOperator& op) {
  const Eigen::Index n = op.dim();
  Matrix d(n, n);
  Vector e = Vector::Zero(n), col(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    d.col(j) = col;
    e[j] = 0.0;
  }
  return d;
}

}  // namespace kexpm
