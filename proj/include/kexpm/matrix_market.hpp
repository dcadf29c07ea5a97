#pragma once

#include <cctype>
#include <charconv>
#include <complex>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kexpm/operators.hpp"

namespace kexpm {

/// Matrix Market parse failure; carries the 1-based line number.
class MarketParseError : public std::runtime_error {
public:
  MarketParseError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

private:
  long line_;
};

enum class MarketField { real, integer, complex_ };
enum class MarketSymmetry { general, symmetric, skew_symmetric, hermitian };

struct MarketMatrix {
  CsrMatrix matrix;
  MarketField field = MarketField::real;
  MarketSymmetry symmetry = MarketSymmetry::general;

  Structure structure() const {
    switch (symmetry) {
      case MarketSymmetry::hermitian:
        return Structure::hermitian;
      case MarketSymmetry::symmetric:
        return field == MarketField::complex_ ? Structure::general : Structure::hermitian;
      case MarketSymmetry::skew_symmetric:
        return field == MarketField::complex_ ? Structure::general
                                              : Structure::skew_hermitian;
      default:
        return Structure::general;
    }
  }
};

namespace detail {

inline std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace detail

/// Reads a coordinate-format Matrix Market stream.  Symmetric, skew-symmetric
/// and Hermitian storage is expanded to full coordinates on load.
inline MarketMatrix read_matrix_market(std::istream& in) {
  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) throw MarketParseError("empty Matrix Market stream", 1);
  ++lineno;
  {
    std::istringstream head(line);
    std::string banner, object, format, field, symmetry;
    head >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket")
      throw MarketParseError("header must begin with %%MatrixMarket", lineno);
    if (detail::lower(object) != "matrix")
      throw MarketParseError("unsupported Matrix Market object '" + object + "'", lineno);
    if (detail::lower(format) != "coordinate")
      throw MarketParseError("only coordinate format is supported", lineno);

    MarketMatrix out;
    const std::string f = detail::lower(field);
    if (f == "real")
      out.field = MarketField::real;
    else if (f == "integer")
      out.field = MarketField::integer;
    else if (f == "complex")
      out.field = MarketField::complex_;
    else
      throw MarketParseError("unsupported field '" + field + "'", lineno);

    const std::string s = detail::lower(symmetry);
    if (s == "general")
      out.symmetry = MarketSymmetry::general;
    else if (s == "symmetric")
      out.symmetry = MarketSymmetry::symmetric;
    else if (s == "skew-symmetric")
      out.symmetry = MarketSymmetry::skew_symmetric;
    else if (s == "hermitian")
      out.symmetry = MarketSymmetry::hermitian;
    else
      throw MarketParseError("unsupported symmetry '" + symmetry + "'", lineno);

    // size line (after comments)
    Eigen::Index rows = 0, cols = 0;
    long nnz = 0;
    for (;;) {
      if (!std::getline(in, line))
        throw MarketParseError("missing size line", lineno + 1);
      ++lineno;
      if (!line.empty() && line[0] == '%') continue;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::istringstream sz(line);
      if (!(sz >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 || nnz < 0)
        throw MarketParseError("malformed size line '" + line + "'", lineno);
      break;
    }

    std::vector<CsrMatrix::Triplet> trip;
    trip.reserve(static_cast<std::size_t>(nnz) * 2);
    for (long k = 0; k < nnz; ++k) {
      do {
        if (!std::getline(in, line))
          throw MarketParseError("unexpected end of file: expected " +
                                     std::to_string(nnz) + " entries",
                                 lineno + 1);
        ++lineno;
      } while (line.empty() || line[0] == '%' ||
               line.find_first_not_of(" \t\r") == std::string::npos);

      std::istringstream es(line);
      Eigen::Index i = 0, j = 0;
      double re = 0.0, im = 0.0;
      if (!(es >> i >> j >> re))
        throw MarketParseError("malformed entry '" + line + "'", lineno);
      if (out.field == MarketField::complex_ && !(es >> im))
        throw MarketParseError("complex entry missing imaginary part", lineno);
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw MarketParseError("entry index out of bounds", lineno);
      const std::complex<double> v(re, im);
      if (out.symmetry == MarketSymmetry::skew_symmetric && i == j && v != 0.0)
        throw MarketParseError("skew-symmetric matrix has nonzero diagonal entry", lineno);
      trip.emplace_back(i - 1, j - 1, v);
      if (i != j) {
        switch (out.symmetry) {
          case MarketSymmetry::symmetric:
            trip.emplace_back(j - 1, i - 1, v);
            break;
          case MarketSymmetry::skew_symmetric:
            trip.emplace_back(j - 1, i - 1, -v);
            break;
          case MarketSymmetry::hermitian:
            trip.emplace_back(j - 1, i - 1, std::conj(v));
            break;
          default:
            break;
        }
      }
    }
    out.matrix = CsrMatrix::from_triplets(rows, cols, std::move(trip));
    return out;
  }
}

inline MarketMatrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
  return read_matrix_market(in);
}

namespace detail {

inline void put_number(std::ostream& out, double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  out.write(buf, res.ptr - buf);
}

}  // namespace detail

/// Writes a matrix in general coordinate format with round-trip-exact decimals.
inline void write_matrix_market(std::ostream& out, const CsrMatrix& m) {
  const bool real = m.is_real();
  out << "%%MatrixMarket matrix coordinate " << (real ? "real" : "complex")
      << " general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonzeros() << '\n';
  m.for_each([&](Eigen::Index r, Eigen::Index c, std::complex<double> v) {
    out << (r + 1) << ' ' << (c + 1) << ' ';
    detail::put_number(out, v.real());
    if (!real) {
      out << ' ';
      detail::put_number(out, v.imag());
    }
    out << '\n';
  });
}

/// Reads a vector stored one entry per line ("re" or "re im").
inline Vector read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file '" + path + "'");
  std::vector<std::complex<double>> vals;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' ||
        line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    std::istringstream ls(line);
    double re = 0.0, im = 0.0;
    if (!(ls >> re)) throw MarketParseError("malformed vector entry '" + line + "'", lineno);
    ls >> im;
    vals.emplace_back(re, im);
  }
  Vector v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

inline void write_vector_file(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output vector file '" + path + "'");
  const bool real = v.size() == 0 || v.imag().cwiseAbs().maxCoeff() == 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    detail::put_number(out, v[i].real());
    if (!real) {
      out << ' ';
      detail::put_number(out, v[i].imag());
    }
    out << '\n';
  }
}

}  // namespace kexpm
