#include "splitkit/linalg.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "splitkit/error.hpp"

namespace splitkit {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows * cols) fail(ErrorCode::ShapeMismatch, "matrix data length does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows[0].size() : 0;
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) fail(ErrorCode::ShapeMismatch, "ragged row list");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::ShapeMismatch, std::string("shape mismatch in ") + op);
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix sum");
  Matrix r = a;
  for (std::size_t k = 0; k < r.data().size(); ++k) r.data()[k] += b.data()[k];
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "matrix difference");
  Matrix r = a;
  for (std::size_t k = 0; k < r.data().size(); ++k) r.data()[k] -= b.data()[k];
  return r;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) fail(ErrorCode::ShapeMismatch, "shape mismatch in matrix product");
  Matrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ri = r.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ri[j] += aik * bk[j];
    }
  }
  return r;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix r = a;
  for (double& v : r.data()) v *= s;
  return r;
}

Vector operator*(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) fail(ErrorCode::ShapeMismatch, "shape mismatch in matrix-vector product");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
    y[i] = s;
  }
  return y;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "Hadamard product");
  Matrix r = a;
  for (std::size_t k = 0; k < r.data().size(); ++k) r.data()[k] *= b.data()[k];
  return r;
}

Matrix abs(const Matrix& a) {
  Matrix r = a;
  for (double& v : r.data()) v = std::fabs(v);
  return r;
}

Matrix transpose(const Matrix& a) {
  Matrix r(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

Matrix strictly_lower(const Matrix& a) {
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < i && j < a.cols(); ++j) r(i, j) = a(i, j);
  return r;
}

Matrix strictly_upper(const Matrix& a) {
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) r(i, j) = a(i, j);
  return r;
}

double inf_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::fabs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double one_norm(const Matrix& a) { return inf_norm(transpose(a)); }

double max_abs(const Matrix& a) {
  double best = 0.0;
  for (double v : a.data()) best = std::max(best, std::fabs(v));
  return best;
}

bool is_zero(const Matrix& a, double tol) {
  for (double v : a.data())
    if (std::fabs(v) > tol) return false;
  return true;
}

double inf_norm(const Vector& x) {
  double best = 0.0;
  for (double v : x) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    best = std::max(best, std::fabs(v));
  }
  return best;
}

Vector operator-(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) fail(ErrorCode::ShapeMismatch, "vector length mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector operator+(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) fail(ErrorCode::ShapeMismatch, "vector length mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vector solve_unit_lower(const Matrix& l, const Vector& b) {
  if (!l.square() || l.rows() != b.size()) fail(ErrorCode::ShapeMismatch, "triangular solve shape mismatch");
  Vector x = b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double* li = l.row(i);
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s += li[j] * x[j];
    x[i] = s;
  }
  return x;
}

Vector solve_unit_upper(const Matrix& u, const Vector& b) {
  if (!u.square() || u.rows() != b.size()) fail(ErrorCode::ShapeMismatch, "triangular solve shape mismatch");
  Vector x = b;
  for (std::size_t ii = x.size(); ii-- > 0;) {
    const double* ui = u.row(ii);
    double s = x[ii];
    for (std::size_t j = ii + 1; j < x.size(); ++j) s += ui[j] * x[j];
    x[ii] = s;
  }
  return x;
}

NormalizedSystem normalize(const LinearSystem& sys) {
  const Matrix& a = sys.a;
  if (!a.square()) fail(ErrorCode::ShapeMismatch, "coefficient matrix is not square");
  if (sys.b.size() != a.rows()) fail(ErrorCode::ShapeMismatch, "right-hand side length does not match matrix");
  const std::size_t n = a.rows();
  NormalizedSystem ns{Matrix(n, n), Matrix(n, n), Vector(n), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a(i, i);
    if (d == 0.0) fail(ErrorCode::ZeroDiagonal, "zero diagonal entry at row " + std::to_string(i + 1));
    ns.scale[i] = d;
    ns.c[i] = sys.b[i] / d;
    for (std::size_t j = 0; j < n; ++j) {
      if (j < i) ns.lower(i, j) = -a(i, j) / d;
      if (j > i) ns.upper(i, j) = -a(i, j) / d;
    }
  }
  return ns;
}

Matrix jacobi_matrix(const NormalizedSystem& ns) { return ns.lower + ns.upper; }

namespace {

class Tokens {
 public:
  explicit Tokens(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    std::string tok;
    char ch = 0;
    while (in_.get(ch)) {
      if (ch == '\n') {
        if (!tok.empty()) break;
        ++line_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!tok.empty()) break;
      } else {
        tok.push_back(ch);
      }
    }
    if (ch == '\n' && !tok.empty()) in_.unget();
    if (tok.empty()) fail(ErrorCode::Parse, std::string("unexpected end of input while reading ") + what +
                                                " (line " + std::to_string(line_) + ")");
    return tok;
  }

  double number(const char* what) {
    const std::string tok = next(what);
    double v = 0.0;
    const char* first = tok.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      fail(ErrorCode::Parse, "malformed number '" + tok + "' in " + what + " (line " + std::to_string(line_) + ")");
    return v;
  }

  std::size_t count(const char* what) {
    const std::string tok = next(what);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      fail(ErrorCode::Parse, "malformed count '" + tok + "' in " + what + " (line " + std::to_string(line_) + ")");
    return v;
  }

  void expect_end(const char* what) {
    char ch = 0;
    while (in_.get(ch)) {
      if (!std::isspace(static_cast<unsigned char>(ch)))
        fail(ErrorCode::Parse, std::string("trailing data after ") + what + " (line " + std::to_string(line_) + ")");
      if (ch == '\n') ++line_;
    }
  }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

Matrix read_matrix(std::istream& in) {
  Tokens t(in);
  const std::size_t r = t.count("matrix header");
  const std::size_t c = t.count("matrix header");
  Matrix m(r, c);
  for (double& v : m.data()) v = t.number("matrix entries");
  t.expect_end("matrix entries");
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& a) {
  out << a.rows() << ' ' << a.cols() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out << (j ? " " : "") << a(i, j);
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const Matrix& a) {
  auto out = open_out(path);
  write_matrix(out, a);
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

Vector read_vector(std::istream& in) {
  Tokens t(in);
  const std::size_t n = t.count("vector header");
  Vector x(n);
  for (double& v : x) v = t.number("vector entries");
  t.expect_end("vector entries");
  return x;
}

Vector read_vector_file(const std::string& path) {
  auto in = open_in(path);
  return read_vector(in);
}

void write_vector(std::ostream& out, const Vector& x) {
  out << x.size() << '\n' << std::setprecision(17);
  for (double v : x) out << v << '\n';
}

void write_vector_file(const std::string& path, const Vector& x) {
  auto out = open_out(path);
  write_vector(out, x);
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace splitkit
