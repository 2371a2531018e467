#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace splitkit {

using Vector = std::vector<double>;

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct LinearSystem {
  Matrix a;
  Vector b;
};

// A = D (I - (L + U)) with c = D^{-1} b. L and U are strictly lower and
// strictly upper; scale holds the diagonal of D.
struct NormalizedSystem {
  Matrix lower;
  Matrix upper;
  Vector c;
  Vector scale;

  std::size_t size() const { return c.size(); }
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, const Vector& x);

Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix abs(const Matrix& a);
Matrix transpose(const Matrix& a);
Matrix strictly_lower(const Matrix& a);
Matrix strictly_upper(const Matrix& a);

double inf_norm(const Matrix& a);
double one_norm(const Matrix& a);
double max_abs(const Matrix& a);
bool is_zero(const Matrix& a, double tol = 0.0);

double inf_norm(const Vector& x);
Vector operator-(const Vector& a, const Vector& b);
Vector operator+(const Vector& a, const Vector& b);

// Solves (I - L) x = b for strictly lower L, and (I - U) x = b for strictly
// upper U, by substitution.
Vector solve_unit_lower(const Matrix& strict_lower, const Vector& b);
Vector solve_unit_upper(const Matrix& strict_upper, const Vector& b);

NormalizedSystem normalize(const LinearSystem& sys);
Matrix jacobi_matrix(const NormalizedSystem& ns);

// Text formats. Matrix: "rows cols" then the rows. Vector: "n" then the
// entries. Writers emit 17 significant digits so values round-trip exactly.
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& a);
void write_matrix_file(const std::string& path, const Matrix& a);

Vector read_vector(std::istream& in);
Vector read_vector_file(const std::string& path);
void write_vector(std::ostream& out, const Vector& x);
void write_vector_file(const std::string& path, const Vector& x);

}  // namespace splitkit
