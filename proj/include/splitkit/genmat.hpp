#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "splitkit/linalg.hpp"

namespace splitkit {

// xoshiro256** seeded through splitmix64. uniform01 takes the top 53 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  double uniform01();
  // Uniform on [-1, 1) as 2u - 1.
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

 private:
  std::uint64_t s_[4];
};

enum class MatrixClass { Class1, Class2, Class3, BSpline };

std::string matrix_class_name(MatrixClass c);
MatrixClass parse_matrix_class(const std::string& s);

struct GeneratorConfig {
  MatrixClass cls = MatrixClass::Class1;
  std::size_t n = 100;
  double phi = 0.9;
  std::uint64_t seed = 0;
};

// Off-diagonals uniform on [-1, 1] (Class 1), forced negative (Class 2) or
// positive (Class 3); diagonal a_ii = (1/phi) sum_{j != i} |a_ij|, so the
// Jacobi matrix has infinity norm phi. The three classes share the draws for
// a given seed. Right-hand side b = A 1. BSpline ignores phi and seed.
LinearSystem generate(const GeneratorConfig& cfg);

// Banded matrix with offsets -4..4 and values 1 4 1 4 16 4 1 4 1, truncated
// at the boundary.
Matrix bspline_matrix(std::size_t n);

enum class BuiltinExample {
  // 3 x 3 Jacobi matrix g [[0,-1,-1],[1/2,0,0],[0,1/2,0]] scaled to radius 1.
  UnitRadius3,
  // 2 x 2 exchange matrix [[0,1],[1,0]].
  Exchange2,
};

std::string builtin_example_name(BuiltinExample e);
NormalizedSystem builtin_example(BuiltinExample e);
// A = I - B with b = A 1.
LinearSystem builtin_example_system(BuiltinExample e);

// Strong connectivity of the off-diagonal nonzero pattern.
bool is_irreducible(const Matrix& a);

}  // namespace splitkit
