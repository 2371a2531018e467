#include "splitkit/genmat.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "splitkit/error.hpp"

namespace splitkit {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t st = seed;
  for (auto& w : s_) w = splitmix64(st);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::string matrix_class_name(MatrixClass c) {
  switch (c) {
    case MatrixClass::Class1:
      return "1";
    case MatrixClass::Class2:
      return "2";
    case MatrixClass::Class3:
      return "3";
    case MatrixClass::BSpline:
      return "bspline";
  }
  return "?";
}

MatrixClass parse_matrix_class(const std::string& raw) {
  std::string s;
  for (char c : raw) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "1" || s == "class1") return MatrixClass::Class1;
  if (s == "2" || s == "class2") return MatrixClass::Class2;
  if (s == "3" || s == "class3") return MatrixClass::Class3;
  if (s == "bspline") return MatrixClass::BSpline;
  fail(ErrorCode::InvalidArgument, "unknown matrix class '" + raw + "'");
}

LinearSystem generate(const GeneratorConfig& cfg) {
  if (cfg.n == 0) fail(ErrorCode::InvalidArgument, "n must be positive");
  Matrix a;
  if (cfg.cls == MatrixClass::BSpline) {
    a = bspline_matrix(cfg.n);
  } else {
    if (!(cfg.phi > 0.0) || !std::isfinite(cfg.phi)) fail(ErrorCode::InvalidArgument, "phi must be positive");
    const std::size_t n = cfg.n;
    a = Matrix(n, n);
    Rng rng(cfg.seed);
    for (std::size_t i = 0; i < n; ++i) {
      double rowsum = 0.0;
      // A row of exact zeros would leave a zero diagonal; draw it again.
      do {
        rowsum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          double v = rng.uniform_pm1();
          if (cfg.cls == MatrixClass::Class2) v = -std::fabs(v);
          if (cfg.cls == MatrixClass::Class3) v = std::fabs(v);
          a(i, j) = v;
          rowsum += std::fabs(v);
        }
      } while (rowsum == 0.0 && n > 1);
      a(i, i) = rowsum / cfg.phi;
    }
  }
  LinearSystem sys{a, Vector(cfg.n, 0.0)};
  sys.b = a * Vector(cfg.n, 1.0);
  return sys;
}

Matrix bspline_matrix(std::size_t n) {
  static constexpr double band[9] = {1, 4, 1, 4, 16, 4, 1, 4, 1};
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (int off = -4; off <= 4; ++off) {
      const long j = static_cast<long>(i) + off;
      if (j >= 0 && j < static_cast<long>(n)) a(i, static_cast<std::size_t>(j)) = band[off + 4];
    }
  return a;
}

std::string builtin_example_name(BuiltinExample e) {
  return e == BuiltinExample::UnitRadius3 ? "unit-radius-3" : "exchange-2";
}

NormalizedSystem builtin_example(BuiltinExample e) {
  Matrix b;
  if (e == BuiltinExample::UnitRadius3) {
    // g = 1 / rho of the unscaled matrix, to the printed precision.
    constexpr double g = 1.241706082017;
    b = Matrix::from_rows({{0.0, -g, -g}, {0.5 * g, 0.0, 0.0}, {0.0, 0.5 * g, 0.0}});
  } else {
    b = Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  }
  const std::size_t n = b.rows();
  return NormalizedSystem{strictly_lower(b), strictly_upper(b), Vector(n, 0.0), Vector(n, 1.0)};
}

LinearSystem builtin_example_system(BuiltinExample e) {
  const NormalizedSystem ns = builtin_example(e);
  const Matrix a = Matrix::identity(ns.size()) - jacobi_matrix(ns);
  return LinearSystem{a, a * Vector(ns.size(), 1.0)};
}

bool is_irreducible(const Matrix& a) {
  if (!a.square()) fail(ErrorCode::ShapeMismatch, "irreducibility needs a square matrix");
  const std::size_t n = a.rows();
  if (n <= 1) return true;
  auto reaches_all = [&](bool transposed) {
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        const double v = transposed ? a(j, i) : a(i, j);
        if (j != i && v != 0.0 && !seen[j]) {
          seen[j] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == n;
  };
  return reaches_all(false) && reaches_all(true);
}

}  // namespace splitkit
