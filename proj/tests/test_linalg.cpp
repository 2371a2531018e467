#include <doctest.h>

#include <cmath>
#include <sstream>

#include "splitkit/error.hpp"
#include "splitkit/linalg.hpp"
#include "support.hpp"

using namespace splitkit;
using testsupport::to_eigen;

TEST_CASE("matrix text round trip is bit exact") {
  const Matrix a = testsupport::random_dense(7, 3);
  std::stringstream io;
  write_matrix(io, a);
  const Matrix b = read_matrix(io);
  CHECK(a == b);

  const Vector x = testsupport::random_vector(9, 4);
  std::stringstream vio;
  write_vector(vio, x);
  CHECK(read_vector(vio) == x);
}

TEST_CASE("matrix reader rejects malformed input") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_matrix(in);
  };
  CHECK(parse("2 2\n1 2\n3 4\n") == Matrix::from_rows({{1, 2}, {3, 4}}));
  CHECK(parse("1 1 +5e-1") == Matrix::from_rows({{0.5}}));
  auto code_of = [&](const std::string& s) {
    try {
      parse(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  CHECK(code_of("2 2\n1 2\n3\n") == ErrorCode::Parse);
  CHECK(code_of("2 2\n1 2\n3 x\n") == ErrorCode::Parse);
  CHECK(code_of("1 1\n1 2\n") == ErrorCode::Parse);
  CHECK(code_of("-1 2\n") == ErrorCode::Parse);
  CHECK(code_of("") == ErrorCode::Parse);
}

TEST_CASE("missing files report an io error") {
  try {
    read_matrix_file("/nonexistent/dir/m.txt");
    FAIL("no error raised");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("normalize splits A into D(I - L - U) and keeps the solution") {
  const LinearSystem sys = testsupport::random_system(6, 11);
  const NormalizedSystem ns = normalize(sys);
  const std::size_t n = 6;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double rebuilt = ns.scale[i] * ((i == j ? 1.0 : 0.0) - ns.lower(i, j) - ns.upper(i, j));
      CHECK(rebuilt == doctest::Approx(sys.a(i, j)).epsilon(1e-15));
      if (j >= i) CHECK(ns.lower(i, j) == 0.0);
      if (j <= i) CHECK(ns.upper(i, j) == 0.0);
    }
  // x solves A x = b iff x = (L + U) x + c.
  const Eigen::VectorXd x = to_eigen(sys.a).partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(sys.b.data(), n));
  const Vector xs(x.data(), x.data() + n);
  const Vector fixed = jacobi_matrix(ns) * xs + ns.c;
  for (std::size_t i = 0; i < n; ++i) CHECK(fixed[i] == doctest::Approx(xs[i]).epsilon(1e-12));
}

TEST_CASE("normalize reports the first zero diagonal row") {
  LinearSystem sys{Matrix::from_rows({{1, 2, 0}, {0, 1, 1}, {1, 1, 0}}), {1, 1, 1}};
  try {
    normalize(sys);
    FAIL("no error raised");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroDiagonal);
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  sys.b = {1, 1};
  CHECK_THROWS_AS(normalize(sys), Error);
}

TEST_CASE("unit triangular solves match a dense solve") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix a = testsupport::random_dense(8, seed);
    const Matrix l = strictly_lower(a), u = strictly_upper(a);
    const Vector b = testsupport::random_vector(8, seed);
    const Eigen::VectorXd be = Eigen::Map<const Eigen::VectorXd>(b.data(), 8);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(8, 8);
    const Eigen::VectorXd xl = (id - to_eigen(l)).lu().solve(be);
    const Eigen::VectorXd xu = (id - to_eigen(u)).lu().solve(be);
    const Vector yl = solve_unit_lower(l, b), yu = solve_unit_upper(u, b);
    for (int i = 0; i < 8; ++i) {
      CHECK(yl[i] == doctest::Approx(xl[i]).epsilon(1e-12));
      CHECK(yu[i] == doctest::Approx(xu[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("norms and products against Eigen") {
  const Matrix a = testsupport::random_dense(5, 1), b = testsupport::random_dense(5, 2);
  const Eigen::MatrixXd ea = to_eigen(a), eb = to_eigen(b);
  CHECK(inf_norm(a) == doctest::Approx(ea.cwiseAbs().rowwise().sum().maxCoeff()));
  CHECK(one_norm(a) == doctest::Approx(ea.cwiseAbs().colwise().sum().maxCoeff()));
  CHECK(testsupport::to_eigen(a * b).isApprox(ea * eb, 1e-14));
  CHECK(max_abs(a - a) == 0.0);
  CHECK(is_zero(a - a));
  CHECK_FALSE(is_zero(a));
  CHECK(std::isinf(inf_norm(Vector{1.0, std::nan("")})));
  CHECK_THROWS_AS(a * Matrix(3, 3), Error);
}
