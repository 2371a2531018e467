#include <doctest.h>

#include "splitkit/catalog.hpp"
#include "splitkit/error.hpp"
#include "splitkit/spectral.hpp"
#include "support.hpp"

using namespace splitkit;
using testsupport::to_eigen;

namespace {

NormalizedSystem dense_ns(std::size_t n, std::uint64_t seed) { return normalize(testsupport::random_system(n, seed)); }

Matrix column_of(const Matrix& m, std::size_t j1) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) out(i, j1 - 1) = m(i, j1 - 1);
  return out;
}

Matrix row_of(const Matrix& m, std::size_t i1) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) out(i1 - 1, j) = m(i1 - 1, j);
  return out;
}

}  // namespace

TEST_CASE("nu follows the parity rule") {
  CHECK(nu(4) == 1);
  CHECK(nu(6) == 2);
  CHECK(nu(100) == 49);
  CHECK(nu(5) == 2);
  CHECK(nu(7) == 3);
}

TEST_CASE("method names parse case-insensitively") {
  CHECK(parse_method("fgs").method == Method::FGS);
  CHECK(parse_method("AFTC_L_COMPACT").method == Method::AFTC_L_compact);
  const MethodSpec a = parse_method("AMKS:4");
  CHECK(a.method == Method::AMKS);
  CHECK(a.params.amks_blocks == 4u);
  CHECK(method_label(a) == "AMKS:4");
  CHECK_THROWS_AS(parse_method("TU:2"), Error);
  CHECK_THROWS_AS(parse_method("AMKS:0"), Error);
  CHECK_THROWS_AS(parse_method("SOR"), Error);
  for (Method m : all_methods()) CHECK(parse_method(method_name(m)).method == m);
}

TEST_CASE("splitting orders on a dense matrix") {
  for (std::size_t n : {5u, 6u, 9u}) {
    const NormalizedSystem ns = dense_ns(n, n);
    auto order = [&](Method m) { return build(ns, {m, {}}).order(); };
    CHECK(order(Method::Jacobi) == 1);
    CHECK(order(Method::TU) == 2);
    CHECK(order(Method::FUTC) == n);
    CHECK(order(Method::FLTR) == n);
    CHECK(order(Method::FTC) == 2 * n - 2);
    CHECK(order(Method::FTR) == 2 * n - 2);
    CHECK(order(Method::TC22) == 4);
    CHECK(order(Method::AFTC_L) == 2 * n - 2);
    for (Method m : {Method::AFTC_L_compact, Method::AFTC_U_compact, Method::AFTR_L_compact, Method::AFTR_U_compact})
      CHECK(order(m) == 2 * n - 2 - nu(n));
    CHECK(order(Method::AMKS) == n);
    CHECK(build(ns, parse_method("AMKS:2")).order() == 2);
  }
}

TEST_CASE("full triangular splittings list their parts in the defined order") {
  const std::size_t n = 6;
  const NormalizedSystem ns = dense_ns(n, 2);
  const auto& l = ns.lower;
  const auto& u = ns.upper;

  const auto futc = testsupport::dense_parts(build(ns, {Method::FUTC, {}}));
  for (std::size_t k = 0; k + 1 < n; ++k) CHECK(futc[k] == column_of(u, n - k));
  CHECK(futc.back() == l);

  const auto fltc = testsupport::dense_parts(build(ns, {Method::FLTC, {}}));
  for (std::size_t k = 0; k + 1 < n; ++k) CHECK(fltc[k] == column_of(l, k + 1));
  CHECK(fltc.back() == u);

  const auto futr = testsupport::dense_parts(build(ns, {Method::FUTR, {}}));
  for (std::size_t k = 0; k + 1 < n; ++k) CHECK(futr[k] == row_of(u, n - 1 - k));

  const auto fltr = testsupport::dense_parts(build(ns, {Method::FLTR, {}}));
  for (std::size_t k = 0; k + 1 < n; ++k) CHECK(fltr[k] == row_of(l, k + 2));

  const auto ftc = testsupport::dense_parts(build(ns, {Method::FTC, {}}));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    CHECK(ftc[k] == column_of(l, k + 1));
    CHECK(ftc[n - 1 + k] == column_of(u, n - k));
  }
}

TEST_CASE("TC(2,2) blocks use the nu boundary") {
  const std::size_t n = 8, v = nu(n);
  const NormalizedSystem ns = dense_ns(n, 4);
  const auto p = testsupport::dense_parts(build(ns, {Method::TC22, {}}));
  REQUIRE(p.size() == 4);
  auto cols = [&](const Matrix& m, std::size_t a, std::size_t b) {
    Matrix out(n, n);
    for (std::size_t j = a; j <= b; ++j) out = out + column_of(m, j);
    return out;
  };
  CHECK(p[0] == cols(ns.lower, 1, v));
  CHECK(p[1] == cols(ns.lower, v + 1, n - 1));
  CHECK(p[2] == cols(ns.upper, n - v + 1, n));
  CHECK(p[3] == cols(ns.upper, 2, n - v));
  CHECK_THROWS_AS(build(dense_ns(2, 1), {Method::TC22, {}}), Error);
  MethodSpec wide{Method::TR22, {}};
  wide.params.block_split = n - 1;
  CHECK_THROWS_AS(build(ns, wide), Error);
}

TEST_CASE("alternating splittings start with the named triangle") {
  const std::size_t n = 6;
  const NormalizedSystem ns = dense_ns(n, 8);
  const auto lc = testsupport::dense_parts(build(ns, {Method::AFTC_L, {}}));
  CHECK(lc[0] == column_of(ns.lower, 1));
  CHECK(lc[1] == column_of(ns.upper, n));
  const auto uc = testsupport::dense_parts(build(ns, {Method::AFTC_U, {}}));
  CHECK(uc[0] == column_of(ns.upper, n));
  CHECK(uc[1] == column_of(ns.lower, 1));
  const auto lr = testsupport::dense_parts(build(ns, {Method::AFTR_L, {}}));
  CHECK(lr[0] == row_of(ns.lower, 2));
  CHECK(lr[1] == row_of(ns.upper, n - 1));
}

TEST_CASE("zero parts of a sparse matrix are dropped") {
  LinearSystem sys{Matrix::from_rows({{4, 1, 0, 0}, {0, 4, 0, 0}, {0, 1, 4, 1}, {1, 0, 0, 4}}), {1, 1, 1, 1}};
  const NormalizedSystem ns = normalize(sys);
  // U has nonzero columns 2 and 4 only.
  const Splitting s = build(ns, {Method::FUTC, {}});
  CHECK(s.order() == 3);
}

TEST_CASE("classical iteration matrices match their textbook formulas") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const NormalizedSystem ns = dense_ns(7, seed);
    const Eigen::MatrixXd l = to_eigen(ns.lower), u = to_eigen(ns.upper), i = Eigen::MatrixXd::Identity(7, 7);
    const Eigen::MatrixXd fgs = (i - l).lu().solve(u);
    const Eigen::MatrixXd bgs = (i - u).lu().solve(l);
    const Eigen::MatrixXd sgs = (i - u).lu().solve(l * fgs);
    CHECK(to_eigen(classical_iteration_matrix(ns, Method::Jacobi)).isApprox(l + u));
    CHECK(to_eigen(classical_iteration_matrix(ns, Method::FGS)).isApprox(fgs, 1e-12));
    CHECK(to_eigen(classical_iteration_matrix(ns, Method::BGS)).isApprox(bgs, 1e-12));
    CHECK(to_eigen(classical_iteration_matrix(ns, Method::SGS)).isApprox(sgs, 1e-12));
    const auto msgs = testsupport::eigen_nonzero_spectrum(to_eigen(classical_iteration_matrix(ns, Method::ModifiedSGS)));
    CHECK(testsupport::spectrum_distance(msgs, testsupport::eigen_nonzero_spectrum(sgs)) < 1e-9);
    CHECK_THROWS_AS(classical_iteration_matrix(ns, Method::TU), Error);
  }
}

TEST_CASE("decompositions of the identity") {
  const auto pr = DecompositionOfIdentity::per_row(4);
  CHECK(pr.groups == 4);
  const auto two = DecompositionOfIdentity::contiguous(6, 2);
  CHECK(two.group_of_row == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
  const auto three = DecompositionOfIdentity::contiguous(7, 3);
  CHECK(three.groups == 3);
  CHECK_THROWS_AS(DecompositionOfIdentity::contiguous(3, 4), Error);
  CHECK_THROWS_AS(DecompositionOfIdentity::from_groups(3, {0, 2, 2}), Error);
}

TEST_CASE("two-block AMKS stacks row bands") {
  const NormalizedSystem ns = dense_ns(6, 9);
  const Splitting s = amks_splitting(ns, DecompositionOfIdentity::contiguous(6, 2));
  REQUIRE(s.order() == 2);
  CHECK(s.part(0).row_support() == std::vector<std::size_t>{0, 1, 2});
  CHECK(s.part(1).row_support() == std::vector<std::size_t>{3, 4, 5});
}

TEST_CASE("AMKS iteration matrix is the product of row-selector updates") {
  const std::size_t n = 5;
  const NormalizedSystem ns = dense_ns(n, 12);
  const Eigen::MatrixXd b = to_eigen(jacobi_matrix(ns)), id = Eigen::MatrixXd::Identity(n, n);
  const auto doi = DecompositionOfIdentity::from_groups(n, {1, 0, 1, 2, 0});
  Eigen::MatrixXd prod = id;
  for (std::size_t g = 0; g < doi.groups; ++g) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
      if (doi.group_of_row[i] == g) p(i, i) = 1.0;
    prod = (p * b + id - p) * prod;
  }
  CHECK(to_eigen(amks_iteration_matrix(ns, doi)).isApprox(prod, 1e-13));
  // Per-row selectors in ascending order reproduce forward Gauss-Seidel.
  CHECK(to_eigen(amks_iteration_matrix(ns, DecompositionOfIdentity::per_row(n)))
            .isApprox(to_eigen(classical_iteration_matrix(ns, Method::FGS)), 1e-12));
}

TEST_CASE("ascending column order gains nothing over T_U") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::size_t n = 5;
    const NormalizedSystem ns = dense_ns(n, 30 + seed);
    std::vector<SparsePart> pre;
    for (std::size_t j = 2; j <= n; ++j) pre.push_back(upper_column(ns.upper, j));
    pre.push_back(SparsePart::from_dense(ns.lower));
    auto src = std::make_shared<const Matrix>(jacobi_matrix(ns));
    const Splitting asc = from_pre_parts(src, pre);
    const Splitting tu = build(ns, {Method::TU, {}}, src);
    const auto a = testsupport::eigen_nonzero_spectrum(testsupport::block_operator_oracle(testsupport::dense_parts(asc)));
    const auto t = testsupport::eigen_nonzero_spectrum(testsupport::block_operator_oracle(testsupport::dense_parts(tu)));
    CHECK(testsupport::spectrum_distance(a, t) < 1e-9);
  }
}
