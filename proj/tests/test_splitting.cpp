#include <doctest.h>

#include <sstream>

#include "splitkit/catalog.hpp"
#include "splitkit/error.hpp"
#include "splitkit/splitting.hpp"
#include "support.hpp"

using namespace splitkit;

namespace {

std::shared_ptr<const Matrix> dense_jacobi(std::size_t n, std::uint64_t seed) {
  return std::make_shared<const Matrix>(jacobi_matrix(normalize(testsupport::random_system(n, seed))));
}

// Essential by definition: every cyclically consecutive product is nonzero,
// evaluated with Eigen.
bool essential_oracle(const Splitting& s) {
  const auto parts = testsupport::dense_parts(s);
  const std::size_t d = parts.size();
  if (d == 1) return true;
  for (std::size_t p = 0; p < d; ++p) {
    const Eigen::MatrixXd prod = testsupport::to_eigen(parts[(p + 1) % d]) * testsupport::to_eigen(parts[p]);
    if (prod.isZero(0.0)) return false;
  }
  return true;
}

// Maximal by exhaustion: no part admits an ordered split (X, Y) with
// Y X != O. Any part can be rotated to the end, so this covers every
// one-step refinement.
bool maximal_oracle(const Splitting& s) {
  for (const SparsePart& part : s.parts()) {
    const auto& es = part.entries();
    const std::size_t m = es.size();
    REQUIRE(m <= 16);
    for (std::uint32_t bits = 1; bits + 1 < (1u << m); ++bits) {
      Eigen::MatrixXd x = Eigen::MatrixXd::Zero(s.size(), s.size()), y = x;
      for (std::size_t k = 0; k < m; ++k) ((bits >> k) & 1u ? x : y)(es[k].row, es[k].col) = es[k].value;
      if (!(y * x).isZero(0.0)) return false;
    }
  }
  return true;
}

Splitting parts_of(std::shared_ptr<const Matrix> src, const std::vector<Matrix>& dense) {
  std::vector<SparsePart> p;
  for (const auto& m : dense) p.push_back(SparsePart::from_dense(m));
  return Splitting(std::move(src), std::move(p));
}

}  // namespace

TEST_CASE("mask application drops zero parts") {
  // Strictly lower Jacobi matrix: the U part vanishes and only B_J remains.
  auto src = std::make_shared<const Matrix>(Matrix::from_rows({{0, 0, 0}, {1, 0, 0}, {2, 3, 0}}));
  SplittingMask m{3, std::vector<std::vector<std::uint8_t>>(2, std::vector<std::uint8_t>(9, 0))};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m.parts[j > i ? 0 : 1][i * 3 + j] = 1;
  const Splitting s = apply_mask(m, src);
  REQUIRE(s.order() == 1);
  CHECK(s.part(0).dense() == *src);

  SplittingMask empty{3, {std::vector<std::uint8_t>(9, 0)}};
  CHECK_THROWS_AS(apply_mask(empty, src), Error);
}

TEST_CASE("splitting validation rejects overlaps and gaps") {
  auto src = std::make_shared<const Matrix>(Matrix::from_rows({{0, 1}, {2, 0}}));
  const Matrix u = Matrix::from_rows({{0, 1}, {0, 0}}), l = Matrix::from_rows({{0, 0}, {2, 0}});
  CHECK_NOTHROW(parts_of(src, {u, l}));
  CHECK_THROWS_AS(parts_of(src, {u, u + l}), Error);
  CHECK_THROWS_AS(parts_of(src, {u}), Error);
  CHECK_THROWS_AS(parts_of(src, {u, Matrix::from_rows({{0, 0}, {3, 0}})}), Error);
}

TEST_CASE("cyclic shift moves the last part to the front") {
  auto src = dense_jacobi(5, 1);
  NormalizedSystem ns = normalize(testsupport::random_system(5, 1));
  const Splitting s = build(ns, {Method::FTC, {}}, src);
  const Splitting t = cyclic_shift(s, 1);
  REQUIRE(t.order() == s.order());
  CHECK(t.part(0) == s.part(s.order() - 1));
  for (std::size_t p = 1; p < s.order(); ++p) CHECK(t.part(p) == s.part(p - 1));
  const Splitting full = cyclic_shift(s, s.order());
  CHECK(full.parts() == s.parts());
  CHECK(cyclic_shift(s, 3).parts() == cyclic_shift(cyclic_shift(s, 1), 2).parts());
}

TEST_CASE("T_U and T_L refine Jacobi on a dense matrix") {
  const NormalizedSystem ns = normalize(testsupport::random_system(6, 5));
  auto src = std::make_shared<const Matrix>(jacobi_matrix(ns));
  const Splitting jac = build(ns, {Method::Jacobi, {}}, src);
  for (Method m : {Method::TU, Method::TL}) {
    const Splitting t = build(ns, {m, {}}, src);
    const auto w = refinement_step(t, jac);
    REQUIRE(w.has_value());
    CHECK(w->coarse_shift == 0);
    const RefinementResult r = refines(t, jac);
    CHECK(r.refines);
    CHECK(r.one_step);
    CHECK_FALSE(refines(jac, t).refines);
  }
  CHECK_FALSE(refines(jac, jac).refines);
}

TEST_CASE("ascending column split of U is not a refinement") {
  const NormalizedSystem ns = normalize(testsupport::random_system(6, 7));
  auto src = std::make_shared<const Matrix>(jacobi_matrix(ns));
  const Splitting tu = build(ns, {Method::TU, {}}, src);
  Matrix rest = ns.upper;
  for (std::size_t i = 0; i < 6; ++i) rest(i, 1) = 0.0;
  const Matrix col2 = ns.upper - rest;
  // {U_c^(2), U_c^(3..n), L}: the product (U_c^(3..n)) (U_c^(2)) is zero.
  const Splitting asc = parts_of(src, {col2, rest, ns.lower});
  CHECK_FALSE(refinement_step(asc, tu).has_value());
  // Descending order gives a witness.
  const Splitting desc = parts_of(src, {rest, col2, ns.lower});
  CHECK(refinement_step(desc, tu).has_value());
}

TEST_CASE("refinement witness is confirmed by rebuilding the shifted pair") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 4 + seed % 3;
    auto src = dense_jacobi(n, seed);
    const Splitting coarse = apply_mask(testsupport::random_mask(n, 3, seed), src);
    // Split a random part into two random halves.
    const std::size_t p = seed % coarse.order();
    std::vector<Matrix> parts = testsupport::dense_parts(coarse);
    Matrix a = parts[p], b(n, n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (a(i, j) != 0.0 && (k++ % 2 == 1)) {
          b(i, j) = a(i, j);
          a(i, j) = 0.0;
        }
    if (is_zero(a) || is_zero(b)) continue;
    parts[p] = a;
    parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(p) + 1, b);
    const Splitting fine = parts_of(src, parts);
    const bool product_nonzero_oracle = !(testsupport::to_eigen(b) * testsupport::to_eigen(a)).isZero(0.0);
    const auto w = refinement_step(fine, coarse);
    CHECK(w.has_value() == product_nonzero_oracle);
    if (!w) continue;
    // Condition check from the witness, independent of the search.
    const Splitting c = cyclic_shift(coarse, w->coarse_shift);
    const Splitting f = cyclic_shift(fine, w->fine_shift);
    const std::size_t d = c.order();
    for (std::size_t q = 0; q + 1 < d; ++q) CHECK(f.part(q) == c.part(q));
    CHECK((f.part(d - 1) + f.part(d)) == c.part(d - 1));
    CHECK(product_nonzero(f.part(d), f.part(d - 1)));
  }
}

TEST_CASE("multi-step refinement through the canonical chain") {
  const NormalizedSystem ns = normalize(testsupport::random_system(6, 3));
  auto src = std::make_shared<const Matrix>(jacobi_matrix(ns));
  const Splitting ftc = build(ns, {Method::FTC, {}}, src);
  const Splitting tu = build(ns, {Method::TU, {}}, src);
  const RefinementResult r = refines(ftc, tu);
  CHECK(r.refines);
  CHECK_FALSE(r.one_step);
  CHECK(r.chain_length == ftc.order() - tu.order() - 1);
  const auto chain = canonical_chain(ftc, tu);
  REQUIRE(chain.has_value());
  CHECK(verify_refinement_chain(ftc, tu, *chain));
  if (chain->size() >= 2) {
    auto shuffled = *chain;
    std::swap(shuffled[0], shuffled[1]);
    CHECK_FALSE(verify_refinement_chain(ftc, tu, shuffled));
  }
  // An empty chain only works for a single step.
  CHECK_FALSE(verify_refinement_chain(ftc, tu, {}));
  const Splitting jac = build(ns, {Method::Jacobi, {}}, src);
  CHECK(verify_refinement_chain(tu, jac, {}));
}

TEST_CASE("essentiality and maximality agree with exhaustive oracles") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 3 + seed % 3;
    const std::size_t d = 2 + seed % 3;
    auto src = dense_jacobi(n, seed * 7 + 1);
    // Thin out the matrix so that zero products actually occur.
    Matrix sparse = *src;
    std::mt19937_64 gen(seed);
    for (double& v : sparse.data())
      if (gen() % 3 == 0) v = 0.0;
    if (is_zero(sparse)) continue;
    auto ssrc = std::make_shared<const Matrix>(sparse);
    const Splitting s = apply_mask(testsupport::random_mask(n, d, seed), ssrc);
    bool small = true;
    for (const auto& p : s.parts()) small = small && p.nnz() <= 14;
    CHECK(is_essential(s) == essential_oracle(s));
    if (small) CHECK(is_maximal(s) == maximal_oracle(s));
    CHECK(is_potentially_optimal(s) == (is_essential(s) && is_maximal(s)));
  }
}

TEST_CASE("order one splittings are essential") {
  auto src = dense_jacobi(4, 2);
  const Splitting s(src, {SparsePart::from_dense(*src)});
  CHECK(is_essential(s));
  CHECK_FALSE(is_maximal(s));
}

TEST_CASE("relative zero test ignores rounding-level products") {
  // Row 0 of a times column 0 of b cancels to a single rounding error.
  const SparsePart a = SparsePart::from_dense(Matrix::from_rows({{0, 1, 1}, {0, 0, 0}, {0, 0, 0}}));
  const SparsePart b = SparsePart::from_dense(Matrix::from_rows({{0, 0, 0}, {0.1 + 0.2, 0, 0}, {-0.3, 0, 0}}));
  CHECK(product_nonzero(a, b));
  CHECK_FALSE(product_nonzero(a, b, ZeroTest{kRandomDataZeroThreshold}));
  CHECK_FALSE(product_nonzero(b, b));
  // The threshold scales with the factors, so tiny data is not zeroed.
  const SparsePart ta = SparsePart::from_dense(Matrix::from_rows({{0, 1e-300}, {0, 0}}));
  const SparsePart tb = SparsePart::from_dense(Matrix::from_rows({{0, 0}, {1.0, 0}}));
  CHECK(product_nonzero(ta, tb, ZeroTest{kRandomDataZeroThreshold}));
}

TEST_CASE("splitting description files") {
  auto src = std::make_shared<const Matrix>(Matrix::from_rows({{0, 1, 2}, {3, 0, 4}, {5, 6, 0}}));
  std::istringstream ok("# upper then lower\n2 3\n1 2 1 3 2 3\n2 1 3 1 3 2\n");
  const Splitting s = apply_mask(read_splitting_mask(ok), src);
  REQUIRE(s.order() == 2);
  CHECK(s.part(0).dense() == strictly_upper(*src));
  CHECK(s.part(1).dense() == strictly_lower(*src));

  std::stringstream round;
  write_splitting_mask(round, s);
  CHECK(apply_mask(read_splitting_mask(round), src).parts() == s.parts());

  auto code_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_splitting_mask(in);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  CHECK(code_of("2 3\n1 2 1 3 2 3\n2 1 3 1 3 2 1 2\n") == ErrorCode::Parse);  // claimed twice
  CHECK(code_of("2 3\n1 1 1 2 1 3 2 3\n2 1 3 1 3 2\n") == ErrorCode::Parse);  // diagonal
  CHECK(code_of("2 3\n1 2 1 3 2 3\n2 1 3 1 3 4\n") == ErrorCode::Parse);      // out of range
  CHECK(code_of("2 3\n1 2 1 3\n2 1 3 1 3 2\n") == ErrorCode::Parse);          // unclaimed (2,3)
  CHECK(code_of("2 3\n1 2 1\n") == ErrorCode::Parse);                         // odd index count
  CHECK(code_of("2 3\n1 2 1 3 2 3\n") == ErrorCode::Parse);                   // missing part line
  CHECK(code_of("") == ErrorCode::Parse);

  // Written files hand unclaimed zero entries to the last part.
  auto sparse = std::make_shared<const Matrix>(Matrix::from_rows({{0, 1, 0}, {0, 0, 4}, {5, 0, 0}}));
  const Splitting sp(sparse, {SparsePart::from_dense(strictly_upper(*sparse)),
                              SparsePart::from_dense(strictly_lower(*sparse))});
  std::stringstream out;
  write_splitting_mask(out, sp);
  CHECK(apply_mask(read_splitting_mask(out), sparse).parts() == sp.parts());
}
