#include <doctest.h>

#include <cmath>

#include "splitkit/catalog.hpp"
#include "splitkit/eig.hpp"
#include "splitkit/error.hpp"
#include "splitkit/genmat.hpp"
#include "splitkit/spectral.hpp"
#include "support.hpp"

using namespace splitkit;
using testsupport::to_eigen;

namespace {

NormalizedSystem dense_ns(std::size_t n, std::uint64_t seed) { return normalize(testsupport::random_system(n, seed)); }

Splitting random_splitting(std::size_t n, std::size_t d, std::uint64_t seed) {
  const NormalizedSystem ns = dense_ns(n, seed);
  return apply_mask(testsupport::random_mask(n, d, seed + 1), std::make_shared<const Matrix>(jacobi_matrix(ns)));
}

// Zero eigenvalues in nontrivial Jordan blocks come back from any dense
// solver as clusters of size eps^(1/k), so spectra are compared above a cut.
constexpr double kCut = 1e-3;

double eigen_inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

TEST_CASE("dense block matrix equals the block formula") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Splitting s = random_splitting(5, 2 + seed % 4, seed);
    const BlockOperator op(s);
    const Eigen::MatrixXd oracle = testsupport::block_operator_oracle(testsupport::dense_parts(s));
    CHECK(to_eigen(dense_block_matrix(op)).isApprox(oracle, 1e-12));
  }
  const BlockOperator big(random_splitting(8, 4, 3));
  try {
    dense_block_matrix(big, 10);
    FAIL("cap not enforced");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
  }
}

TEST_CASE("compressed operator keeps the nonzero spectrum") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Splitting s = random_splitting(6, 2 + seed % 5, 100 + seed);
    const BlockOperator op(s);
    const auto full =
        testsupport::eigen_nonzero_spectrum(testsupport::block_operator_oracle(testsupport::dense_parts(s)), kCut);
    CHECK(match_spectra(nonzero_spectrum(op, kCut), full, 1e-8).matched);
    CHECK(match_spectra(nonzero_spectrum_dense(op, kCut), full, 1e-8).matched);
    CHECK(compressed_dim(op) <= op.dim());
  }
  // Single-column parts shrink to a matrix no larger than the full triangle count.
  const NormalizedSystem ns = dense_ns(9, 4);
  const BlockOperator ftc(build(ns, {Method::FTC, {}}));
  CHECK(compressed_dim(ftc) < ftc.dim());
}

TEST_CASE("iterative backends agree with the dense radius") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const NormalizedSystem ns = normalize(generate({MatrixClass::Class1, 30, 0.9, seed}));
    for (Method m : {Method::TU, Method::FTC, Method::AFTC_L_compact, Method::TC22}) {
      const BlockOperator op(build(ns, {m, {}}));
      SpectralOptions dense;
      dense.backend = SpectralBackend::Dense;
      const SpectralReport d = spectral_radius(op, dense);
      CHECK(d.method == "dense_qr");
      SpectralOptions kr;
      kr.backend = SpectralBackend::Krylov;
      const SpectralReport k = spectral_radius(op, kr);
      CHECK(k.method == "krylov");
      CHECK(k.converged);
      CHECK(k.rho == doctest::Approx(d.rho).epsilon(1e-6));
      SpectralOptions pw;
      pw.backend = SpectralBackend::PowerGrowth;
      const SpectralReport p = spectral_radius(op, pw);
      CHECK(p.method == "power_growth");
      CHECK(p.rho == doctest::Approx(d.rho).epsilon(1e-3));
    }
  }
}

TEST_CASE("triangular parts give a nilpotent operator") {
  // Two parts from the same strict triangle: every product chain is acyclic.
  const NormalizedSystem ns = dense_ns(6, 5);
  const SparsePart c6 = upper_column(ns.upper, 6), c3 = upper_column(ns.upper, 3);
  auto src = std::make_shared<const Matrix>((c6 + c3).dense());
  const Splitting s = from_pre_parts(src, {c6, c3});
  const SpectralReport r = spectral_radius(BlockOperator(s));
  CHECK(r.nilpotent);
  CHECK(r.rho == 0.0);
  CHECK(structurally_nilpotent(ns.upper));
  CHECK_FALSE(structurally_nilpotent(jacobi_matrix(ns)));
}

TEST_CASE("matrix-free block norm equals the dense one") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Splitting s = random_splitting(5, 2 + seed % 4, 300 + seed);
    const BlockOperator op(s);
    const double oracle = eigen_inf_norm(testsupport::block_operator_oracle(testsupport::dense_parts(s)));
    CHECK(block_inf_norm(op) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(block_inf_norm_matrix_free(op) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("block norm relative to the Jacobi norm") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 5, d = 2 + seed % 4;
    const double phi = seed % 2 ? 0.8 : 1.4;
    const NormalizedSystem ns = normalize(generate({MatrixClass::Class1, n, phi, seed}));
    auto bj = std::make_shared<const Matrix>(jacobi_matrix(ns));
    const Splitting s = apply_mask(testsupport::random_mask(n, d, seed), bj);
    const double nj = inf_norm(*bj), nb = block_inf_norm(BlockOperator(s));
    if (nj <= 1.0) {
      CHECK(nb == doctest::Approx(nj).epsilon(1e-12));
    } else {
      CHECK(nb >= nj * (1 - 1e-12));
      CHECK(nb <= std::pow(nj, static_cast<double>(s.order())) * (1 + 1e-12));
    }
  }
}

TEST_CASE("exchange matrix block operator is printed exactly") {
  const NormalizedSystem ns = builtin_example(BuiltinExample::Exchange2);
  const BlockOperator op(build(ns, {Method::TU, {}}));
  const Matrix t = dense_block_matrix(op);
  CHECK(t == Matrix::from_rows({{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 1, 0}, {0, 0, 1, 0}}));
  CHECK(inf_norm(t) == 1.0);
  CHECK(one_norm(t) == 3.0);
  CHECK(block_inf_norm_matrix_free(op) == 1.0);
}

TEST_CASE("unit radius example spectra") {
  const NormalizedSystem ns = builtin_example(BuiltinExample::UnitRadius3);
  const Matrix bj = jacobi_matrix(ns);
  CHECK(spectral_radius_dense(bj) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<std::complex<double>> want{{0.23931, 0.97094}, {0.23931, -0.97094}, {-0.47862, 0.0}};
  CHECK(match_spectra(eigenvalues(bj), want, 1e-4).matched);
  const Matrix t = dense_block_matrix(BlockOperator(build(ns, {Method::TU, {}})));
  const auto all = eigenvalues(t);
  int zeros = 0;
  for (auto z : all) zeros += std::abs(z) < 1e-8;
  CHECK(zeros == 4);
  // The nonzero pair sums to the trace, which is -g^2 / 2 by hand: (I - U)^{-1} = I + U
  // here, and only the (1,1) entry of the stacked update survives on the diagonal.
  const double g = 1.241706082017;
  double trace = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i) trace += t(i, i);
  CHECK(trace == doctest::Approx(-0.5 * g * g).epsilon(1e-12));
  // So the real part is negative; the modulus 0.69183 is what the printed
  // +0.38545 +- 0.57449i value also gives.
  CHECK(match_spectra(nonzero_spectrum(t, kCut), {{-0.38545, 0.57449}, {-0.38545, -0.57449}}, 1e-4).matched);
}

TEST_CASE("cyclic shift preserves spectra and moves eigenvectors") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 4, d = 3;
    const Splitting s = random_splitting(n, d, 500 + seed);
    if (s.order() != d) continue;
    const Splitting sh = cyclic_shift(s);
    const Eigen::MatrixXd t = testsupport::block_operator_oracle(testsupport::dense_parts(s));
    const Eigen::MatrixXd t2 = testsupport::block_operator_oracle(testsupport::dense_parts(sh));
    CHECK(testsupport::spectrum_distance(testsupport::eigen_nonzero_spectrum(t, kCut),
                                        testsupport::eigen_nonzero_spectrum(t2, kCut)) < 1e-8);
    Eigen::EigenSolver<Eigen::MatrixXd> es(t);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const std::complex<double> lam = es.eigenvalues()[k];
      if (std::abs(lam) < 1e-6) continue;
      const Eigen::VectorXcd v = es.eigenvectors().col(k);
      Eigen::VectorXcd w(v.size());
      // [a_1, ..., a_d] becomes [a_d, lam a_1, ..., lam a_{d-1}].
      w.segment(0, n) = v.segment((d - 1) * n, n);
      for (std::size_t p = 1; p < d; ++p) w.segment(p * n, n) = lam * v.segment((p - 1) * n, n);
      const Eigen::VectorXcd r = t2.cast<std::complex<double>>() * w - lam * w;
      CHECK(r.norm() < 1e-9 * std::max(1.0, w.norm()));
    }
  }
}

TEST_CASE("spectrum matching") {
  const std::vector<std::complex<double>> a{{1, 0}, {0, 1}, {0, -1}};
  CHECK(match_spectra(a, {{0, -1}, {1, 0}, {0, 1}}).matched);
  CHECK_FALSE(match_spectra(a, {{1, 0}, {0, 1}}).matched);
  const auto m = match_spectra(a, {{1, 1e-3}, {0, 1}, {0, -1}}, 1e-2);
  CHECK(m.matched);
  CHECK(m.max_deviation == doctest::Approx(1e-3));
}

TEST_CASE("nonnegative Jacobi radius is monotone in scaling") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const NormalizedSystem ns = normalize(generate({MatrixClass::Class2, 12, 1.0, seed}));
    double prev = -1.0;
    for (double g : {0.3, 0.6, 0.9, 1.2}) {
      NormalizedSystem scaled = ns;
      for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j) {
          scaled.lower(i, j) *= g;
          scaled.upper(i, j) *= g;
        }
      const double r = spectral_radius(BlockOperator(build(scaled, {Method::FTC, {}}))).rho;
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("method radius uses the n x n matrix for classical methods") {
  const NormalizedSystem ns = dense_ns(8, 77);
  const double via_matrix = spectral_radius_dense(classical_iteration_matrix(ns, Method::SGS));
  CHECK(method_spectral_radius(ns, {Method::SGS, {}}).rho == doctest::Approx(via_matrix).epsilon(1e-10));
  const double ftc = method_spectral_radius(ns, {Method::FTC, {}}).rho;
  CHECK(ftc == doctest::Approx(via_matrix).epsilon(1e-8));
}


TEST_CASE("zero Jacobi matrix gives radius zero for every method") {
  const NormalizedSystem ns = normalize({Matrix::identity(4), Vector(4, 1.0)});
  for (Method m : all_methods()) {
    const SpectralReport r = method_spectral_radius(ns, {m, {}});
    CHECK(r.rho == 0.0);
    CHECK(r.nilpotent);
  }
}
