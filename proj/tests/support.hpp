#pragma once

// Shared helpers for the unit and acceptance tests. The oracles here are
// deliberately built from textbook formulas with Eigen, not from library
// code paths.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "splitkit/linalg.hpp"
#include "splitkit/splitting.hpp"

namespace testsupport {

using splitkit::Matrix;
using splitkit::Vector;

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

// Dense n x n matrix with entries uniform in [-1, 1] and a dominant
// diagonal, drawn with the standard library engine.
inline Matrix random_dense(std::size_t n, std::uint64_t seed, double diag = 0.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = i == j ? diag + 1.0 + std::abs(u(gen)) : u(gen);
  return a;
}

inline Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (double& x : v) x = u(gen);
  return v;
}

inline splitkit::LinearSystem random_system(std::size_t n, std::uint64_t seed, double diag = 0.0) {
  splitkit::LinearSystem s{random_dense(n, seed, diag), {}};
  s.b = random_vector(n, seed + 17);
  return s;
}

// Random mask: every off-diagonal position goes to a uniformly chosen part.
inline splitkit::SplittingMask random_mask(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, d - 1);
  splitkit::SplittingMask m{n, std::vector<std::vector<std::uint8_t>>(d, std::vector<std::uint8_t>(n * n, 0))};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.parts[i == j ? 0 : pick(gen)][i * n + j] = 1;
  return m;
}

inline std::vector<Matrix> dense_parts(const splitkit::Splitting& s) {
  std::vector<Matrix> out;
  for (const auto& p : s.parts()) out.push_back(p.dense());
  return out;
}

// (I - L_blk)^{-1} U_blk from the block definition: block (p, q) of L_blk is
// B_q for q < p and of U_blk is B_q for q >= p.
inline Eigen::MatrixXd block_operator_oracle(const std::vector<Matrix>& parts) {
  const std::size_t d = parts.size(), n = parts[0].rows();
  const Eigen::Index dn = static_cast<Eigen::Index>(d * n);
  Eigen::MatrixXd lo = Eigen::MatrixXd::Zero(dn, dn), up = Eigen::MatrixXd::Zero(dn, dn);
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = 0; q < d; ++q) {
      const Eigen::MatrixXd b = to_eigen(parts[q]);
      auto blk = [&](Eigen::MatrixXd& m) {
        m.block(static_cast<Eigen::Index>(p * n), static_cast<Eigen::Index>(q * n), n, n) = b;
      };
      if (q < p)
        blk(lo);
      else
        blk(up);
    }
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(dn, dn);
  return (i - lo).partialPivLu().solve(up);
}

inline std::vector<std::complex<double>> eigen_nonzero_spectrum(const Eigen::MatrixXd& m, double zero_tol = 1e-10) {
  std::vector<std::complex<double>> out;
  if (m.rows() == 0) return out;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i]) > zero_tol) out.push_back(es.eigenvalues()[i]);
  return out;
}

inline double eigen_radius(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double r = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
  return r;
}

// Independent matching for the oracle side: sort both lists by (re, im)
// after rounding, then compare pairwise with a greedy nearest search.
inline double spectrum_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](auto l, auto r) { return std::abs(l - x) < std::abs(r - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace testsupport
