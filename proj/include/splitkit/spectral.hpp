#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "splitkit/catalog.hpp"
#include "splitkit/linalg.hpp"
#include "splitkit/splitting.hpp"

namespace splitkit {

constexpr std::size_t kDenseCap = 600;

// The block iteration operator (I - L_blk)^{-1} U_blk acting on d stacked
// vectors of length n, applied matrix-free by one homogeneous sweep.
class BlockOperator {
 public:
  explicit BlockOperator(Splitting s);

  std::size_t dim() const { return s_.order() * s_.size(); }
  std::size_t order() const { return s_.order(); }
  std::size_t n() const { return s_.size(); }
  const Splitting& splitting() const { return s_; }

  void apply(const double* in, double* out) const;
  Vector apply(const Vector& in) const;

 private:
  Splitting s_;
};

// Full dn x dn matrix. Fails with CapExceeded when dn > cap.
Matrix dense_block_matrix(const BlockOperator& op, std::size_t cap = kDenseCap);

// The operator only reads each stage through B_q x_q, so it equals
// (block op) o P where P keeps the column supports of the parts. Moving P
// to the other side gives a matrix of size sum |colsupp(B_q)| with the same
// nonzero spectrum. The row-support variant does the same with
// diag(B_q) (I - L_blk)^{-1} R. The smaller of the two is used.
enum class CompressionForm { Column, Row };

struct CompressedOperator {
  Matrix k;
  CompressionForm form;
};

std::size_t compressed_dim(const BlockOperator& op);
CompressedOperator compressed_operator(const BlockOperator& op, std::size_t cap = kDenseCap);

enum class SpectralBackend { Auto, Dense, Krylov, PowerGrowth };

std::string backend_name(SpectralBackend b);

struct SpectralOptions {
  double tolerance = 1e-8;
  SpectralBackend backend = SpectralBackend::Auto;
  std::size_t dense_cap = kDenseCap;
  std::size_t krylov_subspace = 50;
  std::size_t max_restarts = 400;
  std::size_t max_power_iters = 200000;
  std::uint64_t seed = 0x5eed;
  // Run the power-growth estimate alongside the Krylov backend.
  bool cross_check = true;
};

struct SpectralReport {
  double rho = 0.0;
  std::string method;
  std::size_t iterations = 0;
  double residual_estimate = 0.0;
  bool converged = false;
  bool nilpotent = false;
  double cross_check = -1.0;  // negative when not computed
};

SpectralReport spectral_radius(const BlockOperator& op, const SpectralOptions& opts = {});
SpectralReport spectral_radius(const Matrix& a, const SpectralOptions& opts = {});

// Radius for a named method: classical methods use their n x n matrix, the
// rest their block operator.
SpectralReport method_spectral_radius(const NormalizedSystem& ns, const MethodSpec& spec,
                                      const SpectralOptions& opts = {},
                                      std::shared_ptr<const Matrix> jacobi = nullptr);

constexpr double kZeroEigenvalue = 1e-10;

std::vector<std::complex<double>> nonzero_spectrum(const Matrix& a, double zero_tol = kZeroEigenvalue);
// Through the full block matrix (cap applies).
std::vector<std::complex<double>> nonzero_spectrum_dense(const BlockOperator& op, double zero_tol = kZeroEigenvalue,
                                                         std::size_t cap = kDenseCap);
// Through the compressed operator.
std::vector<std::complex<double>> nonzero_spectrum(const BlockOperator& op, double zero_tol = kZeroEigenvalue);

struct SpectrumMatch {
  bool matched = false;
  double max_deviation = 0.0;
};

// Greedy nearest-neighbour matching of two eigenvalue lists; sizes must
// agree and every pair must be within tol.
SpectrumMatch match_spectra(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b,
                            double tol = 1e-8);

// Exact infinity norm of the block operator. The dense route forms the
// matrix; the matrix-free route carries the n x dn block rows through the
// sweep recurrence.
double block_inf_norm(const BlockOperator& op, std::size_t cap = kDenseCap);
double block_inf_norm_matrix_free(const BlockOperator& op);

// True when the directed graph of the nonzero pattern has no cycle, which
// makes the matrix nilpotent.
bool structurally_nilpotent(const Matrix& a);

}  // namespace splitkit
