#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "splitkit/linalg.hpp"
#include "splitkit/splitting.hpp"

namespace splitkit {

enum class Method {
  Jacobi,
  TU,
  TL,
  FGS,
  BGS,
  SGS,
  ModifiedSGS,
  FUTC,
  FLTC,
  FUTR,
  FLTR,
  FTC,
  FTR,
  TC22,
  TR22,
  AFTC_L,
  AFTC_U,
  AFTR_L,
  AFTR_U,
  AFTC_L_compact,
  AFTC_U_compact,
  AFTR_L_compact,
  AFTR_U_compact,
  AMKS,
};

// Optional parameters. block_split overrides the boundary used by TC22 and
// TR22 (default: nu(n)). amks_blocks selects the number of contiguous row
// groups for AMKS (default: one per row).
struct MethodParams {
  std::optional<std::size_t> block_split;
  std::optional<std::size_t> amks_blocks;
};

struct MethodSpec {
  Method method = Method::Jacobi;
  MethodParams params;
};

const std::vector<Method>& all_methods();
std::string method_name(Method m);
// Case-insensitive. AMKS accepts an optional ":k" suffix for k row groups.
MethodSpec parse_method(const std::string& name);
std::string method_label(const MethodSpec& spec);

// Methods whose natural form is an n x n iteration matrix.
bool is_classical(Method m);

// nu = n/2 - 1 for even n and (n - 1)/2 for odd n.
std::size_t nu(std::size_t n);

// Single-column and single-row pieces of the strict triangles (1-based
// index as in the method definitions): column j of U (j = 2..n), column j
// of L (j = 1..n-1), row i of U (i = 1..n-1), row i of L (i = 2..n).
SparsePart upper_column(const Matrix& upper, std::size_t j);
SparsePart lower_column(const Matrix& lower, std::size_t j);
SparsePart upper_row(const Matrix& upper, std::size_t i);
SparsePart lower_row(const Matrix& lower, std::size_t i);

// Pre-parts of a named method before zero parts are dropped.
std::vector<SparsePart> method_pre_parts(const NormalizedSystem& ns, const MethodSpec& spec);

// The splitting realising a method. Classical methods map to the splitting
// whose iteration reproduces them: FGS -> FLTC, BGS -> FUTC, SGS and
// ModifiedSGS -> FTC.
Splitting build(const NormalizedSystem& ns, const MethodSpec& spec);
Splitting build(const NormalizedSystem& ns, const MethodSpec& spec, std::shared_ptr<const Matrix> jacobi);

// (I - L)^{-1} U and friends; Jacobi gives L + U. ModifiedSGS gives the
// operator of the modified symmetric iteration, whose nonzero spectrum
// equals that of SGS.
Matrix classical_iteration_matrix(const NormalizedSystem& ns, Method m);

// Diagonal 0/1 selectors summing to the identity, stored as the owning
// group of every row.
struct DecompositionOfIdentity {
  std::size_t n = 0;
  std::vector<std::size_t> group_of_row;
  std::size_t groups = 0;

  static DecompositionOfIdentity per_row(std::size_t n);
  static DecompositionOfIdentity contiguous(std::size_t n, std::size_t groups);
  static DecompositionOfIdentity from_groups(std::size_t n, const std::vector<std::size_t>& group_of_row);
};

// Splitting {P_1 B, ..., P_d B}; groups whose rows of B are zero drop out.
Splitting amks_splitting(const NormalizedSystem& ns, const DecompositionOfIdentity& doi);
Splitting amks_splitting(const NormalizedSystem& ns, const DecompositionOfIdentity& doi,
                         std::shared_ptr<const Matrix> jacobi);
// prod_{p = d..1} (P_p B + I - P_p).
Matrix amks_iteration_matrix(const NormalizedSystem& ns, const DecompositionOfIdentity& doi);

}  // namespace splitkit
