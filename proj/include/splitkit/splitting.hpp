#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "splitkit/linalg.hpp"

namespace splitkit {

struct Entry {
  std::uint32_t row;
  std::uint32_t col;
  double value;

  bool operator==(const Entry&) const = default;
};

// Sparse square matrix stored row-major (CSR). Parts of a splitting are
// usually very sparse (a single row or column in the finest splittings), so
// every kernel here costs O(nnz) rather than O(n^2).
class SparsePart {
 public:
  SparsePart() = default;
  SparsePart(std::size_t n, std::vector<Entry> entries);

  static SparsePart from_dense(const Matrix& m);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  Matrix dense() const;
  double inf_norm() const;

  // y = B x and y += B x.
  void apply(const double* x, double* y) const;
  void apply_add(const double* x, double* y) const;

  // Sorted indices of nonempty rows / columns.
  std::vector<std::size_t> row_support() const;
  std::vector<std::size_t> col_support() const;

  // Entries of row i as a half-open range into entries().
  std::size_t row_begin(std::size_t i) const { return row_start_[i]; }
  std::size_t row_end(std::size_t i) const { return row_start_[i + 1]; }

  bool operator==(const SparsePart& other) const { return n_ == other.n_ && entries_ == other.entries_; }

 private:
  std::size_t n_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> row_start_;
};

SparsePart operator+(const SparsePart& a, const SparsePart& b);

// Decides whether a matrix product counts as the zero matrix. With
// relative == 0 the test is exact, which is right for structurally defined
// inputs. Generated random data should use a small relative threshold
// scaled by the factor norms.
struct ZeroTest {
  double relative = 0.0;
};

constexpr double kRandomDataZeroThreshold = 1e-14;

// True when the product a * b is nonzero under the given test.
bool product_nonzero(const SparsePart& a, const SparsePart& b, ZeroTest zt = {});

// 0/1 masks over an n x n index set, one per part. Applied to B they give
// the parts B o M_p.
struct SplittingMask {
  std::size_t n = 0;
  std::vector<std::vector<std::uint8_t>> parts;  // row-major n*n each
};

// Ordered list of nonzero parts with disjoint supports whose sum is the
// source matrix exactly.
class Splitting {
 public:
  Splitting(std::shared_ptr<const Matrix> source, std::vector<SparsePart> parts);

  std::size_t order() const { return parts_.size(); }
  std::size_t size() const { return source_->rows(); }
  const std::vector<SparsePart>& parts() const { return parts_; }
  const SparsePart& part(std::size_t p) const { return parts_[p]; }
  const std::shared_ptr<const Matrix>& source() const { return source_; }

  bool same_source(const Splitting& other) const;

 private:
  std::shared_ptr<const Matrix> source_;
  std::vector<SparsePart> parts_;
};

// Builds a splitting from masks. Zero parts are dropped.
Splitting apply_mask(const SplittingMask& mask, std::shared_ptr<const Matrix> source);

// Builds a splitting from a list of pre-parts (parts given as dense
// matrices whose entries are copied from the source). Zero parts are
// dropped; the remaining parts are validated as a splitting.
Splitting from_pre_parts(std::shared_ptr<const Matrix> source, const std::vector<SparsePart>& pre_parts);

// Moves the last part to the front, r times.
Splitting cyclic_shift(const Splitting& s, std::size_t r = 1);

struct RefinementWitness {
  std::size_t coarse_shift;  // r
  std::size_t fine_shift;    // s
  std::size_t split_index;   // index (0-based, unshifted) of the coarse part that was split
};

// One-step refinement test: fine has order d + 1, coarse has order d, and
// some pair of cyclic shifts makes fine agree with coarse except that the
// last coarse part is split into two parts whose product (later times
// earlier) is nonzero.
std::optional<RefinementWitness> refinement_step(const Splitting& fine, const Splitting& coarse, ZeroTest zt = {});

// chain lists the intermediate splittings strictly between coarse and fine,
// ordered from coarse towards fine.
bool verify_refinement_chain(const Splitting& fine, const Splitting& coarse, const std::vector<Splitting>& chain,
                             ZeroTest zt = {});

// When fine subdivides each coarse part into a contiguous run of fine parts
// (after some cyclic shift of fine), returns the telescoping chain that
// peels one leading part off each run per step.
std::optional<std::vector<Splitting>> canonical_chain(const Splitting& fine, const Splitting& coarse);

struct RefinementResult {
  bool refines = false;
  bool one_step = false;
  std::optional<RefinementWitness> witness;
  std::size_t chain_length = 0;
};

// fine refines coarse either by a single step or through the canonical
// chain.
RefinementResult refines(const Splitting& fine, const Splitting& coarse, ZeroTest zt = {});

bool is_essential(const Splitting& s, ZeroTest zt = {});
bool is_maximal(const Splitting& s);
bool is_potentially_optimal(const Splitting& s, ZeroTest zt = {});

// Splitting description file: first line "d n", then one line per part
// holding whitespace separated 1-based "i j" pairs. Every off-diagonal
// position must be claimed exactly once; diagonal positions may not be
// claimed.
SplittingMask read_splitting_mask(std::istream& in);
SplittingMask read_splitting_mask_file(const std::string& path);
void write_splitting_mask(std::ostream& out, const Splitting& s);

}  // namespace splitkit
