#include "splitkit/splitting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "splitkit/error.hpp"

namespace splitkit {

SparsePart::SparsePart(std::size_t n, std::vector<Entry> entries) : n_(n), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  row_start_.assign(n_ + 1, 0);
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const Entry& e = entries_[k];
    if (e.row >= n_ || e.col >= n_) fail(ErrorCode::ShapeMismatch, "sparse entry out of range");
    if (k && entries_[k - 1].row == e.row && entries_[k - 1].col == e.col)
      fail(ErrorCode::InvalidArgument, "duplicate sparse entry");
    ++row_start_[e.row + 1];
  }
  for (std::size_t i = 0; i < n_; ++i) row_start_[i + 1] += row_start_[i];
}

SparsePart SparsePart::from_dense(const Matrix& m) {
  if (!m.square()) fail(ErrorCode::ShapeMismatch, "part must be square");
  std::vector<Entry> e;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) e.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), m(i, j)});
  return SparsePart(m.rows(), std::move(e));
}

Matrix SparsePart::dense() const {
  Matrix m(n_, n_);
  for (const Entry& e : entries_) m(e.row, e.col) = e.value;
  return m;
}

double SparsePart::inf_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) s += std::fabs(entries_[k].value);
    best = std::max(best, s);
  }
  return best;
}

void SparsePart::apply(const double* x, double* y) const {
  for (std::size_t i = 0; i < n_; ++i) y[i] = 0.0;
  apply_add(x, y);
}

void SparsePart::apply_add(const double* x, double* y) const {
  for (const Entry& e : entries_) y[e.row] += e.value * x[e.col];
}

std::vector<std::size_t> SparsePart::row_support() const {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < n_; ++i)
    if (row_start_[i + 1] > row_start_[i]) r.push_back(i);
  return r;
}

std::vector<std::size_t> SparsePart::col_support() const {
  std::vector<std::uint8_t> seen(n_, 0);
  for (const Entry& e : entries_) seen[e.col] = 1;
  std::vector<std::size_t> c;
  for (std::size_t j = 0; j < n_; ++j)
    if (seen[j]) c.push_back(j);
  return c;
}

SparsePart operator+(const SparsePart& a, const SparsePart& b) {
  if (a.size() != b.size()) fail(ErrorCode::ShapeMismatch, "part size mismatch");
  Matrix m = a.dense();
  for (const Entry& e : b.entries()) m(e.row, e.col) += e.value;
  return SparsePart::from_dense(m);
}

bool product_nonzero(const SparsePart& a, const SparsePart& b, ZeroTest zt) {
  if (a.size() != b.size()) fail(ErrorCode::ShapeMismatch, "part size mismatch");
  if (a.empty() || b.empty()) return false;
  const double tol = zt.relative > 0.0 ? zt.relative * a.inf_norm() * b.inf_norm() : 0.0;
  const std::size_t n = a.size();
  // Row by row accumulation of (a * b)(i, :).
  std::vector<double> acc(n, 0.0);
  std::vector<std::uint32_t> touched;
  for (std::size_t i = 0; i < n; ++i) {
    touched.clear();
    for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k) {
      const Entry& ea = a.entries()[k];
      for (std::size_t m = b.row_begin(ea.col); m < b.row_end(ea.col); ++m) {
        const Entry& eb = b.entries()[m];
        if (acc[eb.col] == 0.0) touched.push_back(eb.col);
        acc[eb.col] += ea.value * eb.value;
      }
    }
    bool nonzero = false;
    for (std::uint32_t j : touched) {
      if (std::fabs(acc[j]) > tol) nonzero = true;
      acc[j] = 0.0;
    }
    if (nonzero) return true;
  }
  return false;
}

Splitting::Splitting(std::shared_ptr<const Matrix> source, std::vector<SparsePart> parts)
    : source_(std::move(source)), parts_(std::move(parts)) {
  if (!source_ || !source_->square()) fail(ErrorCode::ShapeMismatch, "splitting source must be a square matrix");
  const std::size_t n = source_->rows();
  if (parts_.empty()) fail(ErrorCode::InvalidArgument, "a splitting needs at least one nonzero part");
  std::vector<std::uint8_t> claimed(n * n, 0);
  for (std::size_t p = 0; p < parts_.size(); ++p) {
    const SparsePart& part = parts_[p];
    if (part.size() != n) fail(ErrorCode::ShapeMismatch, "part size does not match source");
    if (part.empty()) fail(ErrorCode::InvalidArgument, "part " + std::to_string(p + 1) + " is zero");
    for (const Entry& e : part.entries()) {
      if ((*source_)(e.row, e.col) != e.value)
        fail(ErrorCode::InvalidArgument, "part " + std::to_string(p + 1) + " entry differs from the source");
      if (claimed[e.row * n + e.col]++)
        fail(ErrorCode::InvalidArgument, "parts overlap at (" + std::to_string(e.row + 1) + "," +
                                             std::to_string(e.col + 1) + ")");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((*source_)(i, j) != 0.0 && !claimed[i * n + j])
        fail(ErrorCode::InvalidArgument, "parts do not cover source entry (" + std::to_string(i + 1) + "," +
                                             std::to_string(j + 1) + ")");
}

bool Splitting::same_source(const Splitting& other) const {
  return source_ == other.source_ || *source_ == *other.source_;
}

Splitting apply_mask(const SplittingMask& mask, std::shared_ptr<const Matrix> source) {
  if (!source || !source->square()) fail(ErrorCode::ShapeMismatch, "mask source must be square");
  const std::size_t n = source->rows();
  if (mask.n != n) fail(ErrorCode::ShapeMismatch, "mask size does not match matrix");
  std::vector<std::uint8_t> cover(n * n, 0);
  for (const auto& m : mask.parts) {
    if (m.size() != n * n) fail(ErrorCode::ShapeMismatch, "mask part has wrong size");
    for (std::size_t k = 0; k < n * n; ++k) {
      if (m[k] > 1) fail(ErrorCode::InvalidArgument, "mask entries must be 0 or 1");
      cover[k] += m[k];
    }
  }
  for (std::size_t k = 0; k < n * n; ++k)
    if (cover[k] != 1) fail(ErrorCode::InvalidArgument, "masks do not partition the all-ones matrix");
  std::vector<SparsePart> parts;
  for (const auto& m : mask.parts) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m[i * n + j] && (*source)(i, j) != 0.0)
          e.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), (*source)(i, j)});
    if (!e.empty()) parts.emplace_back(n, std::move(e));
  }
  if (parts.empty()) fail(ErrorCode::InvalidArgument, "all parts are zero (the iteration matrix is zero)");
  return Splitting(std::move(source), std::move(parts));
}

Splitting from_pre_parts(std::shared_ptr<const Matrix> source, const std::vector<SparsePart>& pre_parts) {
  std::vector<SparsePart> parts;
  for (const SparsePart& p : pre_parts)
    if (!p.empty()) parts.push_back(p);
  if (parts.empty()) fail(ErrorCode::InvalidArgument, "all parts are zero (the iteration matrix is zero)");
  return Splitting(std::move(source), std::move(parts));
}

Splitting cyclic_shift(const Splitting& s, std::size_t r) {
  const std::size_t d = s.order();
  r %= d;
  std::vector<SparsePart> parts(d);
  for (std::size_t p = 0; p < d; ++p) parts[(p + r) % d] = s.part(p);
  return Splitting(s.source(), std::move(parts));
}

namespace {

// Entries of a and b are disjoint and together equal c.
bool splits_part(const SparsePart& c, const SparsePart& a, const SparsePart& b) {
  if (a.empty() || b.empty() || a.nnz() + b.nnz() != c.nnz()) return false;
  std::vector<Entry> merged;
  merged.reserve(c.nnz());
  std::merge(a.entries().begin(), a.entries().end(), b.entries().begin(), b.entries().end(),
             std::back_inserter(merged),
             [](const Entry& x, const Entry& y) { return x.row != y.row ? x.row < y.row : x.col < y.col; });
  return merged == c.entries();
}

}  // namespace

std::optional<RefinementWitness> refinement_step(const Splitting& fine, const Splitting& coarse, ZeroTest zt) {
  if (!fine.same_source(coarse)) fail(ErrorCode::InvalidArgument, "splittings come from different matrices");
  const std::size_t d = coarse.order();
  if (fine.order() != d + 1) return std::nullopt;
  // Shifted part p of a splitting of order m is part (p - shift) mod m.
  auto coarse_at = [&](std::size_t r, std::size_t p) -> const SparsePart& {
    return coarse.part((p + d - r % d) % d);
  };
  auto fine_at = [&](std::size_t s, std::size_t p) -> const SparsePart& {
    return fine.part((p + d + 1 - s % (d + 1)) % (d + 1));
  };
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t s = 0; s <= d; ++s) {
      bool same = true;
      for (std::size_t p = 0; p + 1 < d && same; ++p) same = coarse_at(r, p) == fine_at(s, p);
      if (!same) continue;
      const SparsePart& cd = coarse_at(r, d - 1);
      const SparsePart& f1 = fine_at(s, d - 1);
      const SparsePart& f2 = fine_at(s, d);
      if (!splits_part(cd, f1, f2)) continue;
      if (!product_nonzero(f2, f1, zt)) continue;
      return RefinementWitness{r, s, (2 * d - 1 - r) % d};
    }
  }
  return std::nullopt;
}

bool verify_refinement_chain(const Splitting& fine, const Splitting& coarse, const std::vector<Splitting>& chain,
                             ZeroTest zt) {
  const Splitting* prev = &coarse;
  for (const Splitting& next : chain) {
    if (!refinement_step(next, *prev, zt)) return false;
    prev = &next;
  }
  return refinement_step(fine, *prev, zt).has_value();
}

std::optional<std::vector<Splitting>> canonical_chain(const Splitting& fine, const Splitting& coarse) {
  if (!fine.same_source(coarse)) fail(ErrorCode::InvalidArgument, "splittings come from different matrices");
  const std::size_t d = coarse.order();
  const std::size_t m = fine.order();
  if (m <= d + 1) return std::nullopt;
  const std::size_t n = coarse.size();
  for (std::size_t s = 0; s < m; ++s) {
    const Splitting shifted = cyclic_shift(fine, s);
    // Greedily match each coarse part with a contiguous run of fine parts.
    std::vector<std::size_t> run_start(d + 1, 0);
    std::size_t next = 0;
    bool ok = true;
    for (std::size_t c = 0; c < d && ok; ++c) {
      run_start[c] = next;
      const SparsePart& target = coarse.part(c);
      std::vector<std::uint8_t> in_target(n * n, 0);
      for (const Entry& e : target.entries()) in_target[e.row * n + e.col] = 1;
      std::size_t covered = 0;
      while (covered < target.nnz() && next < m) {
        for (const Entry& e : shifted.part(next).entries()) {
          if (!in_target[e.row * n + e.col]) {
            ok = false;
            break;
          }
          ++covered;
        }
        if (!ok) break;
        ++next;
      }
      if (covered != target.nnz()) ok = false;
    }
    if (!ok || next != m) continue;
    run_start[d] = m;
    std::vector<Splitting> chain;
    std::vector<SparsePart> current(coarse.parts().begin(), coarse.parts().end());
    // current holds coarse parts; index mapping tracks where each coarse
    // part's remainder sits.
    std::size_t offset = 0;
    for (std::size_t c = 0; c < d; ++c) {
      const std::size_t len = run_start[c + 1] - run_start[c];
      std::size_t pos = c + offset;
      for (std::size_t k = 0; k + 1 < len; ++k) {
        const SparsePart head = shifted.part(run_start[c] + k);
        SparsePart rest = shifted.part(run_start[c] + k + 1);
        for (std::size_t t = run_start[c] + k + 2; t < run_start[c + 1]; ++t) rest = rest + shifted.part(t);
        current[pos] = head;
        current.insert(current.begin() + static_cast<std::ptrdiff_t>(pos) + 1, rest);
        ++pos;
        ++offset;
        if (current.size() < m) chain.emplace_back(coarse.source(), current);
      }
    }
    return chain;
  }
  return std::nullopt;
}

RefinementResult refines(const Splitting& fine, const Splitting& coarse, ZeroTest zt) {
  RefinementResult res;
  if (auto w = refinement_step(fine, coarse, zt)) {
    res.refines = true;
    res.one_step = true;
    res.witness = w;
    return res;
  }
  if (auto chain = canonical_chain(fine, coarse)) {
    res.chain_length = chain->size();
    res.refines = verify_refinement_chain(fine, coarse, *chain, zt);
  }
  return res;
}

bool is_essential(const Splitting& s, ZeroTest zt) {
  const std::size_t d = s.order();
  if (d == 1) return true;
  for (std::size_t p = 0; p < d; ++p)
    if (!product_nonzero(s.part((p + 1) % d), s.part(p), zt)) return false;
  return true;
}

bool is_maximal(const Splitting& s) {
  const std::size_t n = s.size();
  std::vector<std::uint8_t> has_col(n), has_row(n);
  for (const SparsePart& part : s.parts()) {
    std::fill(has_col.begin(), has_col.end(), 0);
    std::fill(has_row.begin(), has_row.end(), 0);
    for (const Entry& e : part.entries()) {
      has_col[e.col] = 1;
      has_row[e.row] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
      if (has_col[k] && has_row[k]) return false;
  }
  return true;
}

bool is_potentially_optimal(const Splitting& s, ZeroTest zt) { return is_maximal(s) && is_essential(s, zt); }

namespace {

std::size_t parse_index(const std::string& tok, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    fail(ErrorCode::Parse, "malformed index '" + tok + "' on line " + std::to_string(line));
  return v;
}

}  // namespace

SplittingMask read_splitting_mask(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      if (out.find_first_not_of(" \t\r") != std::string::npos && out[out.find_first_not_of(" \t\r")] != '#')
        return true;
    }
    return false;
  };
  if (!next_line(line)) fail(ErrorCode::Parse, "empty splitting description");
  std::istringstream head(line);
  std::string dt, nt, extra;
  if (!(head >> dt >> nt) || (head >> extra)) fail(ErrorCode::Parse, "header must be 'd n' on line 1");
  const std::size_t d = parse_index(dt, lineno);
  const std::size_t n = parse_index(nt, lineno);
  if (d == 0 || n == 0) fail(ErrorCode::Parse, "order and size must be positive");
  SplittingMask mask{n, std::vector<std::vector<std::uint8_t>>(d, std::vector<std::uint8_t>(n * n, 0))};
  std::vector<std::uint8_t> claimed(n * n, 0);
  for (std::size_t p = 0; p < d; ++p) {
    if (!next_line(line)) fail(ErrorCode::Parse, "expected " + std::to_string(d) + " part lines");
    std::istringstream ls(line);
    std::string it, jt;
    while (ls >> it) {
      if (!(ls >> jt)) fail(ErrorCode::Parse, "odd number of indices on line " + std::to_string(lineno));
      const std::size_t i = parse_index(it, lineno);
      const std::size_t j = parse_index(jt, lineno);
      if (i < 1 || j < 1 || i > n || j > n)
        fail(ErrorCode::Parse, "index out of range on line " + std::to_string(lineno));
      if (i == j) fail(ErrorCode::Parse, "diagonal entry claimed on line " + std::to_string(lineno));
      const std::size_t k = (i - 1) * n + (j - 1);
      if (claimed[k]) fail(ErrorCode::Parse, "entry (" + it + "," + jt + ") claimed twice");
      claimed[k] = 1;
      mask.parts[p][k] = 1;
    }
  }
  if (next_line(line)) fail(ErrorCode::Parse, "trailing data after part lines");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        mask.parts[0][i * n + j] = 1;
      } else if (!claimed[i * n + j]) {
        fail(ErrorCode::Parse, "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is unclaimed");
      }
    }
  }
  return mask;
}

SplittingMask read_splitting_mask_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  return read_splitting_mask(in);
}

void write_splitting_mask(std::ostream& out, const Splitting& s) {
  const std::size_t n = s.size();
  const std::size_t d = s.order();
  std::vector<std::uint8_t> claimed(n * n, 0);
  for (const SparsePart& p : s.parts())
    for (const Entry& e : p.entries()) claimed[e.row * n + e.col] = 1;
  out << d << ' ' << n << '\n';
  for (std::size_t p = 0; p < d; ++p) {
    bool first = true;
    for (const Entry& e : s.part(p).entries()) {
      out << (first ? "" : " ") << e.row + 1 << ' ' << e.col + 1;
      first = false;
    }
    // Zero source entries still need an owner; they go to the last part.
    if (p + 1 == d)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && !claimed[i * n + j]) {
            out << (first ? "" : " ") << i + 1 << ' ' << j + 1;
            first = false;
          }
    out << '\n';
  }
}

}  // namespace splitkit
