#include "splitkit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "splitkit/eig.hpp"
#include "splitkit/error.hpp"

namespace splitkit {

using cplx = std::complex<double>;

BlockOperator::BlockOperator(Splitting s) : s_(std::move(s)) {}

void BlockOperator::apply(const double* in, double* out) const {
  const std::size_t n = s_.size();
  const std::size_t d = s_.order();
  std::vector<double> sum(n, 0.0);
  for (std::size_t q = 0; q < d; ++q) s_.part(q).apply_add(in + q * n, sum.data());
  for (std::size_t p = 0; p < d; ++p) {
    double* op = out + p * n;
    std::copy(sum.begin(), sum.end(), op);
    if (p + 1 == d) break;
    const double* ip = in + p * n;
    for (const Entry& e : s_.part(p).entries()) sum[e.row] += e.value * (op[e.col] - ip[e.col]);
  }
}

Vector BlockOperator::apply(const Vector& in) const {
  if (in.size() != dim()) fail(ErrorCode::ShapeMismatch, "block vector length mismatch");
  Vector out(dim());
  apply(in.data(), out.data());
  return out;
}

Matrix dense_block_matrix(const BlockOperator& op, std::size_t cap) {
  const std::size_t m = op.dim();
  if (m > cap)
    fail(ErrorCode::CapExceeded, "block matrix dimension " + std::to_string(m) + " exceeds dense cap " +
                                     std::to_string(cap));
  Matrix k(m, m);
  Vector e(m, 0.0), col(m);
  for (std::size_t j = 0; j < m; ++j) {
    e[j] = 1.0;
    op.apply(e.data(), col.data());
    for (std::size_t i = 0; i < m; ++i) k(i, j) = col[i];
    e[j] = 0.0;
  }
  return k;
}

namespace {

struct Supports {
  std::vector<std::vector<std::size_t>> idx;
  std::vector<std::size_t> offset;  // prefix sums, size d + 1
};

Supports supports(const Splitting& s, CompressionForm form) {
  Supports sp;
  sp.offset.push_back(0);
  for (const SparsePart& p : s.parts()) {
    sp.idx.push_back(form == CompressionForm::Column ? p.col_support() : p.row_support());
    sp.offset.push_back(sp.offset.back() + sp.idx.back().size());
  }
  return sp;
}

// diag(B_q) (I - L_blk)^{-1} R applied to stacked y; writes B_q x_q.
void row_form_apply(const Splitting& s, const std::vector<Vector>& y, std::vector<Vector>& out) {
  const std::size_t n = s.size();
  const std::size_t d = s.order();
  std::vector<Vector> z(d, Vector(n, 0.0));
  Vector acc(n, 0.0);
  for (std::size_t p = d; p-- > 0;) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += y[p][i];
    z[p] = acc;
  }
  Vector sum(n, 0.0), x(n);
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t i = 0; i < n; ++i) x[i] = z[p][i] + sum[i];
    s.part(p).apply(x.data(), out[p].data());
    for (std::size_t i = 0; i < n; ++i) sum[i] += out[p][i];
  }
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vector random_probe(std::size_t m, std::uint64_t seed) {
  Vector v(m);
  std::uint64_t st = seed;
  for (double& x : v) x = 2.0 * (static_cast<double>(splitmix(st) >> 11) * 0x1.0p-53) - 1.0;
  return v;
}

double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

using ApplyFn = std::function<void(const double*, double*)>;

SpectralReport dense_radius(const Matrix& k, const SpectralOptions& opts) {
  SpectralReport rep;
  rep.method = "dense_qr";
  rep.converged = true;
  if (k.rows() == 0 || structurally_nilpotent(k)) {
    rep.nilpotent = true;
    return rep;
  }
  rep.rho = spectral_radius_dense(k);
  rep.residual_estimate = std::numeric_limits<double>::epsilon() * inf_norm(k);
  if (rep.rho < 1e-6) {
    // A tiny computed radius can be rounding noise around a defective zero
    // eigenvalue; confirm with a probe that must vanish after dim steps.
    Vector v = random_probe(k.rows(), opts.seed);
    bool vanished = false;
    for (std::size_t step = 0; step < k.rows() && !vanished; ++step) {
      const double before = inf_norm(v);
      v = k * v;
      const double after = inf_norm(v);
      if (after <= 1e-300 * before) {
        vanished = true;
      } else {
        for (double& x : v) x /= after;
      }
    }
    if (vanished) {
      rep.rho = 0.0;
      rep.nilpotent = true;
    }
  }
  rep.converged = rep.residual_estimate <= opts.tolerance * std::max(1.0, rep.rho);
  return rep;
}

// Power iteration with a two-term fit: the monic quadratic that best maps
// (u, Bu, B^2 u) to zero has roots at the dominant eigenvalue or pair, so
// complex and +-rho dominant pairs converge as well as a single real one.
SpectralReport power_growth(const ApplyFn& apply, std::size_t dim, const SpectralOptions& opts,
                            std::size_t max_iters) {
  SpectralReport rep;
  rep.method = "power_growth";
  Vector u = random_probe(dim, opts.seed);
  const double nu0 = norm2(u);
  for (double& x : u) x /= nu0;
  Vector a(dim), b(dim);
  apply(u.data(), a.data());
  double prev = -1.0;
  std::size_t stable = 0;
  for (std::size_t k = 1; k <= max_iters; ++k) {
    rep.iterations = k;
    const double na = norm2(a);
    if (!(na > 1e-300)) {
      rep.rho = 0.0;
      rep.nilpotent = true;
      rep.converged = true;
      rep.residual_estimate = 0.0;
      return rep;
    }
    apply(a.data(), b.data());
    const double aa = dot(a, a), au = dot(a, u), uu = dot(u, u), ab = dot(a, b), ub = dot(u, b);
    const double det = aa * uu - au * au;
    double est;
    if (det <= 1e-10 * aa * uu) {
      est = std::fabs(ab / aa);
    } else {
      const double c1 = -(ab * uu - ub * au) / det;
      const double c0 = -(aa * ub - au * ab) / det;
      const cplx disc = std::sqrt(cplx(c1 * c1 - 4.0 * c0, 0.0));
      est = std::max(std::abs((-c1 + disc) / 2.0), std::abs((-c1 - disc) / 2.0));
    }
    if (prev >= 0.0) {
      rep.residual_estimate = std::fabs(est - prev) / std::max(est, 1e-300);
      stable = rep.residual_estimate <= opts.tolerance ? stable + 1 : 0;
    }
    prev = est;
    rep.rho = est;
    if (stable >= 3) {
      rep.converged = true;
      return rep;
    }
    for (std::size_t i = 0; i < dim; ++i) {
      u[i] = a[i] / na;
      a[i] = b[i] / na;
    }
  }
  return rep;
}

// Complex Gaussian elimination with partial pivoting; solves M x = r.
std::vector<cplx> complex_solve(std::vector<std::vector<cplx>> m, std::vector<cplx> r) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
    std::swap(m[c], m[piv]);
    std::swap(r[c], r[piv]);
    if (std::abs(m[c][c]) == 0.0) m[c][c] = 1e-300;
    for (std::size_t i = c + 1; i < n; ++i) {
      const cplx f = m[i][c] / m[c][c];
      if (f == cplx(0.0)) continue;
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
      r[i] -= f * r[c];
    }
  }
  std::vector<cplx> x(n);
  for (std::size_t i = n; i-- > 0;) {
    cplx s = r[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m[i][j] * x[j];
    x[i] = s / m[i][i];
  }
  return x;
}

// Eigenvector of the small Hessenberg matrix for theta by inverse iteration.
std::vector<cplx> ritz_vector(const Matrix& h, cplx theta) {
  const std::size_t m = h.rows();
  const cplx shift = theta + cplx(1e-10 * std::max(1.0, std::abs(theta)), 0.0);
  std::vector<std::vector<cplx>> a(m, std::vector<cplx>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a[i][j] = h(i, j) - (i == j ? shift : cplx(0.0));
  std::vector<cplx> y(m, cplx(1.0));
  for (int it = 0; it < 3; ++it) {
    y = complex_solve(a, y);
    double nrm = 0.0;
    for (const cplx& v : y) nrm += std::norm(v);
    nrm = std::sqrt(nrm);
    for (cplx& v : y) v /= nrm;
  }
  return y;
}

SpectralReport krylov(const ApplyFn& apply, std::size_t dim, const SpectralOptions& opts) {
  SpectralReport rep;
  rep.method = "krylov";
  const std::size_t m = std::max<std::size_t>(1, std::min(opts.krylov_subspace, dim));
  Vector v = random_probe(dim, opts.seed);
  std::vector<Vector> basis(m + 1, Vector(dim));
  Vector w(dim);
  for (std::size_t restart = 1; restart <= opts.max_restarts; ++restart) {
    Matrix h(m + 1, m);
    const double nv = norm2(v);
    for (std::size_t i = 0; i < dim; ++i) basis[0][i] = v[i] / nv;
    std::size_t steps = m;
    bool breakdown = false;
    double hnorm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      apply(basis[j].data(), w.data());
      ++rep.iterations;
      // Modified Gram-Schmidt, applied twice.
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i <= j; ++i) {
          const double c = dot(basis[i], w);
          h(i, j) += c;
          for (std::size_t t = 0; t < dim; ++t) w[t] -= c * basis[i][t];
        }
      const double hn = norm2(w);
      for (std::size_t i = 0; i <= j; ++i) hnorm = std::max(hnorm, std::fabs(h(i, j)));
      h(j + 1, j) = hn;
      if (hn <= 1e-13 * std::max(hnorm, 1e-300) || hn == 0.0) {
        steps = j + 1;
        breakdown = true;
        break;
      }
      for (std::size_t t = 0; t < dim; ++t) basis[j + 1][t] = w[t] / hn;
    }
    Matrix hm(steps, steps);
    for (std::size_t i = 0; i < steps; ++i)
      for (std::size_t j = 0; j < steps; ++j) hm(i, j) = h(i, j);
    std::vector<cplx> ev = eigenvalues(hm);
    std::sort(ev.begin(), ev.end(), [](const cplx& a, const cplx& b) { return std::abs(a) > std::abs(b); });
    const cplx theta = ev.front();
    rep.rho = std::abs(theta);
    if (breakdown) {
      // The Krylov space is invariant, so its Ritz values are exact.
      rep.residual_estimate = 0.0;
      rep.converged = true;
      rep.nilpotent = rep.rho == 0.0;
      return rep;
    }
    const std::vector<cplx> y = ritz_vector(hm, theta);
    const double resid = h(steps, steps - 1) * std::abs(y[steps - 1]);
    rep.residual_estimate = resid / std::max(rep.rho, 1e-300);
    if (rep.residual_estimate <= opts.tolerance) {
      rep.converged = true;
      return rep;
    }
    // Restart from the real and imaginary parts of the leading Ritz vectors.
    std::fill(v.begin(), v.end(), 0.0);
    const std::size_t keep = std::min<std::size_t>(6, ev.size());
    for (std::size_t r = 0; r < keep; ++r) {
      const std::vector<cplx> yr = r == 0 ? y : ritz_vector(hm, ev[r]);
      Vector x(dim, 0.0);
      for (std::size_t j = 0; j < steps; ++j) {
        const double c = yr[j].real() + yr[j].imag();
        for (std::size_t t = 0; t < dim; ++t) x[t] += c * basis[j][t];
      }
      const double nx = norm2(x);
      if (nx > 0.0)
        for (std::size_t t = 0; t < dim; ++t) v[t] += x[t] / nx;
    }
    if (norm2(v) == 0.0) v = random_probe(dim, opts.seed + restart);
  }
  return rep;
}

SpectralReport run_backend(const ApplyFn& apply, std::size_t dim, const std::function<Matrix()>& dense,
                           std::size_t dense_dim, const SpectralOptions& opts) {
  SpectralBackend b = opts.backend;
  if (b == SpectralBackend::Auto) b = dense_dim <= opts.dense_cap ? SpectralBackend::Dense : SpectralBackend::Krylov;
  switch (b) {
    case SpectralBackend::Dense:
      if (dense_dim > opts.dense_cap)
        fail(ErrorCode::CapExceeded, "dense dimension " + std::to_string(dense_dim) + " exceeds cap " +
                                         std::to_string(opts.dense_cap));
      return dense_radius(dense(), opts);
    case SpectralBackend::PowerGrowth:
      return power_growth(apply, dim, opts, opts.max_power_iters);
    default: {
      SpectralReport rep = krylov(apply, dim, opts);
      if (opts.cross_check && !rep.nilpotent) {
        const SpectralReport pg = power_growth(apply, dim, opts, std::min<std::size_t>(opts.max_power_iters, 20000));
        rep.cross_check = pg.rho;
      }
      return rep;
    }
  }
}

}  // namespace

std::size_t compressed_dim(const BlockOperator& op) {
  const Splitting& s = op.splitting();
  std::size_t cols = 0, rows = 0;
  for (const SparsePart& p : s.parts()) {
    cols += p.col_support().size();
    rows += p.row_support().size();
  }
  return std::min(cols, rows);
}

CompressedOperator compressed_operator(const BlockOperator& op, std::size_t cap) {
  const Splitting& s = op.splitting();
  const std::size_t n = s.size();
  const std::size_t d = s.order();
  const Supports col = supports(s, CompressionForm::Column);
  const Supports row = supports(s, CompressionForm::Row);
  const CompressionForm form = col.offset.back() <= row.offset.back() ? CompressionForm::Column : CompressionForm::Row;
  const Supports& sp = form == CompressionForm::Column ? col : row;
  const std::size_t m = sp.offset.back();
  if (m > cap)
    fail(ErrorCode::CapExceeded, "compressed dimension " + std::to_string(m) + " exceeds dense cap " +
                                     std::to_string(cap));
  Matrix k(m, m);
  if (form == CompressionForm::Column) {
    Vector in(n * d, 0.0), out(n * d);
    for (std::size_t q = 0; q < d; ++q) {
      for (std::size_t a = 0; a < sp.idx[q].size(); ++a) {
        const std::size_t pos = q * n + sp.idx[q][a];
        in[pos] = 1.0;
        op.apply(in.data(), out.data());
        in[pos] = 0.0;
        const std::size_t c = sp.offset[q] + a;
        for (std::size_t p = 0; p < d; ++p)
          for (std::size_t b = 0; b < sp.idx[p].size(); ++b) k(sp.offset[p] + b, c) = out[p * n + sp.idx[p][b]];
      }
    }
  } else {
    std::vector<Vector> y(d, Vector(n, 0.0)), out(d, Vector(n, 0.0));
    for (std::size_t q = 0; q < d; ++q) {
      for (std::size_t a = 0; a < sp.idx[q].size(); ++a) {
        y[q][sp.idx[q][a]] = 1.0;
        row_form_apply(s, y, out);
        y[q][sp.idx[q][a]] = 0.0;
        const std::size_t c = sp.offset[q] + a;
        for (std::size_t p = 0; p < d; ++p)
          for (std::size_t b = 0; b < sp.idx[p].size(); ++b) k(sp.offset[p] + b, c) = out[p][sp.idx[p][b]];
      }
    }
  }
  return CompressedOperator{std::move(k), form};
}

std::string backend_name(SpectralBackend b) {
  switch (b) {
    case SpectralBackend::Auto:
      return "auto";
    case SpectralBackend::Dense:
      return "dense_qr";
    case SpectralBackend::Krylov:
      return "krylov";
    case SpectralBackend::PowerGrowth:
      return "power_growth";
  }
  return "?";
}

SpectralReport spectral_radius(const BlockOperator& op, const SpectralOptions& opts) {
  const ApplyFn apply = [&op](const double* in, double* out) { op.apply(in, out); };
  return run_backend(
      apply, op.dim(), [&] { return compressed_operator(op, opts.dense_cap).k; }, compressed_dim(op), opts);
}

SpectralReport spectral_radius(const Matrix& a, const SpectralOptions& opts) {
  if (!a.square()) fail(ErrorCode::ShapeMismatch, "spectral radius needs a square matrix");
  const ApplyFn apply = [&a](const double* in, double* out) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double s = 0.0;
      const double* r = a.row(i);
      for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * in[j];
      out[i] = s;
    }
  };
  return run_backend(
      apply, a.rows(), [&] { return a; }, a.rows(), opts);
}

SpectralReport method_spectral_radius(const NormalizedSystem& ns, const MethodSpec& spec, const SpectralOptions& opts,
                                      std::shared_ptr<const Matrix> jacobi) {
  if (is_classical(spec.method)) return spectral_radius(classical_iteration_matrix(ns, spec.method), opts);
  if (!jacobi) jacobi = std::make_shared<const Matrix>(jacobi_matrix(ns));
  // B_J = O has no splitting at all; every method's iteration matrix is zero.
  if (is_zero(*jacobi)) return spectral_radius(Matrix(ns.size(), ns.size()), opts);
  return spectral_radius(BlockOperator(build(ns, spec, std::move(jacobi))), opts);
}

std::vector<cplx> nonzero_spectrum(const Matrix& a, double zero_tol) {
  std::vector<cplx> out;
  if (structurally_nilpotent(a)) return out;
  for (const cplx& l : eigenvalues(a))
    if (std::abs(l) > zero_tol) out.push_back(l);
  return out;
}

std::vector<cplx> nonzero_spectrum_dense(const BlockOperator& op, double zero_tol, std::size_t cap) {
  return nonzero_spectrum(dense_block_matrix(op, cap), zero_tol);
}

std::vector<cplx> nonzero_spectrum(const BlockOperator& op, double zero_tol) {
  return nonzero_spectrum(compressed_operator(op, std::numeric_limits<std::size_t>::max()).k, zero_tol);
}

SpectrumMatch match_spectra(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol) {
  SpectrumMatch res;
  if (a.size() != b.size()) {
    res.max_deviation = std::numeric_limits<double>::infinity();
    return res;
  }
  std::vector<cplx> sa = a;
  std::sort(sa.begin(), sa.end(), [](const cplx& x, const cplx& y) { return std::abs(x) > std::abs(y); });
  std::vector<std::uint8_t> used(b.size(), 0);
  for (const cplx& x : sa) {
    std::size_t best = b.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(x - b[j]);
      if (dist < bd) {
        bd = dist;
        best = j;
      }
    }
    used[best] = 1;
    res.max_deviation = std::max(res.max_deviation, bd);
  }
  res.matched = res.max_deviation <= tol;
  return res;
}

double block_inf_norm(const BlockOperator& op, std::size_t cap) {
  if (op.dim() <= cap) return inf_norm(dense_block_matrix(op, cap));
  return block_inf_norm_matrix_free(op);
}

double block_inf_norm_matrix_free(const BlockOperator& op) {
  const Splitting& s = op.splitting();
  const std::size_t n = s.size();
  const std::size_t d = s.order();
  const std::size_t width = n * d;
  // y holds block row p of the operator as an n x dn matrix. Block row 1 is
  // [B_1 ... B_d]; block row p+1 is y + B_p (y - E_p), E_p selecting stage p.
  Matrix y(n, width);
  for (std::size_t q = 0; q < d; ++q)
    for (const Entry& e : s.part(q).entries()) y(e.row, q * n + e.col) = e.value;
  auto row_norm = [&] {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      const double* r = y.row(i);
      for (std::size_t j = 0; j < width; ++j) acc += std::fabs(r[j]);
      best = std::max(best, acc);
    }
    return best;
  };
  double norm = row_norm();
  std::vector<double> delta(width);
  for (std::size_t p = 0; p + 1 < d; ++p) {
    const SparsePart& part = s.part(p);
    std::vector<std::pair<std::size_t, std::vector<double>>> rows;
    for (std::size_t i : part.row_support()) {
      std::fill(delta.begin(), delta.end(), 0.0);
      for (std::size_t k = part.row_begin(i); k < part.row_end(i); ++k) {
        const Entry& e = part.entries()[k];
        const double* src = y.row(e.col);
        for (std::size_t j = 0; j < width; ++j) delta[j] += e.value * src[j];
        delta[p * n + e.col] -= e.value;
      }
      rows.emplace_back(i, delta);
    }
    for (auto& [i, dl] : rows) {
      double* r = y.row(i);
      for (std::size_t j = 0; j < width; ++j) r[j] += dl[j];
    }
    norm = std::max(norm, row_norm());
  }
  return norm;
}

bool structurally_nilpotent(const Matrix& a) {
  const std::size_t m = a.rows();
  std::vector<std::size_t> indeg(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (a(i, j) != 0.0) ++indeg[j];
  std::vector<std::size_t> queue;
  for (std::size_t j = 0; j < m; ++j)
    if (indeg[j] == 0) queue.push_back(j);
  std::size_t seen = 0;
  while (!queue.empty()) {
    const std::size_t i = queue.back();
    queue.pop_back();
    ++seen;
    for (std::size_t j = 0; j < m; ++j)
      if (a(i, j) != 0.0 && --indeg[j] == 0) queue.push_back(j);
  }
  return seen == m;
}

}  // namespace splitkit
