#include "splitkit/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>

#include "splitkit/error.hpp"

namespace splitkit {

namespace {

struct NameEntry {
  Method method;
  const char* name;
};

constexpr NameEntry kNames[] = {
    {Method::Jacobi, "Jacobi"},
    {Method::TU, "TU"},
    {Method::TL, "TL"},
    {Method::FGS, "FGS"},
    {Method::BGS, "BGS"},
    {Method::SGS, "SGS"},
    {Method::ModifiedSGS, "ModifiedSGS"},
    {Method::FUTC, "FUTC"},
    {Method::FLTC, "FLTC"},
    {Method::FUTR, "FUTR"},
    {Method::FLTR, "FLTR"},
    {Method::FTC, "FTC"},
    {Method::FTR, "FTR"},
    {Method::TC22, "TC22"},
    {Method::TR22, "TR22"},
    {Method::AFTC_L, "AFTC_L"},
    {Method::AFTC_U, "AFTC_U"},
    {Method::AFTR_L, "AFTR_L"},
    {Method::AFTR_U, "AFTR_U"},
    {Method::AFTC_L_compact, "AFTC_L_compact"},
    {Method::AFTC_U_compact, "AFTC_U_compact"},
    {Method::AFTR_L_compact, "AFTR_L_compact"},
    {Method::AFTR_U_compact, "AFTR_U_compact"},
    {Method::AMKS, "AMKS"},
};

std::string lower_case(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Pieces indexed 1-based; empty ranges give empty parts.
SparsePart column_range(const Matrix& m, std::size_t first, std::size_t last) {
  const std::size_t n = m.rows();
  std::vector<Entry> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = first; j <= last && j <= n; ++j)
      if (j >= 1 && m(i, j - 1) != 0.0)
        e.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j - 1), m(i, j - 1)});
  return SparsePart(n, std::move(e));
}

SparsePart row_range(const Matrix& m, std::size_t first, std::size_t last) {
  const std::size_t n = m.rows();
  std::vector<Entry> e;
  for (std::size_t i = first; i <= last && i <= n; ++i) {
    if (i < 1) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (m(i - 1, j) != 0.0)
        e.push_back({static_cast<std::uint32_t>(i - 1), static_cast<std::uint32_t>(j), m(i - 1, j)});
  }
  return SparsePart(n, std::move(e));
}

SparsePart whole(const Matrix& m) { return SparsePart::from_dense(m); }

std::vector<SparsePart> alternating(const NormalizedSystem& ns, bool columns, bool lower_first, bool compact) {
  const std::size_t n = ns.size();
  const std::size_t v = nu(n);
  const Matrix& l = ns.lower;
  const Matrix& u = ns.upper;
  std::vector<SparsePart> out;
  auto pair = [&](const SparsePart& a, const SparsePart& b, bool a_first) {
    if (a_first) {
      out.push_back(a);
      out.push_back(b);
    } else {
      out.push_back(b);
      out.push_back(a);
    }
  };
  if (columns) {
    for (std::size_t k = 1; k + 1 <= n; ++k) {
      SparsePart lk = column_range(l, k, k);
      SparsePart uk = column_range(u, n + 1 - k, n + 1 - k);
      if (compact && k >= n - v)
        out.push_back(lk + uk);
      else
        pair(lk, uk, lower_first);
    }
  } else {
    for (std::size_t k = 2; k <= n; ++k) {
      SparsePart lk = row_range(l, k, k);
      SparsePart uk = row_range(u, n + 1 - k, n + 1 - k);
      if (compact && k <= v + 1)
        out.push_back(lk + uk);
      else
        pair(lk, uk, lower_first);
    }
  }
  return out;
}

Matrix apply_columns(std::size_t n, const std::function<Vector(const Vector&)>& f) {
  Matrix m(n, n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vector col = f(e);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
    e[j] = 0.0;
  }
  return m;
}

}  // namespace

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> m;
    for (const auto& e : kNames) m.push_back(e.method);
    return m;
  }();
  return methods;
}

std::string method_name(Method m) {
  for (const auto& e : kNames)
    if (e.method == m) return e.name;
  fail(ErrorCode::InvalidArgument, "unknown method id");
}

MethodSpec parse_method(const std::string& raw) {
  std::string name = raw;
  std::optional<std::size_t> blocks;
  if (auto colon = raw.find(':'); colon != std::string::npos) {
    name = raw.substr(0, colon);
    const std::string arg = raw.substr(colon + 1);
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || k == 0)
      fail(ErrorCode::InvalidArgument, "bad method parameter in '" + raw + "'");
    blocks = k;
  }
  const std::string key = lower_case(name);
  for (const auto& e : kNames) {
    if (lower_case(e.name) == key) {
      MethodSpec spec{e.method, {}};
      if (blocks) {
        if (e.method != Method::AMKS) fail(ErrorCode::InvalidArgument, "only AMKS takes a ':k' parameter");
        spec.params.amks_blocks = blocks;
      }
      return spec;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown method '" + raw + "'");
}

std::string method_label(const MethodSpec& spec) {
  std::string s = method_name(spec.method);
  if (spec.method == Method::AMKS && spec.params.amks_blocks) s += ":" + std::to_string(*spec.params.amks_blocks);
  return s;
}

bool is_classical(Method m) {
  return m == Method::Jacobi || m == Method::FGS || m == Method::BGS || m == Method::SGS || m == Method::ModifiedSGS;
}

std::size_t nu(std::size_t n) { return n % 2 == 0 ? (n >= 2 ? n / 2 - 1 : 0) : (n - 1) / 2; }

SparsePart upper_column(const Matrix& upper, std::size_t j) { return column_range(upper, j, j); }
SparsePart lower_column(const Matrix& lower, std::size_t j) { return column_range(lower, j, j); }
SparsePart upper_row(const Matrix& upper, std::size_t i) { return row_range(upper, i, i); }
SparsePart lower_row(const Matrix& lower, std::size_t i) { return row_range(lower, i, i); }

std::vector<SparsePart> method_pre_parts(const NormalizedSystem& ns, const MethodSpec& spec) {
  const std::size_t n = ns.size();
  const Matrix& l = ns.lower;
  const Matrix& u = ns.upper;
  if (n == 0) fail(ErrorCode::ShapeMismatch, "empty system");
  std::vector<SparsePart> out;
  switch (spec.method) {
    case Method::Jacobi:
      out.push_back(whole(l + u));
      break;
    case Method::TU:
      out = {whole(u), whole(l)};
      break;
    case Method::TL:
      out = {whole(l), whole(u)};
      break;
    case Method::BGS:
    case Method::FUTC:
      for (std::size_t j = n; j >= 2; --j) out.push_back(column_range(u, j, j));
      out.push_back(whole(l));
      break;
    case Method::FGS:
    case Method::FLTC:
      for (std::size_t j = 1; j + 1 <= n; ++j) out.push_back(column_range(l, j, j));
      out.push_back(whole(u));
      break;
    case Method::FUTR:
      for (std::size_t i = n - 1; i >= 1; --i) out.push_back(row_range(u, i, i));
      out.push_back(whole(l));
      break;
    case Method::FLTR:
      for (std::size_t i = 2; i <= n; ++i) out.push_back(row_range(l, i, i));
      out.push_back(whole(u));
      break;
    case Method::SGS:
    case Method::ModifiedSGS:
    case Method::FTC:
      for (std::size_t j = 1; j + 1 <= n; ++j) out.push_back(column_range(l, j, j));
      for (std::size_t j = n; j >= 2; --j) out.push_back(column_range(u, j, j));
      break;
    case Method::FTR:
      for (std::size_t i = 2; i <= n; ++i) out.push_back(row_range(l, i, i));
      for (std::size_t i = n - 1; i >= 1; --i) out.push_back(row_range(u, i, i));
      break;
    case Method::TC22:
    case Method::TR22: {
      const std::size_t v = spec.params.block_split.value_or(nu(n));
      if (n < 3 || v < 1 || v + 2 > n)
        fail(ErrorCode::InvalidArgument, method_name(spec.method) + " needs n >= 3 and 1 <= split <= n-2");
      if (spec.method == Method::TC22)
        out = {column_range(l, 1, v), column_range(l, v + 1, n - 1), column_range(u, n - v + 1, n),
               column_range(u, 2, n - v)};
      else
        out = {row_range(l, 2, n - v), row_range(l, n - v + 1, n), row_range(u, v + 1, n - 1), row_range(u, 1, v)};
      break;
    }
    case Method::AFTC_L:
      out = alternating(ns, true, true, false);
      break;
    case Method::AFTC_U:
      out = alternating(ns, true, false, false);
      break;
    case Method::AFTR_L:
      out = alternating(ns, false, true, false);
      break;
    case Method::AFTR_U:
      out = alternating(ns, false, false, false);
      break;
    case Method::AFTC_L_compact:
      out = alternating(ns, true, true, true);
      break;
    case Method::AFTC_U_compact:
      out = alternating(ns, true, false, true);
      break;
    case Method::AFTR_L_compact:
      out = alternating(ns, false, true, true);
      break;
    case Method::AFTR_U_compact:
      out = alternating(ns, false, false, true);
      break;
    case Method::AMKS: {
      const auto doi = spec.params.amks_blocks ? DecompositionOfIdentity::contiguous(n, *spec.params.amks_blocks)
                                               : DecompositionOfIdentity::per_row(n);
      const Matrix b = l + u;
      std::vector<std::vector<Entry>> groups(doi.groups);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (b(i, j) != 0.0)
            groups[doi.group_of_row[i]].push_back(
                {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), b(i, j)});
      for (auto& g : groups) out.emplace_back(n, std::move(g));
      break;
    }
  }
  return out;
}

Splitting build(const NormalizedSystem& ns, const MethodSpec& spec) {
  return build(ns, spec, std::make_shared<const Matrix>(jacobi_matrix(ns)));
}

Splitting build(const NormalizedSystem& ns, const MethodSpec& spec, std::shared_ptr<const Matrix> jacobi) {
  return from_pre_parts(std::move(jacobi), method_pre_parts(ns, spec));
}

Matrix classical_iteration_matrix(const NormalizedSystem& ns, Method m) {
  const std::size_t n = ns.size();
  const Matrix& l = ns.lower;
  const Matrix& u = ns.upper;
  switch (m) {
    case Method::Jacobi:
      return l + u;
    case Method::FGS:
      return apply_columns(n, [&](const Vector& x) { return solve_unit_lower(l, u * x); });
    case Method::BGS:
      return apply_columns(n, [&](const Vector& x) { return solve_unit_upper(u, l * x); });
    case Method::SGS:
      return apply_columns(n, [&](const Vector& x) { return solve_unit_upper(u, l * solve_unit_lower(l, u * x)); });
    case Method::ModifiedSGS:
      return apply_columns(n, [&](const Vector& x) {
        const Vector w = solve_unit_lower(l, x) - x;
        return solve_unit_upper(u, w) - w;
      });
    default:
      fail(ErrorCode::InvalidArgument, method_name(m) + " has no classical iteration matrix");
  }
}

DecompositionOfIdentity DecompositionOfIdentity::per_row(std::size_t n) {
  DecompositionOfIdentity d{n, std::vector<std::size_t>(n), n};
  for (std::size_t i = 0; i < n; ++i) d.group_of_row[i] = i;
  return d;
}

DecompositionOfIdentity DecompositionOfIdentity::contiguous(std::size_t n, std::size_t groups) {
  if (groups == 0 || groups > n) fail(ErrorCode::InvalidArgument, "group count must be in [1, n]");
  DecompositionOfIdentity d{n, std::vector<std::size_t>(n), groups};
  for (std::size_t i = 0; i < n; ++i) d.group_of_row[i] = i * groups / n;
  return d;
}

DecompositionOfIdentity DecompositionOfIdentity::from_groups(std::size_t n, const std::vector<std::size_t>& g) {
  if (g.size() != n) fail(ErrorCode::ShapeMismatch, "group list length must equal n");
  std::size_t groups = 0;
  for (std::size_t v : g) groups = std::max(groups, v + 1);
  std::vector<std::uint8_t> used(groups, 0);
  for (std::size_t v : g) used[v] = 1;
  if (std::find(used.begin(), used.end(), 0) != used.end())
    fail(ErrorCode::InvalidArgument, "every selector must be nonzero");
  return DecompositionOfIdentity{n, g, groups};
}

Splitting amks_splitting(const NormalizedSystem& ns, const DecompositionOfIdentity& doi) {
  return amks_splitting(ns, doi, std::make_shared<const Matrix>(jacobi_matrix(ns)));
}

Splitting amks_splitting(const NormalizedSystem& ns, const DecompositionOfIdentity& doi,
                         std::shared_ptr<const Matrix> jacobi) {
  const std::size_t n = ns.size();
  if (doi.n != n) fail(ErrorCode::ShapeMismatch, "decomposition size does not match system");
  std::vector<std::vector<Entry>> groups(doi.groups);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((*jacobi)(i, j) != 0.0)
        groups[doi.group_of_row[i]].push_back(
            {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), (*jacobi)(i, j)});
  std::vector<SparsePart> pre;
  for (auto& g : groups) pre.emplace_back(n, std::move(g));
  return from_pre_parts(std::move(jacobi), pre);
}

Matrix amks_iteration_matrix(const NormalizedSystem& ns, const DecompositionOfIdentity& doi) {
  const std::size_t n = ns.size();
  if (doi.n != n) fail(ErrorCode::ShapeMismatch, "decomposition size does not match system");
  const Matrix b = jacobi_matrix(ns);
  Matrix m = Matrix::identity(n);
  for (std::size_t p = 0; p < doi.groups; ++p) {
    // Rows selected by P_p become rows of B M; the rest stay.
    Matrix next = m;
    for (std::size_t i = 0; i < n; ++i) {
      if (doi.group_of_row[i] != p) continue;
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += b(i, k) * m(k, j);
        next(i, j) = s;
      }
    }
    m = std::move(next);
  }
  return m;
}

}  // namespace splitkit
