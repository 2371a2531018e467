#include "splitkit/engine.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "splitkit/error.hpp"

namespace splitkit {

BlockIterationState initial_state(const Splitting& s, const Vector& x0) {
  if (x0.size() != s.size()) fail(ErrorCode::ShapeMismatch, "initial vector length does not match system");
  return BlockIterationState{std::vector<Vector>(s.order(), x0), 0, std::nullopt};
}

BlockIterationState initial_state(const Splitting& s, const std::vector<Vector>& stages) {
  if (stages.size() != s.order()) fail(ErrorCode::ShapeMismatch, "need one initial vector per part");
  for (const Vector& v : stages)
    if (v.size() != s.size()) fail(ErrorCode::ShapeMismatch, "initial vector length does not match system");
  return BlockIterationState{stages, 0, std::nullopt};
}

namespace {

void check_state(const Splitting& s, const BlockIterationState& st) {
  if (st.stages.size() != s.order()) fail(ErrorCode::ShapeMismatch, "state order does not match splitting");
  for (const Vector& v : st.stages)
    if (v.size() != s.size()) fail(ErrorCode::ShapeMismatch, "state vector length does not match splitting");
}

}  // namespace

void sweep(const Splitting& s, BlockIterationState& st, const Vector& c) {
  check_state(s, st);
  const std::size_t n = s.size();
  const std::size_t d = s.order();
  if (c.size() != n) fail(ErrorCode::ShapeMismatch, "constant term length does not match splitting");
  Vector sum(n, 0.0);
  for (std::size_t q = 0; q < d; ++q) s.part(q).apply_add(st.stages[q].data(), sum.data());
  Vector diff(n);
  st.previous_last = st.stages[d - 1];
  for (std::size_t p = 0; p < d; ++p) {
    Vector& x = st.stages[p];
    for (std::size_t i = 0; i < n; ++i) {
      const double v = sum[i] + c[i];
      diff[i] = v - x[i];
      x[i] = v;
    }
    if (p + 1 < d) s.part(p).apply_add(diff.data(), sum.data());
  }
  ++st.k;
}

void sweep_two_step(const Splitting& s, BlockIterationState& st) {
  check_state(s, st);
  if (!st.previous_last) fail(ErrorCode::InvalidArgument, "two-step sweep needs the previous iterate");
  const std::size_t n = s.size();
  const std::size_t d = s.order();
  Vector diff(n), next(n);
  const Vector old_last = st.stages[d - 1];
  // x_1(new) = x_d + B_d (x_d - x_d(prev)).
  for (std::size_t i = 0; i < n; ++i) diff[i] = old_last[i] - (*st.previous_last)[i];
  next = old_last;
  s.part(d - 1).apply_add(diff.data(), next.data());
  for (std::size_t p = 0; p < d; ++p) {
    Vector& x = st.stages[p];
    for (std::size_t i = 0; i < n; ++i) diff[i] = next[i] - x[i];
    x = next;
    // x_{p+1}(new) = x_p(new) + B_p (x_p(new) - x_p(old)).
    if (p + 1 < d) s.part(p).apply_add(diff.data(), next.data());
  }
  st.previous_last = old_last;
  ++st.k;
}

ModifiedSgs::ModifiedSgs(const NormalizedSystem& ns) : ns_(ns) {
  c_sgs_ = solve_unit_upper(ns.upper, solve_unit_lower(ns.lower, ns.c));
  u_c_sgs_ = ns.upper * c_sgs_;
}

Vector ModifiedSgs::start(const Vector& y0) const { return ns_.upper * y0; }

Vector ModifiedSgs::step(const Vector& z) const {
  const Vector w = solve_unit_lower(ns_.lower, z) - z;
  return (solve_unit_upper(ns_.upper, w) - w) + u_c_sgs_;
}

Vector ModifiedSgs::finish(const Vector& z_prev) const {
  const Vector w = solve_unit_lower(ns_.lower, z_prev) - z_prev;
  return solve_unit_upper(ns_.upper, w) + c_sgs_;
}

std::string solve_mode_name(SolveMode m) {
  switch (m) {
    case SolveMode::General:
      return "general";
    case SolveMode::TwoStep:
      return "two-step";
    case SolveMode::ModifiedSGS:
      return "modified-sgs";
  }
  return "?";
}

SolveMode parse_solve_mode(const std::string& raw) {
  std::string s;
  for (char c : raw) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "general") return SolveMode::General;
  if (s == "two-step" || s == "two_step") return SolveMode::TwoStep;
  if (s == "modified-sgs" || s == "modified_sgs") return SolveMode::ModifiedSGS;
  fail(ErrorCode::InvalidArgument, "unknown solve mode '" + raw + "'");
}

double relative_residual(const LinearSystem& sys, const Vector& x) {
  const Vector r = sys.a * x - sys.b;
  const double bn = inf_norm(sys.b);
  return inf_norm(r) / (bn > 0.0 ? bn : 1.0);
}

namespace {

bool blown_up(const Vector& x) { return !(inf_norm(x) <= kDivergenceBound); }

SolveReport diverged_report(std::size_t k, Vector x) {
  SolveReport rep;
  rep.iterations = k;
  rep.final_residual = std::numeric_limits<double>::infinity();
  rep.diverged = true;
  rep.diagnostic = "iterate exceeded " + std::to_string(kDivergenceBound) + " or became non-finite at sweep " +
                   std::to_string(k);
  rep.solution = std::move(x);
  return rep;
}

bool sgs_family(Method m) {
  return m == Method::SGS || m == Method::ModifiedSGS || m == Method::FTC || m == Method::FTR;
}

SolveReport solve_modified_sgs(const LinearSystem& sys, const NormalizedSystem& ns, const SolveConfig& cfg) {
  const ModifiedSgs msgs(ns);
  const Vector y0 = cfg.x0 ? *cfg.x0 : Vector(ns.size(), 0.0);
  Vector z = msgs.start(y0);
  SolveReport rep;
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    Vector y = msgs.finish(z);
    if (blown_up(y)) return diverged_report(k, std::move(y));
    // U y equals the step of z and costs one product instead of two solves.
    z = ns.upper * y;
    rep.iterations = k;
    rep.final_residual = relative_residual(sys, y);
    rep.solution = std::move(y);
    if (rep.final_residual <= cfg.tolerance) {
      rep.converged = true;
      return rep;
    }
  }
  rep.diagnostic = "iteration budget exhausted";
  return rep;
}

SolveReport solve_block(const LinearSystem& sys, const NormalizedSystem& ns, const Splitting& s,
                        const SolveConfig& cfg) {
  const Vector x0 = cfg.x0 ? *cfg.x0 : Vector(ns.size(), 0.0);
  BlockIterationState st = initial_state(s, x0);
  SolveReport rep;
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    if (cfg.mode == SolveMode::TwoStep && st.previous_last)
      sweep_two_step(s, st);
    else
      sweep(s, st, ns.c);
    const Vector& x = st.stages.back();
    if (blown_up(x)) return diverged_report(k, x);
    rep.iterations = k;
    rep.final_residual = relative_residual(sys, x);
    if (rep.final_residual <= cfg.tolerance) {
      rep.converged = true;
      rep.solution = x;
      return rep;
    }
  }
  rep.solution = st.stages.back();
  rep.diagnostic = "iteration budget exhausted";
  return rep;
}

// B = O: the normalized system is x = c.
SolveReport solve_trivial(const LinearSystem& sys, const NormalizedSystem& ns) {
  SolveReport rep;
  rep.iterations = 1;
  rep.solution = ns.c;
  rep.final_residual = relative_residual(sys, rep.solution);
  rep.converged = true;
  return rep;
}

}  // namespace

SolveReport solve(const LinearSystem& sys, const MethodSpec& method, const SolveConfig& cfg) {
  const NormalizedSystem ns = normalize(sys);
  if (cfg.mode == SolveMode::ModifiedSGS && !sgs_family(method.method))
    fail(ErrorCode::InvalidArgument, "modified-sgs mode applies to SGS, ModifiedSGS, FTC and FTR only");
  if (cfg.x0 && cfg.x0->size() != ns.size()) fail(ErrorCode::ShapeMismatch, "initial vector length mismatch");
  const Matrix b = jacobi_matrix(ns);
  if (is_zero(b)) return solve_trivial(sys, ns);
  if (cfg.mode == SolveMode::ModifiedSGS) return solve_modified_sgs(sys, ns, cfg);
  const Splitting s = build(ns, method, std::make_shared<const Matrix>(b));
  return solve_block(sys, ns, s, cfg);
}

SolveReport solve(const LinearSystem& sys, const Splitting& splitting, const SolveConfig& cfg) {
  const NormalizedSystem ns = normalize(sys);
  if (cfg.mode == SolveMode::ModifiedSGS)
    fail(ErrorCode::InvalidArgument, "modified-sgs mode needs a named method, not an explicit splitting");
  if (!(*splitting.source() == jacobi_matrix(ns)))
    fail(ErrorCode::InvalidArgument, "splitting was built from a different system");
  return solve_block(sys, ns, splitting, cfg);
}

}  // namespace splitkit
