#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "splitkit/catalog.hpp"
#include "splitkit/linalg.hpp"
#include "splitkit/splitting.hpp"

namespace splitkit {

// Stage vectors x_1..x_d of the block iteration plus the last stage of the
// previous sweep, which the two-step form needs.
struct BlockIterationState {
  std::vector<Vector> stages;
  std::size_t k = 0;
  std::optional<Vector> previous_last;
};

BlockIterationState initial_state(const Splitting& s, const Vector& x0);
BlockIterationState initial_state(const Splitting& s, const std::vector<Vector>& stages);

// One sweep of
//   x_p <- sum_{q<p} B_q x_q(new) + sum_{q>=p} B_q x_q(old) + c
// evaluated with a running sum so the cost is O(nnz(B) + d n).
void sweep(const Splitting& s, BlockIterationState& st, const Vector& c);

// Same update written through differences of consecutive iterates:
//   x_1 <- x_d + B_d (x_d - x_d(prev)),  x_{p+1} <- x_p(new) + B_p (x_p(new) - x_p(old)).
// Needs previous_last, so it is valid from the second sweep on.
void sweep_two_step(const Splitting& s, BlockIterationState& st);

// The symmetric Gauss-Seidel iteration rewritten for z = U y:
//   z <- [(I-U)^{-1} - I][(I-L)^{-1} - I] z + U c_s,  c_s = (I-U)^{-1}(I-L)^{-1} c,
// with y recovered by y = (I-U)^{-1}[(I-L)^{-1} - I] z(prev) + c_s.
class ModifiedSgs {
 public:
  explicit ModifiedSgs(const NormalizedSystem& ns);

  Vector start(const Vector& y0) const;
  Vector step(const Vector& z) const;
  Vector finish(const Vector& z_prev) const;
  const Vector& c_sgs() const { return c_sgs_; }

 private:
  const NormalizedSystem& ns_;
  Vector c_sgs_;
  Vector u_c_sgs_;
};

enum class SolveMode { General, TwoStep, ModifiedSGS };

std::string solve_mode_name(SolveMode m);
SolveMode parse_solve_mode(const std::string& s);

struct SolveConfig {
  double tolerance = 1e-10;
  std::size_t max_iters = 100000;
  SolveMode mode = SolveMode::General;
  std::optional<Vector> x0;
};

constexpr double kDivergenceBound = 1e100;

struct SolveReport {
  std::size_t iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  bool diverged = false;
  std::string diagnostic;
  Vector solution;
};

// Relative residual ||A x - b||_inf / ||b||_inf on the original system
// (absolute when b = 0).
double relative_residual(const LinearSystem& sys, const Vector& x);

SolveReport solve(const LinearSystem& sys, const MethodSpec& method, const SolveConfig& cfg);
SolveReport solve(const LinearSystem& sys, const Splitting& splitting, const SolveConfig& cfg);

}  // namespace splitkit
