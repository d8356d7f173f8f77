#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matframe/frame.hpp"
#include "matframe/objective.hpp"
#include "matframe/polytope.hpp"

namespace matframe {

enum class SolveStatus { kConverged, kUnboundedBelow, kMaxIters, kNotSemistable };

/// Search direction. Newton uses the exact Hessian of Phi, regularized along
/// its all-ones kernel, and falls back to the gradient whenever the Newton
/// step is not a descent direction.
enum class SolveMethod { kNewton, kGradient };

std::string_view to_string(SolveStatus status);
std::string_view to_string(SolveMethod method);
/// Parses "newton" or "gradient"; throws PreconditionError otherwise.
SolveMethod parse_method(std::string_view name);

struct SolverConfig {
  /// Stop when ||grad Phi(t) - c||_2 <= grad_tol. Non-positive means 1e-9 * d.
  SolveMethod method = SolveMethod::kNewton;
  double grad_tol = 0.0;
  std::size_t max_iters = 100'000;
  /// Objective values below this are taken as divergence to -infinity.
  double unbounded_floor = -1e6;
  /// Solve on blocks rescaled to unit Frobenius norm, then map t back.
  bool pre_normalize = false;
  /// Return kNotSemistable without iterating when c is outside the orbit
  /// polytope. Disable to let the iteration itself detect divergence.
  bool polytope_precheck = true;
  /// ||t||_inf above this after recentering is taken as divergence.
  double divergence_bound = 50.0;

  double armijo = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;
  int max_backtracks = 60;
  // An accepted iterate whose Q(t) has lambda_min / lambda_max below this is
  // treated as escaping to the boundary of the PD cone.
  double boundary_ratio = 1e-10;
  /// Longest allowed move ||t_next - t||_inf per iteration; longer search
  /// directions are scaled down before the line search.
  double max_step = 5.0;
  // grad Phi(t) always lies in the orbit polytope, so ||grad Phi - c|| stays
  // at least dist(c, K_F) when c is outside it. Escaping iterates with a
  // gradient below this floor are read as a boundary point (kMaxIters), above
  // it as divergence (kUnboundedBelow). Only used without the precheck.
  double escape_grad_floor = 1e-4;
  // Stop with kMaxIters after this many consecutive steps whose objective
  // decrease is below double-precision roundoff.
  std::size_t stall_limit = 100;

  double rank_tol = kDefaultTol;
  /// Keep the objective value of every accepted iterate in SolveResult::trace.
  bool record_trace = false;

  double effective_grad_tol(Index d) const;
};

/**
 * Outcome of minimizing Phi(t) - <t, c>.
 *
 * For kConverged, transformer = Q(t*)^{-1/2} puts (F, c) into radial
 * isotropic position and extremisers holds Y_i = 1 / ||Q(t*)^{-1/2} X_i||_F^2.
 * For kMaxIters and kUnboundedBelow the fields describe the last iterate.
 */
struct SolveResult {
  SolveStatus status = SolveStatus::kMaxIters;
  Vector t_star;
  Matrix transformer;
  double objective_value = 0.0;
  double grad_norm = 0.0;
  Vector extremisers;
  std::size_t iterations = 0;
  std::optional<PolytopeReport> polytope;
  std::vector<double> trace;
  std::string diagnostic;
};

/// Gradient descent with Armijo backtracking from t = 0, recentering every
/// iterate so that <t, c> = 0. Throws PreconditionError when sum c != d or
/// the frame is not a matrix frame.
SolveResult minimize(const FrameDatum& datum, const SolverConfig& config = {});

/// Normalized residual of the semi-algebraic system at xi = exp(t):
/// component i is (sum_{S ni i} |S_i| w_S - c_i sum_S w_S) / sum_S w_S with
/// w_S = prod_l xi_l^{|S_l|} Delta_S. Vanishes exactly at minimizers.
Vector variety_residual(const FrameDatum& datum, const Vector& t,
                        std::size_t size_guard = kDefaultSizeGuard);

/// {A X_i} for the transformer of a converged solve.
MatrixFrame transform_to_rif(const FrameDatum& datum, const SolveResult& result);

}  // namespace matframe
