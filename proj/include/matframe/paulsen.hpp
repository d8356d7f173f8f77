#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "matframe/frame.hpp"
#include "matframe/quiver.hpp"
#include "matframe/solver.hpp"

namespace matframe {

/// Inputs must be epsilon-nearly equal-norm PMFs with epsilon below this.
inline constexpr double kPaulsenEpsilonLimit = 0.3;

/// Raised when the radial-isotropy solve inside the pipeline does not converge.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, SolveResult result)
      : std::runtime_error(what), result_(std::move(result)) {}
  const SolveResult& result() const { return result_; }

 private:
  SolveResult result_;
};

/// Raised when no admissible generic perturbation was found.
class PerturbationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Majorization.

/// sum v = sum u and every proper prefix sum of v dominates that of u, both
/// within tol. Coordinates are compared in the given order, without sorting.
bool majorizes(std::span<const double> v, std::span<const double> u, double tol = 1e-12);

/// T(v, u) = sum_l l (u_l - v_l), 1-based l. Equals the sum of the prefix sums
/// of v - u. Throws PreconditionError unless v majorizes u within tol.
double majorization_transport(std::span<const double> v, std::span<const double> u,
                              double tol = 1e-12);

// Perturbation to a generic frame.

struct Perturbation {
  MatrixFrame frame;  // G, blocks sqrt(d/n) X_i / ||X_i|| + H_i
  std::vector<Matrix> offsets;  // H_i
  double gamma = 0.0;  // max_i (n/d)(||H_i||^2 + 2 ||H_i||)
  double magnitude = 0.0;  // entrywise bound on H in the accepted draw
  int attempts = 0;
};

/**
 * Normalizes every block to squared norm d/n and adds seeded uniform noise
 * until the result is generic with ||H_i||_F <= epsilon / (2n) and
 * gamma <= min(1, epsilon). When the normalized frame is already generic no
 * noise is added and gamma = 0. Requires epsilon < 0.3, n > d and nonzero
 * blocks.
 */
Perturbation perturb_to_generic(const MatrixFrame& frame, double epsilon, std::uint64_t seed,
                                double genericity_tol = kDefaultTol, int max_attempts = 64);

// The rounding pipeline.

struct PaulsenConfig {
  SolverConfig solver;
  double genericity_tol = kDefaultTol;
  int max_perturbation_attempts = 64;

  /// Tolerance for the output equal-norm PMF check: 10 x solver grad tol.
  double output_tol(Index d) const { return 10.0 * solver.effective_grad_tol(d); }
};

struct PaulsenReport {
  NearnessReport input_nearness;
  double input_epsilon = 0.0;
  double gamma = 0.0;
  int perturbation_attempts = 0;

  MatrixFrame perturbed;          // G
  SolveResult solve;              // radial isotropy of (G, d/n)
  Matrix rotation_u;              // A = U M V^T
  Vector singular_values;         // diagonal of M, weakly decreasing
  Matrix rotation_v;
  MatrixFrame rotated_input;      // V^T F
  MatrixFrame rotated_perturbed;  // V^T G
  MatrixFrame helper;             // ||Y_i|| M Y_i / ||M Y_i|| for Y_i in V^T G
  MatrixFrame induced;            // Z, sqrt(d/n) M Y_i / ||M Y_i||
  MatrixFrame output;             // W = V Z

  std::vector<Vector> helper_row_energy;     // a^i
  std::vector<Vector> perturbed_row_energy;  // b^i
  bool majorization_holds = false;           // a^i majorizes b^i for all i
  bool gamma_condition_holds = false;        // (1 -+ gamma) d/n sandwich on V^T G

  double dist_input_perturbed = 0.0;    // dist^2(F, G)
  double dist_rotated_helper = 0.0;     // dist^2(V^T G, helper)
  double dist_helper_induced = 0.0;     // dist^2(helper, Z)
  double dist_rotated_induced = 0.0;    // dist^2(V^T G, Z)
  double dist_rotated_input_induced = 0.0;  // dist^2(V^T F, Z)
  double dist_input_output = 0.0;       // dist^2(F, W)

  double perturbation_bound = 0.0;  // epsilon d
  double perturbed_nearness = 0.0;  // nearness(G).epsilon, at most 4 epsilon
  double intermediate_bound = 0.0;  // 8 epsilon d^2 + 4 gamma d^2
  double bound = 0.0;               // 26 epsilon d^2

  double output_tol = 0.0;
  double output_pmf_residual = 0.0;  // max of operator and norm deviations
  bool output_is_equal_norm_pmf = false;
  bool certified = false;  // dist^2(F, W) <= bound and the output is an equal-norm PMF
};

/// Rounds an epsilon-nearly equal-norm PMF to an equal-norm PMF W with
/// dist^2(F, W) certified against 26 epsilon d^2, epsilon measured by
/// nearness(frame). Throws PreconditionError for epsilon >= 0.3 or n <= d,
/// ConvergenceError when the solve fails.
PaulsenReport paulsen_round(const MatrixFrame& frame, const PaulsenConfig& config,
                            std::uint64_t seed);

}  // namespace matframe
