#pragma once

#include <cstddef>
#include <vector>

#include "matframe/frame.hpp"

namespace matframe {

/// Default cap on the number of d-subsets the Cauchy-Binet oracle enumerates.
inline constexpr std::size_t kDefaultSizeGuard = 1'000'000;

/// Eigenvalues of Q(t) below this fraction of the largest are treated as zero.
inline constexpr double kPdFloor = 1e-12;

/**
 * One element S = (I, (S_l)_{l in I}) of the Cauchy-Binet index set: a choice
 * of d pooled columns grouped by owning block. minor_value is the squared
 * determinant of the selected d x d column matrix, which equals
 * det(sum_{l in I} X[S_l] X[S_l]^T).
 */
struct MinorTerm {
  Subset support;                               // I, ascending
  std::vector<std::vector<Index>> column_sets;  // S_l per entry of support, 0-based within X_l
  double minor_value = 0.0;                     // Delta_S >= 0
  bool negligible = false;                      // Delta_S <= enumeration tol

  /// |S_i| for block i (0 when i is not in the support).
  Index multiplicity(std::size_t block) const;
};

/// Q(t), log det Q(t) and its gradient evaluated together from one
/// eigendecomposition. The Hessian is filled only on request.
struct ObjectiveState {
  Vector t;
  Matrix q;
  double phi = 0.0;
  Vector grad;
  double inverse_condition = 1.0;  // lambda_min(Q) / lambda_max(Q)
  Matrix hessian;
};

/// Q(t) = sum exp(t_i) X_i X_i^T. Throws DomainError if some exp(t_i) overflows.
Matrix q_matrix(const MatrixFrame& frame, const Vector& t);

/// log det Q(t). Throws DomainError when Q(t) is not numerically PD.
double phi(const MatrixFrame& frame, const Vector& t);

/// d Phi / d t_i = exp(t_i) ||Q(t)^{-1/2} X_i||_F^2.
Vector grad_phi(const MatrixFrame& frame, const Vector& t);

ObjectiveState evaluate(const MatrixFrame& frame, const Vector& t, bool with_hessian = false);

/// Second derivatives of Phi:
///   H_ij = delta_ij g_i - exp(t_i + t_j) ||X_i^T Q(t)^{-1} X_j||_F^2.
/// H is positive semidefinite with the all-ones vector in its kernel.
Matrix hessian_phi(const MatrixFrame& frame, const Vector& t);

/// Q^{-1/2} of a symmetric PD matrix; rejects eigenvalues below kPdFloor * max.
Matrix inverse_sqrt_spd(const Matrix& q);

/// All Cauchy-Binet terms, one per d-subset of the pooled columns, in
/// lexicographic order of the column subsets. Zero minors are kept and flagged.
std::vector<MinorTerm> enumerate_minors(const MatrixFrame& frame, double tol = kDefaultTol,
                                        std::size_t size_guard = kDefaultSizeGuard);

/// det Q(t) as sum_S exp(sum_l |S_l| t_l) Delta_S, accumulated in log space.
double det_q_cauchy_binet(const MatrixFrame& frame, const Vector& t,
                          std::size_t size_guard = kDefaultSizeGuard);
double det_q_cauchy_binet(const MatrixFrame& frame, std::span<const MinorTerm> terms,
                          const Vector& t);

/// Gradient of Phi as the ratio of minor sums. Throws DomainError when every
/// minor vanishes.
Vector grad_phi_cauchy_binet(const MatrixFrame& frame, const Vector& t,
                             std::size_t size_guard = kDefaultSizeGuard);
Vector grad_phi_cauchy_binet(const MatrixFrame& frame, std::span<const MinorTerm> terms,
                             const Vector& t);

/// Phi(t) - <t, c>.
double objective(const FrameDatum& datum, const Vector& t);
/// grad Phi(t) - c.
Vector objective_gradient(const FrameDatum& datum, const Vector& t);

/// f + sum c_i log c_i; -infinity stays -infinity.
double log_capacity(const FrameDatum& datum, double f_value);

/// Shifts t along the all-ones direction so that <t, c> = 0. Leaves the
/// objective unchanged when sum c = d.
Vector recenter(const Vector& t, const Vector& c);

}  // namespace matframe
