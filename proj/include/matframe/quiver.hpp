#pragma once

#include <cstddef>
#include <vector>

#include "matframe/frame.hpp"

namespace matframe {

/**
 * A real representation of a bipartite quiver: every arrow runs from one of
 * the m source vertices to one of the n sink vertices and carries a
 * sink_dim x source_dim matrix.
 *
 * Vertices are numbered sources first (0..m-1), then sinks (m..m+n-1); this
 * is the indexing expected of integer weights passed to is_sigma_critical.
 */
struct BipartiteQuiverRep {
  struct Arrow {
    std::size_t source = 0;  // 0-based among sources
    std::size_t sink = 0;    // 0-based among sinks
    Matrix map;
  };

  std::vector<Index> source_dims;
  std::vector<Index> sink_dims;
  std::vector<Arrow> arrows;

  /// Throws DimensionError if an arrow has the wrong shape or endpoints.
  void validate() const;

  std::size_t vertex_count() const { return source_dims.size() + sink_dims.size(); }

  /// The frame quiver: one source of dimension d, sink i of dimension 1 and
  /// one arrow x_{i,l}^T per column of X_i.
  static BipartiteQuiverRep FromFrame(const MatrixFrame& frame);
};

/// Smallest epsilon for the operator sandwich (1-e) I <= S <= (1+e) I, for the
/// norm sandwich (1-e) d/n <= ||X_i||^2 <= (1+e) d/n, and their maximum.
struct NearnessReport {
  double epsilon_operator = 0.0;
  double epsilon_norms = 0.0;
  double epsilon = 0.0;
};

/// sum c_i X_i X_i^T = I (spectral norm) and ||X_i||_F^2 = 1, both within tol.
bool is_pmf(const FrameDatum& datum, double tol = kDefaultTol);

/// sum X_i X_i^T = I and ||X_i||_F^2 = d/n, both within tol.
bool is_equal_norm_pmf(const MatrixFrame& frame, double tol = kDefaultTol);

NearnessReport nearness(const MatrixFrame& frame);

/// Spectral norm of sum c_i X_i X_i^T / ||X_i||^2 - I. Throws PreconditionError
/// on a zero block.
double rif_residual(const FrameDatum& datum);
/// The weighted normalized sum itself.
Matrix rif_operator(const FrameDatum& datum);
bool is_rif(const FrameDatum& datum, double tol = kDefaultTol);

/// Source equations sum_i c_i sum_a V(a)^T V(a) = I and sink equations
/// sum_a V(a) V(a)^T = I, all within tol in spectral norm.
bool is_geometric_bl_datum(const BipartiteQuiverRep& rep, const WeightVector& weights,
                           double tol = kDefaultTol);

/// Largest spectral-norm deviation over vertices of
///   sum_{a leaving x} V(a)^T V(a) - sum_{a entering x} V(a) V(a)^T - sigma(x) I.
double sigma_critical_residual(const BipartiteQuiverRep& rep, const std::vector<BigInt>& sigma);
bool is_sigma_critical(const BipartiteQuiverRep& rep, const std::vector<BigInt>& sigma,
                       double tol = kDefaultTol);

/// W(a) = sqrt(-sigma_c(head a)) V(a), with sigma_c induced by the weights.
BipartiteQuiverRep scale_to_critical_candidate(const BipartiteQuiverRep& rep,
                                               const WeightVector& weights);

}  // namespace matframe
