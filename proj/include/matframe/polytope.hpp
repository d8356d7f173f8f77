#pragma once

#include <optional>

#include <vector>

#include "matframe/frame.hpp"

namespace matframe {

/// Largest n accepted by the exhaustive subset enumeration (2^n - 1 subsets).
inline constexpr std::size_t kMaxPolytopeBlocks = 24;

/**
 * Outcome of testing c against the orbit polytope
 *   K_F = { c : sum c_i = d,  sum_{i in I} c_i <= dim span(X_i : i in I) for all I }.
 *
 * tight_subsets lists proper nonempty I with equality; violating_subsets lists
 * I whose bound fails. Both are sorted by (size, lexicographic).
 */
struct PolytopeReport {
  bool member = false;
  bool sum_check = false;
  std::vector<Subset> tight_subsets;
  std::vector<Subset> violating_subsets;
};

/// Exact membership test. The weight side is compared in rational arithmetic
/// against the integer ranks; only the ranks use `tol`.
PolytopeReport in_orbit_polytope(const FrameDatum& datum, double tol = kDefaultTol);

/// Member with every proper subset constraint strict.
bool in_relative_interior(const FrameDatum& datum, double tol = kDefaultTol);

/// True when every tight subset of a member report has a tight complement.
/// Tight I and [n] \ I then have complementary column spans, so the frame
/// quiver representation splits as a direct sum along I; this is the
/// polystability condition under which the infimum of Phi(t) - <t, c> is
/// attained. A non-member report returns false.
bool tight_subsets_split(const PolytopeReport& report, std::size_t n);

/// First tight subset whose complement is not tight, if any.
std::optional<Subset> unsplit_tight_subset(const PolytopeReport& report, std::size_t n);

bool is_polystable(const FrameDatum& datum, double tol = kDefaultTol);

/// Genericity certificate for stability under sigma_0 = (n, -d, ..., -d).
/// Requires n > d.
bool check_sigma0_stability(const MatrixFrame& frame, double tol = kDefaultTol);

}  // namespace matframe
