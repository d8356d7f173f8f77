#include "matframe/polytope.hpp"

#include <algorithm>
#include <cstdint>

namespace matframe {
namespace {

Subset subset_from_mask(std::uint32_t mask, std::size_t n) {
  Subset s;
  for (std::size_t i = 0; i < n; ++i)
    if (mask & (std::uint32_t{1} << i)) s.push_back(i);
  return s;
}

void sort_subsets(std::vector<Subset>& v) {
  std::sort(v.begin(), v.end(), [](const Subset& a, const Subset& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
}

}  // namespace

PolytopeReport in_orbit_polytope(const FrameDatum& datum, double tol) {
  const MatrixFrame& frame = datum.frame;
  const std::size_t n = frame.size();
  if (n > kMaxPolytopeBlocks)
    throw SizeGuardError("orbit polytope enumeration supports at most " +
                         std::to_string(kMaxPolytopeBlocks) + " blocks");

  PolytopeReport report;
  report.sum_check = datum.weights.sum() == Rational(frame.dim());

  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const Subset subset = subset_from_mask(mask, n);
    const Rational lhs = datum.weights.subset_sum(subset);
    const Rational rank = column_span_dim(frame, subset, tol);
    if (lhs > rank) {
      report.violating_subsets.push_back(subset);
    } else if (lhs == rank && mask != full) {
      report.tight_subsets.push_back(subset);
    }
  }
  sort_subsets(report.tight_subsets);
  sort_subsets(report.violating_subsets);
  report.member = report.sum_check && report.violating_subsets.empty();
  return report;
}

bool in_relative_interior(const FrameDatum& datum, double tol) {
  const PolytopeReport report = in_orbit_polytope(datum, tol);
  if (!report.member) return false;
  // With positive weights summing to d, a proper subset of rank d cannot be
  // tight, so every tight subset listed here has rank below d.
  const int d = static_cast<int>(datum.frame.dim());
  return std::none_of(report.tight_subsets.begin(), report.tight_subsets.end(),
                      [&](const Subset& s) { return column_span_dim(datum.frame, s, tol) < d; });
}

std::optional<Subset> unsplit_tight_subset(const PolytopeReport& report, std::size_t n) {
  for (const Subset& s : report.tight_subsets) {
    Subset complement;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (k < s.size() && s[k] == i)
        ++k;
      else
        complement.push_back(i);
    }
    if (!std::binary_search(report.tight_subsets.begin(), report.tight_subsets.end(), complement,
                            [](const Subset& a, const Subset& b) {
                              return a.size() != b.size() ? a.size() < b.size() : a < b;
                            }))
      return s;
  }
  return std::nullopt;
}

bool tight_subsets_split(const PolytopeReport& report, std::size_t n) {
  return report.member && !unsplit_tight_subset(report, n).has_value();
}

bool is_polystable(const FrameDatum& datum, double tol) {
  return tight_subsets_split(in_orbit_polytope(datum, tol), datum.frame.size());
}

bool check_sigma0_stability(const MatrixFrame& frame, double tol) {
  if (frame.size() <= static_cast<std::size_t>(frame.dim()))
    throw PreconditionError("sigma_0 stability certificate needs n > d (n = " +
                            std::to_string(frame.size()) + ", d = " +
                            std::to_string(frame.dim()) + ")");
  return is_generic(frame, tol);
}

}  // namespace matframe
