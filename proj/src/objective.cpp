#include "matframe/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace matframe {
namespace {

void check_t(const MatrixFrame& frame, const Vector& t) {
  if (static_cast<std::size_t>(t.size()) != frame.size())
    throw DimensionError("t has " + std::to_string(t.size()) + " entries but the frame has " +
                         std::to_string(frame.size()) + " blocks");
  if (!t.allFinite()) throw DomainError("t has non-finite entries");
}

struct SpdFactor {
  Vector eigenvalues;
  Matrix eigenvectors;
};

SpdFactor factor_spd(const Matrix& q) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
  if (eig.info() != Eigen::Success) throw DomainError("eigendecomposition of Q(t) failed");
  const Vector& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0) || ev.minCoeff() <= kPdFloor * top)
    throw DomainError("Q(t) is not numerically positive definite (eigenvalue ratio " +
                      std::to_string(top > 0.0 ? ev.minCoeff() / top : 0.0) +
                      "); the frame is not a matrix frame along this direction");
  return {ev, eig.eigenvectors()};
}

Matrix inverse_sqrt_from(const SpdFactor& f) {
  return f.eigenvectors * f.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
         f.eigenvectors.transpose();
}

Vector grad_from(const MatrixFrame& frame, const Vector& t, const Matrix& q_inv_sqrt) {
  Vector g(static_cast<Index>(frame.size()));
  for (std::size_t i = 0; i < frame.size(); ++i)
    g(static_cast<Index>(i)) =
        std::exp(t(static_cast<Index>(i))) * (q_inv_sqrt * frame.block(i)).squaredNorm();
  return g;
}

Matrix hessian_from(const MatrixFrame& frame, const Vector& t, const Matrix& q_inv_sqrt,
                    const Vector& grad) {
  const auto n = static_cast<Index>(frame.size());
  std::vector<Matrix> b;
  b.reserve(frame.size());
  for (Index i = 0; i < n; ++i)
    b.emplace_back(std::exp(0.5 * t(i)) * (q_inv_sqrt * frame.block(static_cast<std::size_t>(i))));
  Matrix h(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) {
      const double cross = (b[static_cast<std::size_t>(i)].transpose() *
                            b[static_cast<std::size_t>(j)]).squaredNorm();
      h(i, j) = h(j, i) = -cross;
    }
  h.diagonal() += grad;
  return h;
}

// Exponent sum_l |S_l| t_l plus log Delta_S, or -inf for a vanishing minor.
double log_weight(const MinorTerm& term, const Vector& t) {
  if (!(term.minor_value > 0.0)) return -std::numeric_limits<double>::infinity();
  double e = std::log(term.minor_value);
  for (std::size_t k = 0; k < term.support.size(); ++k)
    e += static_cast<double>(term.column_sets[k].size()) *
         t(static_cast<Index>(term.support[k]));
  return e;
}

}  // namespace

Index MinorTerm::multiplicity(std::size_t block) const {
  auto it = std::lower_bound(support.begin(), support.end(), block);
  if (it == support.end() || *it != block) return 0;
  return static_cast<Index>(column_sets[static_cast<std::size_t>(it - support.begin())].size());
}

Matrix q_matrix(const MatrixFrame& frame, const Vector& t) {
  check_t(frame, t);
  Matrix q = Matrix::Zero(frame.dim(), frame.dim());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const double w = std::exp(t(static_cast<Index>(i)));
    if (!std::isfinite(w))
      throw DomainError("exp(t_" + std::to_string(i + 1) +
                        ") overflows; recenter t along the all-ones direction");
    const Matrix& x = frame.block(i);
    q.noalias() += w * (x * x.transpose());
  }
  return q;
}

double phi(const MatrixFrame& frame, const Vector& t) {
  return factor_spd(q_matrix(frame, t)).eigenvalues.array().log().sum();
}

Vector grad_phi(const MatrixFrame& frame, const Vector& t) {
  const SpdFactor f = factor_spd(q_matrix(frame, t));
  return grad_from(frame, t, inverse_sqrt_from(f));
}

ObjectiveState evaluate(const MatrixFrame& frame, const Vector& t, bool with_hessian) {
  ObjectiveState s;
  s.t = t;
  s.q = q_matrix(frame, t);
  const SpdFactor f = factor_spd(s.q);
  s.phi = f.eigenvalues.array().log().sum();
  s.inverse_condition = f.eigenvalues.minCoeff() / f.eigenvalues.maxCoeff();
  const Matrix r = inverse_sqrt_from(f);
  s.grad = grad_from(frame, t, r);
  if (with_hessian) s.hessian = hessian_from(frame, t, r, s.grad);
  return s;
}

Matrix hessian_phi(const MatrixFrame& frame, const Vector& t) {
  return evaluate(frame, t, true).hessian;
}

Matrix inverse_sqrt_spd(const Matrix& q) { return inverse_sqrt_from(factor_spd(q)); }

std::vector<MinorTerm> enumerate_minors(const MatrixFrame& frame, double tol,
                                        std::size_t size_guard) {
  const Index d = frame.dim();
  const Index n_cols = frame.total_columns();
  if (n_cols < d)
    throw PreconditionError("Cauchy-Binet expansion needs at least d = " + std::to_string(d) +
                            " columns, the frame has " + std::to_string(n_cols));
  const std::size_t count = binomial(static_cast<std::size_t>(n_cols), static_cast<std::size_t>(d));
  if (count > size_guard)
    throw SizeGuardError("Cauchy-Binet expansion has " + std::to_string(count) +
                         " terms, above the size guard " + std::to_string(size_guard));

  const Matrix pooled = frame.pooled();
  std::vector<MinorTerm> terms;
  terms.reserve(count);
  Matrix sub(d, d);
  for_each_combination(n_cols, d, [&](std::span<const Index> cols) {
    MinorTerm term;
    for (Index j = 0; j < d; ++j) {
      const Index col = cols[static_cast<std::size_t>(j)];
      sub.col(j) = pooled.col(col);
      const std::size_t block = frame.block_of_column(col);
      if (term.support.empty() || term.support.back() != block) {
        term.support.push_back(block);
        term.column_sets.emplace_back();
      }
      term.column_sets.back().push_back(col - frame.column_offset(block));
    }
    const double det = sub.partialPivLu().determinant();
    term.minor_value = det * det;
    term.negligible = term.minor_value <= tol;
    terms.push_back(std::move(term));
  });
  return terms;
}

double det_q_cauchy_binet(const MatrixFrame& frame, std::span<const MinorTerm> terms,
                          const Vector& t) {
  check_t(frame, t);
  double top = -std::numeric_limits<double>::infinity();
  for (const MinorTerm& term : terms) top = std::max(top, log_weight(term, t));
  if (!std::isfinite(top)) return 0.0;
  double acc = 0.0;
  for (const MinorTerm& term : terms) acc += std::exp(log_weight(term, t) - top);
  return std::exp(top) * acc;
}

double det_q_cauchy_binet(const MatrixFrame& frame, const Vector& t, std::size_t size_guard) {
  const auto terms = enumerate_minors(frame, kDefaultTol, size_guard);
  return det_q_cauchy_binet(frame, terms, t);
}

Vector grad_phi_cauchy_binet(const MatrixFrame& frame, std::span<const MinorTerm> terms,
                             const Vector& t) {
  check_t(frame, t);
  double top = -std::numeric_limits<double>::infinity();
  for (const MinorTerm& term : terms) top = std::max(top, log_weight(term, t));
  if (!std::isfinite(top))
    throw DomainError("every Cauchy-Binet minor vanishes; the frame is not a matrix frame");

  Vector numer = Vector::Zero(static_cast<Index>(frame.size()));
  double denom = 0.0;
  for (const MinorTerm& term : terms) {
    const double w = std::exp(log_weight(term, t) - top);
    if (w == 0.0) continue;
    denom += w;
    for (std::size_t k = 0; k < term.support.size(); ++k)
      numer(static_cast<Index>(term.support[k])) +=
          static_cast<double>(term.column_sets[k].size()) * w;
  }
  return numer / denom;
}

Vector grad_phi_cauchy_binet(const MatrixFrame& frame, const Vector& t, std::size_t size_guard) {
  const auto terms = enumerate_minors(frame, kDefaultTol, size_guard);
  return grad_phi_cauchy_binet(frame, terms, t);
}

double objective(const FrameDatum& datum, const Vector& t) {
  return phi(datum.frame, t) - t.dot(datum.weights.to_vector());
}

Vector objective_gradient(const FrameDatum& datum, const Vector& t) {
  return grad_phi(datum.frame, t) - datum.weights.to_vector();
}

double log_capacity(const FrameDatum& datum, double f_value) {
  if (f_value == -std::numeric_limits<double>::infinity()) return f_value;
  double entropy = 0.0;
  for (const Rational& c : datum.weights.values()) {
    const double cd = c.convert_to<double>();
    entropy += cd * std::log(cd);
  }
  return f_value + entropy;
}

Vector recenter(const Vector& t, const Vector& c) {
  const double shift = t.dot(c) / c.sum();
  return t.array() - shift;
}

}  // namespace matframe
