#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace matframe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Zero-based block indices, kept sorted ascending.
using Subset = std::vector<std::size_t>;

/// Default relative tolerance for rank and positive-definiteness tests.
inline constexpr double kDefaultTol = 1e-9;

/// Thrown when shapes of frames, matrices or weight vectors do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an input violates a documented precondition (e.g. n <= d where
/// n > d is required, or weights that do not sum to d).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical quantity leaves its domain (non-PD Q(t), overflow).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when an exponential enumeration would exceed its size guard.
class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/**
 * An ordered collection of n real matrices X_1..X_n, each with d rows and
 * d_i >= 1 columns. Blocks are held by value; transforms return new frames.
 */
class MatrixFrame {
 public:
  MatrixFrame(Index d, std::vector<Matrix> blocks);

  /// One block per column of `columns` (the d_i = 1 view).
  static MatrixFrame FromColumns(const Matrix& columns);

  Index dim() const { return d_; }
  std::size_t size() const { return blocks_.size(); }
  Index total_columns() const { return total_columns_; }

  const Matrix& block(std::size_t i) const { return blocks_.at(i); }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  Index block_cols(std::size_t i) const { return blocks_.at(i).cols(); }
  std::vector<Index> block_widths() const;

  /// Offset of block i's first column inside pooled().
  Index column_offset(std::size_t i) const { return offsets_.at(i); }
  /// Block owning pooled column `col`.
  std::size_t block_of_column(Index col) const;

  /// d x N matrix [X_1 | ... | X_n].
  Matrix pooled() const;
  /// d x (sum of d_i over `subset`) matrix of the selected blocks' columns.
  Matrix pooled(std::span<const std::size_t> subset) const;

  bool same_shape(const MatrixFrame& other) const;

 private:
  Index d_;
  std::vector<Matrix> blocks_;
  std::vector<Index> offsets_;
  Index total_columns_ = 0;
};

/**
 * Positive rational weights c_1..c_n with exact arithmetic.
 *
 * omega() is the least common denominator; sigma() is the induced integral
 * weight of the frame quiver: sigma[0] = omega at the source and
 * sigma[i] = -omega * c_i at sink i (1-based sinks).
 */
class WeightVector {
 public:
  explicit WeightVector(std::vector<Rational> weights);

  /// n copies of num/den.
  static WeightVector Uniform(std::size_t n, long long num, long long den);

  std::size_t size() const { return weights_.size(); }
  const Rational& operator[](std::size_t i) const { return weights_.at(i); }
  const std::vector<Rational>& values() const { return weights_; }

  Rational sum() const;
  Rational subset_sum(std::span<const std::size_t> subset) const;
  BigInt omega() const;
  /// Weight on a bipartite quiver with `sources` source vertices followed by
  /// size() sink vertices.
  std::vector<BigInt> sigma(std::size_t sources = 1) const;
  Vector to_vector() const;

 private:
  std::vector<Rational> weights_;
};

/// A frame together with its weights; n must agree.
struct FrameDatum {
  FrameDatum(MatrixFrame f, WeightVector c);

  MatrixFrame frame;
  WeightVector weights;
};

// Frame arithmetic.

/// Sum of X_i X_i^T.
Matrix frame_operator(const MatrixFrame& frame);

/// True iff lambda_min(S) > tol * max(lambda_max(S), 1) for S the frame operator.
bool is_matrix_frame(const MatrixFrame& frame, double tol = kDefaultTol);

/// {A X_1, ..., A X_n}.
MatrixFrame apply_transform(const Matrix& a, const MatrixFrame& frame);

/// Sum over blocks of the squared Frobenius norm of X_i - Y_i.
double dist_squared(const MatrixFrame& a, const MatrixFrame& b);

/// Every d-subset of the pooled columns is a basis. Columns are first scaled
/// by the largest absolute entry of the pooled matrix; a subset counts as a
/// basis when |det| > tol. Cost is C(N, d) determinants; throws
/// SizeGuardError above `size_guard` subsets.
bool is_generic(const MatrixFrame& frame, double tol = kDefaultTol,
                std::size_t size_guard = 1'000'000);

/// Numerical rank of the pooled columns of `subset` (singular values above
/// tol times the largest one). The empty subset has rank 0.
int column_span_dim(const MatrixFrame& frame, std::span<const std::size_t> subset,
                    double tol = kDefaultTol);

// Small dense helpers shared by the modules.

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// Number of k-subsets of an N-set, saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

/// Calls fn(std::span<const Index>) for every k-subset of {0..n-1} in
/// lexicographic order.
template <typename Fn>
void for_each_combination(Index n, Index k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) idx[static_cast<std::size_t>(j)] = j;
  while (true) {
    fn(std::span<const Index>(idx));
    Index j = k - 1;
    while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - k + j) --j;
    if (j < 0) return;
    ++idx[static_cast<std::size_t>(j)];
    for (Index l = j + 1; l < k; ++l)
      idx[static_cast<std::size_t>(l)] = idx[static_cast<std::size_t>(l - 1)] + 1;
  }
}

std::string to_string(const Subset& subset);

}  // namespace matframe
