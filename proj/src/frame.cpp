#include "matframe/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace matframe {

MatrixFrame::MatrixFrame(Index d, std::vector<Matrix> blocks)
    : d_(d), blocks_(std::move(blocks)) {
  if (d_ < 1) throw DimensionError("frame dimension d must be positive");
  if (blocks_.empty()) throw DimensionError("frame needs at least one block");
  offsets_.reserve(blocks_.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Matrix& b = blocks_[i];
    if (b.rows() != d_)
      throw DimensionError("block " + std::to_string(i + 1) + " has " +
                           std::to_string(b.rows()) + " rows, expected " + std::to_string(d_));
    if (b.cols() < 1)
      throw DimensionError("block " + std::to_string(i + 1) + " has no columns");
    if (!b.allFinite())
      throw DimensionError("block " + std::to_string(i + 1) + " has non-finite entries");
    offsets_.push_back(total_columns_);
    total_columns_ += b.cols();
  }
}

MatrixFrame MatrixFrame::FromColumns(const Matrix& columns) {
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(columns.cols()));
  for (Index j = 0; j < columns.cols(); ++j) blocks.emplace_back(columns.col(j));
  return MatrixFrame(columns.rows(), std::move(blocks));
}

std::vector<Index> MatrixFrame::block_widths() const {
  std::vector<Index> w;
  w.reserve(blocks_.size());
  for (const Matrix& b : blocks_) w.push_back(b.cols());
  return w;
}

std::size_t MatrixFrame::block_of_column(Index col) const {
  if (col < 0 || col >= total_columns_) throw DimensionError("column index out of range");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), col);
  return static_cast<std::size_t>(std::distance(offsets_.begin(), it) - 1);
}

Matrix MatrixFrame::pooled() const {
  Matrix out(d_, total_columns_);
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    out.middleCols(offsets_[i], blocks_[i].cols()) = blocks_[i];
  return out;
}

Matrix MatrixFrame::pooled(std::span<const std::size_t> subset) const {
  Index cols = 0;
  for (std::size_t i : subset) cols += block(i).cols();
  Matrix out(d_, cols);
  Index at = 0;
  for (std::size_t i : subset) {
    out.middleCols(at, blocks_[i].cols()) = blocks_[i];
    at += blocks_[i].cols();
  }
  return out;
}

bool MatrixFrame::same_shape(const MatrixFrame& other) const {
  if (d_ != other.d_ || blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].cols() != other.blocks_[i].cols()) return false;
  return true;
}

WeightVector::WeightVector(std::vector<Rational> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw DimensionError("weight vector is empty");
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] <= 0)
      throw PreconditionError("weight " + std::to_string(i + 1) + " is not positive");
}

WeightVector WeightVector::Uniform(std::size_t n, long long num, long long den) {
  return WeightVector(std::vector<Rational>(n, Rational(num, den)));
}

Rational WeightVector::sum() const {
  Rational s = 0;
  for (const Rational& c : weights_) s += c;
  return s;
}

Rational WeightVector::subset_sum(std::span<const std::size_t> subset) const {
  Rational s = 0;
  for (std::size_t i : subset) s += weights_.at(i);
  return s;
}

BigInt WeightVector::omega() const {
  BigInt w = 1;
  for (const Rational& c : weights_) {
    BigInt den = boost::multiprecision::denominator(c);
    w = w / boost::multiprecision::gcd(w, den) * den;
  }
  return w;
}

std::vector<BigInt> WeightVector::sigma(std::size_t sources) const {
  const BigInt w = omega();
  std::vector<BigInt> s(sources, w);
  s.reserve(sources + weights_.size());
  for (const Rational& c : weights_) {
    Rational v = Rational(w) * c;
    s.push_back(-boost::multiprecision::numerator(v));
  }
  return s;
}

Vector WeightVector::to_vector() const {
  Vector v(static_cast<Index>(weights_.size()));
  for (std::size_t i = 0; i < weights_.size(); ++i)
    v(static_cast<Index>(i)) = weights_[i].convert_to<double>();
  return v;
}

FrameDatum::FrameDatum(MatrixFrame f, WeightVector c) : frame(std::move(f)), weights(std::move(c)) {
  if (frame.size() != weights.size())
    throw DimensionError("frame has " + std::to_string(frame.size()) + " blocks but " +
                         std::to_string(weights.size()) + " weights were given");
}

Matrix frame_operator(const MatrixFrame& frame) {
  Matrix s = Matrix::Zero(frame.dim(), frame.dim());
  for (const Matrix& x : frame.blocks()) s.noalias() += x * x.transpose();
  return s;
}

bool is_matrix_frame(const MatrixFrame& frame, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(frame_operator(frame), Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  return ev.minCoeff() > tol * std::max(ev.maxCoeff(), 1.0);
}

MatrixFrame apply_transform(const Matrix& a, const MatrixFrame& frame) {
  if (a.rows() != frame.dim() || a.cols() != frame.dim())
    throw DimensionError("transform is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " but frame dimension is " +
                         std::to_string(frame.dim()));
  if (!a.allFinite()) throw DimensionError("transform has non-finite entries");
  std::vector<Matrix> out;
  out.reserve(frame.size());
  for (const Matrix& x : frame.blocks()) out.emplace_back(a * x);
  return MatrixFrame(frame.dim(), std::move(out));
}

double dist_squared(const MatrixFrame& a, const MatrixFrame& b) {
  if (!a.same_shape(b)) throw DimensionError("dist_squared: frames have different shapes");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a.block(i) - b.block(i)).squaredNorm();
  return s;
}

bool is_generic(const MatrixFrame& frame, double tol, std::size_t size_guard) {
  const Index d = frame.dim();
  const Index n_cols = frame.total_columns();
  if (n_cols < d)
    throw PreconditionError("frame has " + std::to_string(n_cols) + " columns, fewer than d = " +
                            std::to_string(d));
  const auto count = binomial(static_cast<std::size_t>(n_cols), static_cast<std::size_t>(d));
  if (count > size_guard)
    throw SizeGuardError("genericity test needs " + std::to_string(count) +
                         " minors, above the size guard " + std::to_string(size_guard));

  Matrix pooled = frame.pooled();
  const double scale = pooled.cwiseAbs().maxCoeff();
  if (scale == 0.0) return false;
  pooled /= scale;

  bool generic = true;
  Matrix sub(d, d);
  for_each_combination(n_cols, d, [&](std::span<const Index> cols) {
    if (!generic) return;
    for (Index j = 0; j < d; ++j) sub.col(j) = pooled.col(cols[static_cast<std::size_t>(j)]);
    if (std::abs(sub.partialPivLu().determinant()) <= tol) generic = false;
  });
  return generic;
}

int column_span_dim(const MatrixFrame& frame, std::span<const std::size_t> subset, double tol) {
  if (subset.empty()) return 0;
  for (std::size_t i : subset)
    if (i >= frame.size()) throw DimensionError("subset index out of range");
  const Matrix cols = frame.pooled(subset);
  Eigen::JacobiSVD<Matrix> svd(cols);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = tol * sv(0);
  int rank = 0;
  for (Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cutoff) ++rank;
  return rank;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t r = 1;
  for (std::size_t j = 1; j <= k; ++j) {
    const std::size_t num = n - k + j;
    // r * num / j is always integral; divide by the gcd first to delay overflow.
    const std::size_t g = std::gcd(r, j);
    const std::size_t r1 = r / g;
    const std::size_t j1 = j / g;
    const std::size_t num1 = num / j1;
    if (r1 > kMax / num1) return kMax;
    r = r1 * num1;
  }
  return r;
}

std::string to_string(const Subset& subset) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < subset.size(); ++k) os << (k ? "," : "") << subset[k] + 1;
  os << '}';
  return os.str();
}

}  // namespace matframe
