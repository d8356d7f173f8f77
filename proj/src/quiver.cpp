#include "matframe/quiver.hpp"

#include <algorithm>
#include <cmath>

namespace matframe {

void BipartiteQuiverRep::validate() const {
  for (Index dim : source_dims)
    if (dim < 0) throw DimensionError("negative source dimension");
  for (Index dim : sink_dims)
    if (dim < 0) throw DimensionError("negative sink dimension");
  for (std::size_t k = 0; k < arrows.size(); ++k) {
    const Arrow& a = arrows[k];
    if (a.source >= source_dims.size() || a.sink >= sink_dims.size())
      throw DimensionError("arrow " + std::to_string(k) + " has an endpoint out of range");
    if (a.map.rows() != sink_dims[a.sink] || a.map.cols() != source_dims[a.source])
      throw DimensionError("arrow " + std::to_string(k) + " is " + std::to_string(a.map.rows()) +
                           "x" + std::to_string(a.map.cols()) + ", expected " +
                           std::to_string(sink_dims[a.sink]) + "x" +
                           std::to_string(source_dims[a.source]));
  }
}

BipartiteQuiverRep BipartiteQuiverRep::FromFrame(const MatrixFrame& frame) {
  BipartiteQuiverRep rep;
  rep.source_dims = {frame.dim()};
  rep.sink_dims.assign(frame.size(), 1);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Matrix& x = frame.block(i);
    for (Index l = 0; l < x.cols(); ++l) rep.arrows.push_back({0, i, x.col(l).transpose()});
  }
  return rep;
}

bool is_pmf(const FrameDatum& datum, double tol) {
  const MatrixFrame& f = datum.frame;
  Matrix s = Matrix::Zero(f.dim(), f.dim());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Matrix& x = f.block(i);
    if (std::abs(x.squaredNorm() - 1.0) > tol) return false;
    s.noalias() += datum.weights[i].convert_to<double>() * (x * x.transpose());
  }
  return spectral_norm(s - Matrix::Identity(f.dim(), f.dim())) <= tol;
}

bool is_equal_norm_pmf(const MatrixFrame& frame, double tol) {
  const double target = static_cast<double>(frame.dim()) / static_cast<double>(frame.size());
  for (const Matrix& x : frame.blocks())
    if (std::abs(x.squaredNorm() - target) > tol) return false;
  return spectral_norm(frame_operator(frame) - Matrix::Identity(frame.dim(), frame.dim())) <= tol;
}

NearnessReport nearness(const MatrixFrame& frame) {
  NearnessReport r;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(frame_operator(frame), Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  r.epsilon_operator = std::max({0.0, 1.0 - ev.minCoeff(), ev.maxCoeff() - 1.0});
  const double scale = static_cast<double>(frame.size()) / static_cast<double>(frame.dim());
  for (const Matrix& x : frame.blocks())
    r.epsilon_norms = std::max(r.epsilon_norms, std::abs(scale * x.squaredNorm() - 1.0));
  r.epsilon = std::max(r.epsilon_operator, r.epsilon_norms);
  return r;
}

Matrix rif_operator(const FrameDatum& datum) {
  const MatrixFrame& f = datum.frame;
  Matrix s = Matrix::Zero(f.dim(), f.dim());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Matrix& x = f.block(i);
    const double norm2 = x.squaredNorm();
    if (norm2 == 0.0)
      throw PreconditionError("block " + std::to_string(i + 1) +
                              " is zero; radial isotropy is undefined");
    s.noalias() += (datum.weights[i].convert_to<double>() / norm2) * (x * x.transpose());
  }
  return s;
}

double rif_residual(const FrameDatum& datum) {
  const Index d = datum.frame.dim();
  return spectral_norm(rif_operator(datum) - Matrix::Identity(d, d));
}

bool is_rif(const FrameDatum& datum, double tol) { return rif_residual(datum) <= tol; }

bool is_geometric_bl_datum(const BipartiteQuiverRep& rep, const WeightVector& weights,
                           double tol) {
  rep.validate();
  if (weights.size() != rep.sink_dims.size())
    throw DimensionError("weights do not match the number of sinks");
  std::vector<Matrix> source_sum, sink_sum;
  for (Index dim : rep.source_dims) source_sum.push_back(Matrix::Zero(dim, dim));
  for (Index dim : rep.sink_dims) sink_sum.push_back(Matrix::Zero(dim, dim));
  for (const auto& a : rep.arrows) {
    source_sum[a.source].noalias() +=
        weights[a.sink].convert_to<double>() * (a.map.transpose() * a.map);
    sink_sum[a.sink].noalias() += a.map * a.map.transpose();
  }
  for (const Matrix& m : source_sum)
    if (spectral_norm(m - Matrix::Identity(m.rows(), m.cols())) > tol) return false;
  for (const Matrix& m : sink_sum)
    if (spectral_norm(m - Matrix::Identity(m.rows(), m.cols())) > tol) return false;
  return true;
}

double sigma_critical_residual(const BipartiteQuiverRep& rep, const std::vector<BigInt>& sigma) {
  rep.validate();
  if (sigma.size() != rep.vertex_count())
    throw DimensionError("sigma has " + std::to_string(sigma.size()) + " entries for " +
                         std::to_string(rep.vertex_count()) + " vertices");
  const std::size_t m = rep.source_dims.size();
  std::vector<Matrix> balance;
  for (Index dim : rep.source_dims) balance.push_back(Matrix::Zero(dim, dim));
  for (Index dim : rep.sink_dims) balance.push_back(Matrix::Zero(dim, dim));
  for (const auto& a : rep.arrows) {
    balance[a.source].noalias() += a.map.transpose() * a.map;  // tail
    balance[m + a.sink].noalias() -= a.map * a.map.transpose();  // head
  }
  double worst = 0.0;
  for (std::size_t x = 0; x < balance.size(); ++x) {
    Matrix& b = balance[x];
    b.diagonal().array() -= sigma[x].convert_to<double>();
    worst = std::max(worst, spectral_norm(b));
  }
  return worst;
}

bool is_sigma_critical(const BipartiteQuiverRep& rep, const std::vector<BigInt>& sigma,
                       double tol) {
  return sigma_critical_residual(rep, sigma) <= tol;
}

BipartiteQuiverRep scale_to_critical_candidate(const BipartiteQuiverRep& rep,
                                               const WeightVector& weights) {
  rep.validate();
  if (weights.size() != rep.sink_dims.size())
    throw DimensionError("weights do not match the number of sinks");
  const std::vector<BigInt> sigma = weights.sigma(rep.source_dims.size());
  const std::size_t m = rep.source_dims.size();
  BipartiteQuiverRep out = rep;
  for (auto& a : out.arrows) {
    const double head_weight = (-sigma[m + a.sink]).convert_to<double>();
    a.map *= std::sqrt(head_weight);
  }
  return out;
}

}  // namespace matframe
