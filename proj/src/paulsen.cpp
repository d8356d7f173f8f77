#include "matframe/paulsen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace matframe {

bool majorizes(std::span<const double> v, std::span<const double> u, double tol) {
  if (v.size() != u.size()) throw DimensionError("majorizes: vectors differ in length");
  double pv = 0.0, pu = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    pv += v[j];
    pu += u[j];
    if (j + 1 < v.size() && pv < pu - tol) return false;
  }
  return std::abs(pv - pu) <= tol;
}

double majorization_transport(std::span<const double> v, std::span<const double> u, double tol) {
  if (!majorizes(v, u, tol))
    throw PreconditionError("majorization_transport: v does not majorize u");
  double t = 0.0;
  for (std::size_t l = 0; l < v.size(); ++l) t += static_cast<double>(l + 1) * (u[l] - v[l]);
  return t;
}

Perturbation perturb_to_generic(const MatrixFrame& frame, double epsilon, std::uint64_t seed,
                                double genericity_tol, int max_attempts) {
  const Index d = frame.dim();
  const std::size_t n = frame.size();
  if (!(epsilon >= 0.0) || epsilon >= kPaulsenEpsilonLimit)
    throw PreconditionError("perturbation needs 0 <= epsilon < 0.3 (got " +
                            std::to_string(epsilon) + ")");
  if (n <= static_cast<std::size_t>(d))
    throw PreconditionError("perturbation needs n > d (n = " + std::to_string(n) +
                            ", d = " + std::to_string(d) + ")");

  const double dn = static_cast<double>(d) / static_cast<double>(n);
  std::vector<Matrix> normalized;
  normalized.reserve(n);
  Index widest = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = frame.block(i).norm();
    if (norm == 0.0) throw PreconditionError("block " + std::to_string(i + 1) + " is zero");
    normalized.emplace_back(std::sqrt(dn) * frame.block(i) / norm);
    widest = std::max(widest, frame.block_cols(i));
  }

  MatrixFrame base(d, normalized);
  if (is_generic(base, genericity_tol)) {
    std::vector<Matrix> zeros;
    for (const Matrix& x : normalized) zeros.push_back(Matrix::Zero(x.rows(), x.cols()));
    return {std::move(base), std::move(zeros), 0.0, 0.0, 0};
  }
  if (epsilon == 0.0)
    throw PerturbationError("normalized frame is not generic and epsilon = 0 leaves no room "
                            "for a perturbation");

  const double norm_cap = epsilon / (2.0 * static_cast<double>(n));
  const double gamma_cap = std::min(1.0, epsilon);
  // Entries in [-delta, delta] keep ||H_i||_F <= epsilon / (4n).
  double delta = std::min(1.0, epsilon) /
                 (4.0 * static_cast<double>(n) * std::sqrt(static_cast<double>(d * widest)));

  std::mt19937_64 rng(seed);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::uniform_real_distribution<double> noise(-delta, delta);
    std::vector<Matrix> offsets;
    offsets.reserve(n);
    double gamma = 0.0;
    bool within_caps = true;
    for (const Matrix& x : normalized) {
      Matrix h(x.rows(), x.cols());
      for (Index c = 0; c < h.cols(); ++c)
        for (Index r = 0; r < h.rows(); ++r) h(r, c) = noise(rng);
      const double hn = h.norm();
      if (hn > norm_cap) within_caps = false;
      gamma = std::max(gamma, (hn * hn + 2.0 * hn) / dn);
      offsets.push_back(std::move(h));
    }
    if (!within_caps || gamma > gamma_cap) {
      delta *= 0.5;
      continue;
    }
    std::vector<Matrix> blocks;
    blocks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) blocks.emplace_back(normalized[i] + offsets[i]);
    MatrixFrame g(d, std::move(blocks));
    // A non-generic draw is redrawn at the same magnitude: shrinking the noise
    // only makes the minors smaller.
    if (is_generic(g, genericity_tol))
      return {std::move(g), std::move(offsets), gamma, delta, attempt};
  }
  throw PerturbationError("no generic perturbation found in " + std::to_string(max_attempts) +
                          " attempts (last magnitude " + std::to_string(delta) + ")");
}

namespace {

// Each right singular vector gets its largest-magnitude entry positive; the
// matching left vector is flipped with it so that A = U M V^T is preserved.
void fix_signs(Matrix& u, Matrix& v) {
  for (Index k = 0; k < v.cols(); ++k) {
    Index arg = 0;
    v.col(k).cwiseAbs().maxCoeff(&arg);
    if (v(arg, k) < 0.0) {
      v.col(k) *= -1.0;
      u.col(k) *= -1.0;
    }
  }
}

Vector row_energy(const Matrix& x) { return x.rowwise().squaredNorm(); }

}  // namespace

PaulsenReport paulsen_round(const MatrixFrame& frame, const PaulsenConfig& config,
                            std::uint64_t seed) {
  const Index d = frame.dim();
  const std::size_t n = frame.size();
  if (n <= static_cast<std::size_t>(d))
    throw PreconditionError("Paulsen rounding needs n > d (n = " + std::to_string(n) +
                            ", d = " + std::to_string(d) + ")");
  const NearnessReport near = nearness(frame);
  const double eps = near.epsilon;
  if (eps >= kPaulsenEpsilonLimit)
    throw PreconditionError("input is only " + std::to_string(eps) +
                            "-nearly an equal-norm PMF; need epsilon < 0.3");

  Perturbation pert = perturb_to_generic(frame, eps, seed, config.genericity_tol,
                                         config.max_perturbation_attempts);
  const FrameDatum datum(pert.frame, WeightVector::Uniform(n, d, static_cast<long long>(n)));
  SolveResult solve = minimize(datum, config.solver);
  if (solve.status != SolveStatus::kConverged)
    throw ConvergenceError("radial isotropy solve did not converge (status " +
                               std::string(to_string(solve.status)) + ", gradient norm " +
                               std::to_string(solve.grad_norm) + ")",
                           std::move(solve));

  Eigen::JacobiSVD<Matrix> svd(solve.transformer, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix u = svd.matrixU();
  Matrix v = svd.matrixV();
  const Vector sv = svd.singularValues();
  fix_signs(u, v);

  const Matrix vt = v.transpose();
  MatrixFrame rotated_input = apply_transform(vt, frame);
  MatrixFrame rotated_perturbed = apply_transform(vt, pert.frame);

  const double dn = static_cast<double>(d) / static_cast<double>(n);
  std::vector<Matrix> helper_blocks, induced_blocks;
  std::vector<Vector> a, b;
  bool majorized = true;
  bool gamma_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix& y = rotated_perturbed.block(i);
    const Matrix my = sv.asDiagonal() * y;
    const Matrix direction = my / my.norm();
    helper_blocks.emplace_back(y.norm() * direction);
    induced_blocks.emplace_back(std::sqrt(dn) * direction);

    a.push_back(row_energy(helper_blocks.back()));
    b.push_back(row_energy(y));
    const double scale = std::max(1.0, b.back().sum());
    majorized = majorized && majorizes({a.back().data(), static_cast<std::size_t>(d)},
                                       {b.back().data(), static_cast<std::size_t>(d)},
                                       1e-12 * scale);

    const double y2 = y.squaredNorm();
    const double slack = 1e-12 * dn;
    gamma_ok = gamma_ok && y2 >= (1.0 - pert.gamma) * dn - slack &&
               y2 <= (1.0 + pert.gamma) * dn + slack;
  }
  MatrixFrame helper(d, std::move(helper_blocks));
  MatrixFrame induced(d, std::move(induced_blocks));
  MatrixFrame output = apply_transform(v, induced);

  const double out_tol = config.output_tol(d);
  double pmf_residual =
      spectral_norm(frame_operator(output) - Matrix::Identity(d, d));
  for (const Matrix& w : output.blocks())
    pmf_residual = std::max(pmf_residual, std::abs(w.squaredNorm() - dn));
  const bool output_pmf = is_equal_norm_pmf(output, out_tol);

  const double dd = static_cast<double>(d) * static_cast<double>(d);
  const double dist_out = dist_squared(frame, output);
  const double bound = 26.0 * eps * dd;

  PaulsenReport r{
      .input_nearness = near,
      .input_epsilon = eps,
      .gamma = pert.gamma,
      .perturbation_attempts = pert.attempts,
      .perturbed = pert.frame,
      .solve = std::move(solve),
      .rotation_u = u,
      .singular_values = sv,
      .rotation_v = v,
      .rotated_input = rotated_input,
      .rotated_perturbed = rotated_perturbed,
      .helper = helper,
      .induced = induced,
      .output = output,
      .helper_row_energy = std::move(a),
      .perturbed_row_energy = std::move(b),
      .majorization_holds = majorized,
      .gamma_condition_holds = gamma_ok,
      .dist_input_perturbed = dist_squared(frame, pert.frame),
      .dist_rotated_helper = dist_squared(rotated_perturbed, helper),
      .dist_helper_induced = dist_squared(helper, induced),
      .dist_rotated_induced = dist_squared(rotated_perturbed, induced),
      .dist_rotated_input_induced = dist_squared(rotated_input, induced),
      .dist_input_output = dist_out,
      .perturbation_bound = eps * static_cast<double>(d),
      .perturbed_nearness = nearness(pert.frame).epsilon,
      .intermediate_bound = 8.0 * eps * dd + 4.0 * pert.gamma * dd,
      .bound = bound,
      .output_tol = out_tol,
      .output_pmf_residual = pmf_residual,
      .output_is_equal_norm_pmf = output_pmf,
      .certified = output_pmf && dist_out <= bound,
  };
  return r;
}

}  // namespace matframe
