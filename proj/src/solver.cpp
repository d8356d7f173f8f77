#include "matframe/solver.hpp"

#include <cmath>
#include <cstdio>

namespace matframe {
namespace {

MatrixFrame normalize_blocks(const MatrixFrame& frame) {
  std::vector<Matrix> blocks;
  blocks.reserve(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const double norm = frame.block(i).norm();
    if (norm == 0.0)
      throw PreconditionError("block " + std::to_string(i + 1) + " is zero; cannot pre-normalize");
    blocks.emplace_back(frame.block(i) / norm);
  }
  return MatrixFrame(frame.dim(), std::move(blocks));
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Fills everything but status/iterations from the iterate t on `frame`.
void describe_iterate(const MatrixFrame& frame, const Vector& c, const Vector& t,
                      SolveResult& out) {
  const ObjectiveState s = evaluate(frame, t);
  out.t_star = t;
  out.objective_value = s.phi - t.dot(c);
  out.grad_norm = (s.grad - c).norm();
  out.transformer = inverse_sqrt_spd(s.q);
  out.extremisers.resize(static_cast<Index>(frame.size()));
  for (std::size_t i = 0; i < frame.size(); ++i)
    out.extremisers(static_cast<Index>(i)) =
        1.0 / (out.transformer * frame.block(i)).squaredNorm();
}

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kUnboundedBelow: return "unbounded_below";
    case SolveStatus::kMaxIters: return "max_iters";
    case SolveStatus::kNotSemistable: return "not_semistable";
  }
  return "unknown";
}

std::string_view to_string(SolveMethod method) {
  return method == SolveMethod::kNewton ? "newton" : "gradient";
}

SolveMethod parse_method(std::string_view name) {
  if (name == "newton") return SolveMethod::kNewton;
  if (name == "gradient") return SolveMethod::kGradient;
  throw PreconditionError("unknown solver method \"" + std::string(name) +
                          "\" (expected newton or gradient)");
}

double SolverConfig::effective_grad_tol(Index d) const {
  return grad_tol > 0.0 ? grad_tol : 1e-9 * static_cast<double>(d);
}

SolveResult minimize(const FrameDatum& datum, const SolverConfig& config) {
  const MatrixFrame& frame = datum.frame;
  if (datum.weights.sum() != Rational(frame.dim()))
    throw PreconditionError("weights must sum to d = " + std::to_string(frame.dim()) +
                            " (they sum to " + datum.weights.sum().str() + ")");
  if (!is_matrix_frame(frame, config.rank_tol))
    throw PreconditionError("frame operator is not positive definite; not a matrix frame");

  SolveResult result;
  if (config.polytope_precheck) {
    result.polytope = in_orbit_polytope(datum, config.rank_tol);
    if (!result.polytope->member) {
      result.status = SolveStatus::kNotSemistable;
      result.objective_value = -std::numeric_limits<double>::infinity();
      result.diagnostic = "weights lie outside the orbit polytope";
      if (!result.polytope->violating_subsets.empty())
        result.diagnostic += "; first violated subset " +
                             to_string(result.polytope->violating_subsets.front());
      return result;
    }
  }

  const MatrixFrame work = config.pre_normalize ? normalize_blocks(frame) : frame;
  const Vector c = datum.weights.to_vector();
  const double tol = config.effective_grad_tol(frame.dim());

  const bool newton = config.method == SolveMethod::kNewton;
  Vector t = Vector::Zero(static_cast<Index>(frame.size()));
  ObjectiveState state = evaluate(work, t, newton);
  double f = state.phi;
  if (config.record_trace) result.trace.push_back(f);

  auto finish = [&](SolveStatus status, std::size_t iters, std::string why) {
    result.status = status;
    result.iterations = iters;
    result.diagnostic = std::move(why);
    Vector t_out = t;
    if (config.pre_normalize) {
      for (std::size_t i = 0; i < frame.size(); ++i)
        t_out(static_cast<Index>(i)) -= 2.0 * std::log(frame.block(i).norm());
      t_out = recenter(t_out, c);
    }
    describe_iterate(frame, c, t_out, result);
    return result;
  };

  std::size_t stalled = 0;
  const auto n = static_cast<Index>(frame.size());
  const Matrix ones = Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  for (std::size_t iter = 0;; ++iter) {
    const Vector g = state.grad - c;
    const double gnorm = g.norm();
    if (gnorm <= tol) {
      // A vanishing gradient along an escaping sequence is not a minimizer.
      if (result.polytope && result.polytope->member)
        if (auto s = unsplit_tight_subset(*result.polytope, frame.size()))
          return finish(SolveStatus::kMaxIters, iter,
                        "gradient norm " + sci(gnorm) + " is below tolerance, but c is on the "
                        "boundary of the orbit polytope: tight subset " + to_string(*s) +
                        " has no tight complement, so the infimum is not attained");
      return finish(SolveStatus::kConverged, iter, "");
    }
    if (iter >= config.max_iters)
      return finish(SolveStatus::kMaxIters, iter,
                    "gradient norm " + sci(gnorm) + " above tolerance");

    Vector p = -g;
    if (newton) {
      // The all-ones kernel of H is filled in by a rank-one term; g is
      // orthogonal to it because sum grad = d = sum c.
      const Eigen::LDLT<Matrix> ldlt(state.hessian + ones);
      if (ldlt.info() == Eigen::Success) {
        const Vector candidate = ldlt.solve(-g);
        if (candidate.allFinite() && candidate.dot(g) < -1e-12 * gnorm * candidate.norm())
          p = candidate;
      }
    }
    // A single huge Newton step can land deep in an ill-conditioned region and
    // trip the escape tests, so the displacement is capped.
    if (const double len = p.cwiseAbs().maxCoeff(); len > config.max_step) p *= config.max_step / len;
    const double slope = g.dot(p);

    // Armijo decreases below this are not resolvable in double precision.
    // Such steps are judged by the gradient norm instead, provided the
    // objective rises by no more than a roundoff allowance.
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                         (1.0 + std::abs(state.phi) + std::abs(t.dot(c)));
    double step = config.initial_step;
    bool accepted = false;
    Vector trial_t;
    ObjectiveState trial;
    double f_trial = 0.0;
    for (int b = 0; b < config.max_backtracks; ++b, step *= config.shrink) {
      trial_t = recenter(t + step * p, c);
      try {
        trial = evaluate(work, trial_t, newton);
      } catch (const DomainError&) {
        continue;  // crossed the PD boundary; a shorter step may not
      }
      f_trial = trial.phi - trial_t.dot(c);
      const double wanted = -config.armijo * step * slope;
      if (f_trial <= f - wanted) {
        accepted = true;
        break;
      }
      if (wanted < noise && f_trial <= f + 64.0 * noise && (trial.grad - c).norm() < gnorm) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      return finish(SolveStatus::kMaxIters, iter + 1,
                    "line search stalled at gradient norm " + sci(gnorm));

    stalled = f_trial <= f - noise ? 0 : stalled + 1;
    if (stalled >= config.stall_limit) {
      std::string why = "no progress above roundoff for " + std::to_string(stalled) +
                        " steps at gradient norm " + sci(gnorm);
      if (result.polytope && result.polytope->member)
        if (auto s = unsplit_tight_subset(*result.polytope, frame.size()))
          why += "; c is on the boundary of the orbit polytope (tight subset " + to_string(*s) +
                 " has no tight complement)";
      return finish(SolveStatus::kMaxIters, iter + 1, std::move(why));
    }
    t = trial_t;
    state = std::move(trial);
    f = f_trial;
    if (config.record_trace) result.trace.push_back(f);
    const char* escape = nullptr;
    if (f < config.unbounded_floor)
      escape = "objective fell below the floor";
    else if (t.cwiseAbs().maxCoeff() > config.divergence_bound)
      escape = "||t||_inf exceeded the divergence bound";
    else if (state.inverse_condition < config.boundary_ratio)
      escape = "Q(t) is approaching the boundary of the positive-definite cone";
    if (escape) {
      // A certified polytope member has a finite infimum, so escaping iterates
      // mean it is not attained: c sits on the boundary of the polytope.
      if (result.polytope && result.polytope->member)
        return finish(SolveStatus::kMaxIters, iter + 1,
                      std::string(escape) + "; c lies in the orbit polytope, so the infimum is "
                      "finite but not attained (boundary of the polytope)");
      const double g_escape = (state.grad - c).norm();
      if (f >= config.unbounded_floor && g_escape < config.escape_grad_floor)
        return finish(SolveStatus::kMaxIters, iter + 1,
                      std::string(escape) + " with gradient norm " + sci(g_escape) +
                          "; a vanishing gradient means c is on the boundary of the orbit "
                          "polytope, not outside it");
      return finish(SolveStatus::kUnboundedBelow, iter + 1, escape);
    }
  }
}

Vector variety_residual(const FrameDatum& datum, const Vector& t, std::size_t size_guard) {
  return grad_phi_cauchy_binet(datum.frame, t, size_guard) - datum.weights.to_vector();
}

MatrixFrame transform_to_rif(const FrameDatum& datum, const SolveResult& result) {
  if (result.status != SolveStatus::kConverged)
    throw PreconditionError("transform_to_rif needs a converged solve (status " +
                            std::string(to_string(result.status)) + ")");
  return apply_transform(result.transformer, datum.frame);
}

}  // namespace matframe
