#include "matframe/cli.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <optional>

#include <CLI11.hpp>

#include "matframe/generate.hpp"
#include "matframe/io.hpp"
#include "matframe/objective.hpp"
#include "matframe/paulsen.hpp"
#include "matframe/polytope.hpp"
#include "matframe/quiver.hpp"
#include "matframe/solver.hpp"

namespace matframe::cli {
namespace {

using io::Json;

struct Flags {
  std::string input;
  double tol = kDefaultTol;
  double grad_tol = 0.0;
  std::size_t max_iters = 100'000;
  double unbounded_floor = -1e6;
  bool pre_normalize = false;
  std::string method = "newton";
  std::uint64_t seed = 0;
  std::string out_path;
  bool human = false;
  std::size_t size_guard = kDefaultSizeGuard;

  // gen
  Index d = 2;
  std::size_t n = 4;
  Index cols = 1;
  std::string kind = "gaussian";
  double epsilon = 0.1;
  std::string weights = "uniform";
};

// Exit code 2: the input or a documented precondition is at fault.
struct InputFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SolverConfig solver_config(const Flags& f) {
  SolverConfig c;
  c.grad_tol = f.grad_tol;
  c.max_iters = f.max_iters;
  c.unbounded_floor = f.unbounded_floor;
  c.pre_normalize = f.pre_normalize;
  c.rank_tol = f.tol;
  try {
    c.method = parse_method(f.method);
  } catch (const PreconditionError& e) {
    throw InputFailure(e.what());
  }
  return c;
}

Json header(const std::string& command, const Flags& f) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  Json flags;
  flags["input"] = f.input;
  flags["tol"] = io::real_to_json(f.tol, f.human);
  flags["grad_tol"] = io::real_to_json(f.grad_tol, f.human);
  flags["max_iters"] = f.max_iters;
  flags["unbounded_floor"] = io::real_to_json(f.unbounded_floor, f.human);
  flags["pre_normalize"] = f.pre_normalize;
  flags["method"] = f.method;
  flags["seed"] = f.seed;
  flags["out"] = f.out_path;
  flags["human"] = f.human;
  flags["size_guard"] = f.size_guard;
  if (command == "gen") {
    flags["d"] = f.d;
    flags["n"] = f.n;
    flags["cols"] = f.cols;
    flags["kind"] = f.kind;
    flags["epsilon"] = io::real_to_json(f.epsilon, f.human);
    flags["weights"] = f.weights;
  }
  j["flags"] = std::move(flags);
  return j;
}

io::FrameFile load(const Flags& f) {
  try {
    return io::read_frame_file(f.input);
  } catch (const io::SchemaError& e) {
    throw InputFailure(e.what());
  } catch (const DimensionError& e) {
    throw InputFailure(e.what());
  } catch (const PreconditionError& e) {
    throw InputFailure(e.what());
  }
}

Json polytope_json(const PolytopeReport& p) {
  Json j;
  j["member"] = p.member;
  j["sum_check"] = p.sum_check;
  Json tight = Json::array(), bad = Json::array();
  for (const Subset& s : p.tight_subsets) tight.push_back(io::subset_to_json(s));
  for (const Subset& s : p.violating_subsets) bad.push_back(io::subset_to_json(s));
  j["tight_subsets"] = std::move(tight);
  j["violating_subsets"] = std::move(bad);
  return j;
}

Json nearness_json(const NearnessReport& r, bool human) {
  Json j;
  j["epsilon_operator"] = io::real_to_json(r.epsilon_operator, human);
  j["epsilon_norms"] = io::real_to_json(r.epsilon_norms, human);
  j["epsilon"] = io::real_to_json(r.epsilon, human);
  return j;
}

int cmd_check(const Flags& f, std::ostream& out) {
  const io::FrameFile file = load(f);
  const MatrixFrame& frame = file.frame;
  Json r = header("check", f);
  r["d"] = frame.dim();
  r["n"] = frame.size();
  r["N"] = frame.total_columns();
  r["mf"] = is_matrix_frame(frame, f.tol);
  if (frame.total_columns() >= frame.dim()) {
    try {
      r["generic"] = is_generic(frame, f.tol, f.size_guard);
    } catch (const SizeGuardError&) {
      r["generic"] = "skipped";
    }
  } else {
    r["generic"] = false;
  }
  const NearnessReport near = nearness(frame);
  r["epsilon"] = io::real_to_json(near.epsilon, f.human);
  r["nearness"] = nearness_json(near, f.human);
  r["equal_norm_pmf"] = is_equal_norm_pmf(frame, f.tol);
  if (file.weights) {
    const FrameDatum datum(frame, *file.weights);
    const PolytopeReport poly = in_orbit_polytope(datum, f.tol);
    r["pmf"] = is_pmf(datum, f.tol);
    r["polytope"] = poly.member;
    r["relint"] = in_relative_interior(datum, f.tol);
    r["polystable"] = tight_subsets_split(poly, frame.size());
    r["polytope_report"] = polytope_json(poly);
    bool has_zero = false;
    for (const Matrix& x : frame.blocks()) has_zero = has_zero || x.squaredNorm() == 0.0;
    r["rif"] = has_zero ? Json(nullptr) : Json(is_rif(datum, f.tol));
  } else {
    r["pmf"] = nullptr;
    r["polytope"] = nullptr;
    r["relint"] = nullptr;
    r["polystable"] = nullptr;
  }
  out << r.dump(2) << '\n';
  return kExitOk;
}

int cmd_solve_rif(const Flags& f, std::ostream& out) {
  const io::FrameFile file = load(f);
  if (!file.weights) throw InputFailure("solve-rif needs weights in the frame file");
  const FrameDatum datum(file.frame, *file.weights);
  const SolverConfig config = solver_config(f);

  SolveResult result;
  try {
    result = minimize(datum, config);
  } catch (const PreconditionError& e) {
    throw InputFailure(e.what());
  }

  Json r = header("solve-rif", f);
  r["status"] = std::string(to_string(result.status));
  r["iterations"] = result.iterations;
  if (!result.diagnostic.empty()) r["diagnostic"] = result.diagnostic;
  r["grad_tol"] = io::real_to_json(config.effective_grad_tol(datum.frame.dim()), f.human);
  if (result.polytope) r["polytope"] = polytope_json(*result.polytope);

  if (result.status == SolveStatus::kNotSemistable) {
    r["objective_value"] = io::real_to_json(result.objective_value, f.human);
    r["log_capacity"] = io::real_to_json(log_capacity(datum, result.objective_value), f.human);
    out << r.dump(2) << '\n';
    return kExitOk;
  }

  r["t_star"] = io::vector_to_json(result.t_star, f.human);
  r["transformer"] = io::matrix_to_json(result.transformer, f.human);
  r["grad_norm"] = io::real_to_json(result.grad_norm, f.human);
  r["objective_value"] = io::real_to_json(result.objective_value, f.human);
  r["extremisers"] = io::vector_to_json(result.extremisers, f.human);
  if (result.status == SolveStatus::kConverged) {
    r["log_capacity"] = io::real_to_json(log_capacity(datum, result.objective_value), f.human);
    const MatrixFrame rif = transform_to_rif(datum, result);
    r["rif_residual"] = io::real_to_json(rif_residual(FrameDatum(rif, datum.weights)), f.human);
    if (!f.out_path.empty()) io::write_frame_file(f.out_path, rif, datum.weights, f.human);
  }
  try {
    const Vector res = variety_residual(datum, result.t_star, f.size_guard);
    r["variety_residual_max"] = io::real_to_json(res.cwiseAbs().maxCoeff(), f.human);
  } catch (const SizeGuardError&) {
    r["variety_residual_max"] = "skipped";
  }
  out << r.dump(2) << '\n';
  return kExitOk;
}

int cmd_paulsen(const Flags& f, std::ostream& out) {
  const io::FrameFile file = load(f);
  PaulsenConfig config;
  config.solver = solver_config(f);
  config.genericity_tol = f.tol;

  std::optional<PaulsenReport> attempt;
  try {
    attempt = [&] {
      try {
        return paulsen_round(file.frame, config, f.seed);
      } catch (const PreconditionError& e) {
        throw InputFailure(e.what());
      } catch (const PerturbationError& e) {
        throw InputFailure(e.what());
      }
    }();
  } catch (const ConvergenceError& e) {
    // No certificate can be issued without a converged solve.
    Json r = header("paulsen", f);
    r["certified"] = false;
    r["error"] = e.what();
    r["solve_status"] = std::string(to_string(e.result().status));
    r["solve_diagnostic"] = e.result().diagnostic;
    out << r.dump(2) << '\n';
    return kExitCertificate;
  }
  const PaulsenReport& rep = *attempt;

  const bool h = f.human;
  const double d = static_cast<double>(file.frame.dim());
  Json r = header("paulsen", f);
  r["d"] = file.frame.dim();
  r["n"] = file.frame.size();
  r["input_epsilon"] = io::real_to_json(rep.input_epsilon, h);
  r["input_nearness"] = nearness_json(rep.input_nearness, h);
  r["gamma"] = io::real_to_json(rep.gamma, h);
  r["perturbation_attempts"] = rep.perturbation_attempts;
  Json solve;
  solve["status"] = std::string(to_string(rep.solve.status));
  solve["iterations"] = rep.solve.iterations;
  solve["grad_norm"] = io::real_to_json(rep.solve.grad_norm, h);
  solve["t_star"] = io::vector_to_json(rep.solve.t_star, h);
  r["solve"] = std::move(solve);
  r["rotation_u"] = io::matrix_to_json(rep.rotation_u, h);
  r["singular_values"] = io::vector_to_json(rep.singular_values, h);
  r["rotation_v"] = io::matrix_to_json(rep.rotation_v, h);

  Json dist;
  dist["input_perturbed"] = io::real_to_json(rep.dist_input_perturbed, h);
  dist["rotated_helper"] = io::real_to_json(rep.dist_rotated_helper, h);
  dist["helper_induced"] = io::real_to_json(rep.dist_helper_induced, h);
  dist["rotated_induced"] = io::real_to_json(rep.dist_rotated_induced, h);
  dist["rotated_input_induced"] = io::real_to_json(rep.dist_rotated_input_induced, h);
  dist["input_output"] = io::real_to_json(rep.dist_input_output, h);
  r["distances"] = std::move(dist);

  Json checks;
  checks["perturbation_bound"] = io::real_to_json(rep.perturbation_bound, h);
  checks["perturbation_ok"] = rep.dist_input_perturbed <= rep.perturbation_bound;
  checks["perturbed_nearness"] = io::real_to_json(rep.perturbed_nearness, h);
  checks["perturbed_nearness_ok"] = rep.perturbed_nearness <= 4.0 * rep.input_epsilon;
  checks["gamma_condition"] = rep.gamma_condition_holds;
  checks["majorization"] = rep.majorization_holds;
  checks["intermediate_bound"] = io::real_to_json(rep.intermediate_bound, h);
  checks["intermediate_ok"] = rep.dist_rotated_induced <= rep.intermediate_bound;
  r["checks"] = std::move(checks);

  r["output_pmf_residual"] = io::real_to_json(rep.output_pmf_residual, h);
  r["output_tol"] = io::real_to_json(rep.output_tol, h);
  r["output_is_equal_norm_pmf"] = rep.output_is_equal_norm_pmf;
  r["bound"] = io::real_to_json(rep.bound, h);
  r["ratio"] = io::real_to_json(
      rep.input_epsilon > 0.0 ? rep.dist_input_output / (rep.input_epsilon * d * d)
                              : std::numeric_limits<double>::quiet_NaN(),
      h);
  r["certified"] = rep.certified;
  if (!f.out_path.empty()) io::write_frame_file(f.out_path, rep.output, std::nullopt, h);
  out << r.dump(2) << '\n';
  return rep.certified ? kExitOk : kExitCertificate;
}

int cmd_minors(const Flags& f, std::ostream& out) {
  const io::FrameFile file = load(f);
  std::vector<MinorTerm> terms;
  try {
    terms = enumerate_minors(file.frame, f.tol, f.size_guard);
  } catch (const PreconditionError& e) {
    throw InputFailure(e.what());
  } catch (const SizeGuardError& e) {
    throw InputFailure(e.what());
  }
  Json r = header("minors", f);
  Json list = Json::array();
  for (const MinorTerm& t : terms) {
    Json e;
    e["support"] = io::subset_to_json(t.support);
    Json sets = Json::array();
    for (const auto& s : t.column_sets) {
      Json cols = Json::array();
      for (Index c : s) cols.push_back(c + 1);
      sets.push_back(std::move(cols));
    }
    e["column_sets"] = std::move(sets);
    e["minor"] = io::real_to_json(t.minor_value, f.human);
    e["negligible"] = t.negligible;
    list.push_back(std::move(e));
  }
  r["count"] = terms.size();
  r["terms"] = std::move(list);
  const Vector zero = Vector::Zero(static_cast<Index>(file.frame.size()));
  r["det_q_at_zero"] = io::real_to_json(det_q_cauchy_binet(file.frame, terms, zero), f.human);
  out << r.dump(2) << '\n';
  return kExitOk;
}

int cmd_gen(const Flags& f, std::ostream& out) {
  if (f.d < 1 || f.n < 1 || f.cols < 1) throw InputFailure("d, n and cols must be positive");
  Rng rng(f.seed);
  const std::vector<Index> widths(f.n, f.cols);
  std::optional<MatrixFrame> frame;
  double eps = std::numeric_limits<double>::quiet_NaN();
  try {
    if (f.kind == "gaussian") {
      frame = random_gaussian_frame(f.d, widths, rng);
    } else if (f.kind == "equal-norm-pmf") {
      frame = random_equal_norm_pmf(f.d, widths, rng);
    } else if (f.kind == "near-pmf") {
      NearPmf near = perturb_to_nearness(random_equal_norm_pmf(f.d, widths, rng), f.epsilon, rng);
      eps = near.epsilon;
      frame = std::move(near.frame);
    } else {
      throw InputFailure("unknown --kind " + f.kind);
    }
  } catch (const PreconditionError& e) {
    throw InputFailure(e.what());
  }

  std::optional<WeightVector> weights;
  if (f.weights == "uniform")
    weights = WeightVector::Uniform(f.n, f.d, static_cast<long long>(f.n));
  else if (f.weights != "none")
    throw InputFailure("unknown --weights " + f.weights);

  Json file = io::frame_to_json(*frame, weights, f.human);
  if (f.out_path.empty()) {
    out << file.dump(2) << '\n';
    return kExitOk;
  }
  io::write_frame_file(f.out_path, *frame, weights, f.human);
  Json r = header("gen", f);
  r["written"] = f.out_path;
  if (!std::isnan(eps)) r["epsilon"] = io::real_to_json(eps, f.human);
  out << r.dump(2) << '\n';
  return kExitOk;
}

void add_common(CLI::App* sub, Flags& f, bool needs_input) {
  if (needs_input) sub->add_option("input", f.input, "Frame file (JSON)")->required();
  sub->add_option("--tol", f.tol, "Rank / PD / predicate tolerance");
  sub->add_option("--size-guard", f.size_guard, "Maximum number of enumerated minors");
  sub->add_flag("--human", f.human, "Print reals as decimal numbers instead of hex-floats");
  sub->add_option("--out", f.out_path, "Output frame path");
}

void add_solver(CLI::App* sub, Flags& f) {
  sub->add_option("--grad-tol", f.grad_tol, "Gradient tolerance (default 1e-9*d)");
  sub->add_option("--max-iters", f.max_iters, "Iteration limit");
  sub->add_option("--unbounded-floor", f.unbounded_floor, "Divergence floor for the objective");
  sub->add_flag("--pre-normalize", f.pre_normalize, "Rescale blocks to unit norm before solving");
  sub->add_option("--method", f.method, "Search direction: newton (default) | gradient");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Radial isotropy and Paulsen rounding for matrix frames", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CLI::App* check = app.add_subcommand("check", "Evaluate frame predicates");
  add_common(check, f, true);

  CLI::App* solve = app.add_subcommand("solve-rif", "Put a weighted frame in radial isotropic position");
  add_common(solve, f, true);
  add_solver(solve, f);

  CLI::App* paulsen = app.add_subcommand("paulsen", "Round a nearly equal-norm PMF");
  add_common(paulsen, f, true);
  add_solver(paulsen, f);
  paulsen->add_option("--seed", f.seed, "Perturbation seed");

  CLI::App* minors = app.add_subcommand("minors", "Dump the Cauchy-Binet terms");
  add_common(minors, f, true);

  CLI::App* gen = app.add_subcommand("gen", "Generate a seeded random frame");
  add_common(gen, f, false);
  gen->add_option("--seed", f.seed, "Generator seed");
  gen->add_option("--d", f.d, "Ambient dimension");
  gen->add_option("--n", f.n, "Number of blocks");
  gen->add_option("--cols", f.cols, "Columns per block");
  gen->add_option("--kind", f.kind, "gaussian | equal-norm-pmf | near-pmf");
  gen->add_option("--epsilon", f.epsilon, "Target nearness for near-pmf");
  gen->add_option("--weights", f.weights, "uniform (d/n each) | none");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back(kToolName);
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*check) return cmd_check(f, out);
    if (*solve) return cmd_solve_rif(f, out);
    if (*paulsen) return cmd_paulsen(f, out);
    if (*minors) return cmd_minors(f, out);
    if (*gen) return cmd_gen(f, out);
  } catch (const InputFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace matframe::cli
