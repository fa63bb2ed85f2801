#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twolevel/assembly.hpp"
#include "twolevel/error.hpp"
#include "twolevel/solver.hpp"
#include "twolevel/space.hpp"

namespace twolevel {

/**
 * Parameters of the correction iteration. `fine_degree` is used by the
 * two-level variant (same mesh, higher degree), `fine_factor` by the two-grid
 * variant (same degree, mesh refined by that factor).
 */
struct TwoLevelConfig {
  int coarse_degree = 3;
  int fine_degree = 6;
  int fine_factor = 0;
  int iterations = 3;
  SolverOptions coarse_solver;
  SolverOptions fine_solver;
  /// Stop early once the relative fine residual drops below this value.
  std::optional<double> stop_tolerance;
};

inline void validate_two_level(const TwoLevelConfig& c) {
  if (c.coarse_degree < 1 || c.fine_degree > kMaxDegree) {
    throw ConfigError("degrees must lie in [1, 6]");
  }
  if (c.fine_degree < c.coarse_degree + 1) {
    throw ConfigError("two-level needs fine degree >= coarse degree + 1 (got l=" +
                      std::to_string(c.coarse_degree) + ", s=" + std::to_string(c.fine_degree) + ")");
  }
  if (c.iterations < 1) throw ConfigError("iteration count k must be >= 1");
}

inline void validate_two_grid(const TwoLevelConfig& c) {
  if (c.coarse_degree < 1 || c.coarse_degree > kMaxDegree) throw ConfigError("degree must lie in [1, 6]");
  if (c.fine_factor < 2) {
    throw ConfigError("two-grid needs a fine-mesh factor >= 2 (got " + std::to_string(c.fine_factor) + ")");
  }
  if (c.iterations < 1) throw ConfigError("iteration count k must be >= 1");
}

struct IterateState {
  Vector current;  // fine-space coefficients, all DOFs
  int iteration = 0;
  std::vector<double> residual_history;
};

struct IterationResult {
  Vector solution;
  /// iterates[k] is the fine-space iterate after k rounds; iterates[0] is zero.
  std::vector<Vector> iterates;
  std::vector<double> residual_history;
  SolveReport coarse_report;
  SolveReport fine_report;
};

/**
 * Two-space correction iteration shared by the two-grid and two-level
 * algorithms. Each round first solves the full (nonsymmetric/indefinite)
 * problem for a correction on the coarse space, then solves an SPD problem
 * with the stiffness form on the fine space, the remaining part N of the form
 * acting on the corrected iterate as data.
 *
 * The coarse operator is assembled directly on the coarse space; the coarse
 * right-hand side is P^T applied to the fine residual.
 */
class CorrectionScheme {
 public:
  CorrectionScheme(const ProblemSpec& spec, const FeSpace& coarse, const FeSpace& fine,
                   const TwoLevelConfig& config)
      : coarse_(&coarse), fine_(&fine), config_(config),
        quad_(default_assembly_quadrature(std::max(coarse.degree(), fine.degree()))),
        prolongation_(build_prolongation(coarse, fine)),
        fine_system_(assemble_system(fine, spec, quad_)),
        coarse_operator_(restrict_to_interior(coarse, SparseMatrix(assemble_stiffness(coarse, spec, quad_) +
                                                                   assemble_nonsym(coarse, spec, quad_)))),
        coarse_solver_(coarse_operator_, config.coarse_solver),
        fine_solver_(restrict_to_interior(fine, fine_system_.stiffness), config.fine_solver) {}

  /// Step 1: coarse e with (A_H + N_H) e = P^T (F - (A + N) u) on coarse interior DOFs.
  Vector coarse_correction(const Vector& u) {
    const Vector residual = fine_system_.load - fine_system_.apply_full(u);
    const Vector rhs = restrict_to_interior(*coarse_, prolongation_.apply_transpose(residual));
    auto [e, report] = coarse_solver_.solve(rhs);
    coarse_report_ = report;
    return expand_from_interior(*coarse_, e);
  }

  /// Step 2: fine u+ with A u+ = F - N (u + P e) on fine interior DOFs.
  Vector fine_update(const Vector& u, const Vector& e) {
    const Vector corrected = u + prolongation_.apply(e);
    const Vector rhs = restrict_to_interior(*fine_, Vector(fine_system_.load - fine_system_.nonsym * corrected));
    auto [x, report] = fine_solver_.solve(rhs);
    fine_report_ = report;
    return expand_from_interior(*fine_, x);
  }

  /// ||F - (A + N) u|| / ||F|| over the fine interior DOFs.
  double fine_residual(const Vector& u) const {
    const Vector r = restrict_to_interior(*fine_, Vector(fine_system_.load - fine_system_.apply_full(u)));
    const double nf = restrict_to_interior(*fine_, fine_system_.load).norm();
    return nf == 0.0 ? r.norm() : r.norm() / nf;
  }

  IterationResult run(int rounds) {
    IterateState state{Vector::Zero(fine_->num_dofs()), 0, {}};
    IterationResult result;
    result.iterates.push_back(state.current);
    while (state.iteration < rounds) {
      const Vector e = coarse_correction(state.current);
      state.current = fine_update(state.current, e);
      ++state.iteration;
      state.residual_history.push_back(fine_residual(state.current));
      result.iterates.push_back(state.current);
      if (config_.stop_tolerance && state.residual_history.back() <= *config_.stop_tolerance) break;
    }
    result.solution = state.current;
    result.residual_history = std::move(state.residual_history);
    result.coarse_report = coarse_report_;
    result.fine_report = fine_report_;
    return result;
  }

  IterationResult run() { return run(config_.iterations); }

  const Prolongation& prolongation() const { return prolongation_; }
  const AssembledSystem& fine_system() const { return fine_system_; }
  const SparseMatrix& coarse_operator() const { return coarse_operator_; }
  const FeSpace& coarse_space() const { return *coarse_; }
  const FeSpace& fine_space() const { return *fine_; }

 private:
  const FeSpace* coarse_;
  const FeSpace* fine_;
  TwoLevelConfig config_;
  QuadratureRule quad_;
  Prolongation prolongation_;
  AssembledSystem fine_system_;
  SparseMatrix coarse_operator_;
  GeneralSolver coarse_solver_;
  SpdSolver fine_solver_;
  SolveReport coarse_report_;
  SolveReport fine_report_;
};

/// Galerkin solution of the full problem on one space (boundary entries zero).
inline Vector galerkin_solve(const FeSpace& space, const ProblemSpec& spec, SolverOptions options = {}) {
  const ReducedSystem reduced = apply_dirichlet(assemble_system(space, spec));
  const SparseMatrix k = reduced.stiffness + reduced.nonsym;
  auto [x, report] = solve_general(k, reduced.load, options);
  return expand_from_interior(space, x);
}

/// Classical iterative two-grid method on nested meshes of the same degree.
inline IterationResult two_grid_iterate(const ProblemSpec& spec, const FeSpace& coarse, const FeSpace& fine,
                                        TwoLevelConfig config) {
  if (coarse.degree() != fine.degree()) throw IncompatibleSpaces("two-grid spaces must share the degree");
  const int mc = coarse.mesh().subdivisions();
  const int mf = fine.mesh().subdivisions();
  if (mf % mc != 0) throw IncompatibleSpaces("fine mesh is not a nested refinement of the coarse mesh");
  config.coarse_degree = coarse.degree();
  config.fine_factor = mf / mc;
  validate_two_grid(config);
  CorrectionScheme scheme(spec, coarse, fine, config);
  return scheme.run();
}

/// Iterative two-level method: one mesh, coarse degree l, fine degree s >= l + 1.
inline IterationResult two_level_iterate(const ProblemSpec& spec, const FeSpace& coarse, const FeSpace& fine,
                                         TwoLevelConfig config) {
  if (coarse.mesh().subdivisions() != fine.mesh().subdivisions()) {
    throw IncompatibleSpaces("two-level spaces must live on the same mesh");
  }
  config.coarse_degree = coarse.degree();
  config.fine_degree = fine.degree();
  validate_two_level(config);
  CorrectionScheme scheme(spec, coarse, fine, config);
  return scheme.run();
}

}  // namespace twolevel
