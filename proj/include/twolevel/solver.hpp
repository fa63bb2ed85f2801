#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include "twolevel/error.hpp"
#include "twolevel/space.hpp"

namespace twolevel {

enum class SolveMethod { direct, cg, gmres };

inline const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::direct: return "direct";
    case SolveMethod::cg: return "cg";
    case SolveMethod::gmres: return "gmres";
  }
  return "?";
}

struct SolverOptions {
  bool iterative = false;  // cg for SPD systems, restarted gmres otherwise
  double tolerance = 1e-12;
  int max_iterations = 50000;
  int gmres_restart = 100;
  int refinement_steps = 3;  // iterative refinement sweeps after a direct solve
  double backward_error_floor = 1e-14;
};

struct SolveReport {
  SolveMethod method = SolveMethod::direct;
  int iterations = 0;
  double relative_residual = 0.0;
  /// ||b - Ax||_inf / (||A||_inf ||x||_inf + ||b||_inf)
  double backward_error = 0.0;
  double factor_time_s = 0.0;
  double solve_time_s = 0.0;
};

class SolveFailure : public Error {
 public:
  SolveFailure(const std::string& what, SolveReport report) : Error(what), report_(report) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

namespace detail {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline double relative_residual(const ColMatrix& a, const Vector& x, const Vector& b) {
  const double nb = b.norm();
  return nb == 0.0 ? (a * x).norm() : (b - a * x).norm() / nb;
}

inline double inf_norm(const ColMatrix& a) {
  Vector row_sums = Vector::Zero(a.rows());
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    for (ColMatrix::InnerIterator it(a, c); it; ++it) row_sums[it.row()] += std::abs(it.value());
  }
  return row_sums.size() == 0 ? 0.0 : row_sums.maxCoeff();
}

inline double backward_error(const ColMatrix& a, double a_norm, const Vector& x, const Vector& b) {
  const double denom = a_norm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
  return denom == 0.0 ? 0.0 : (b - a * x).lpNorm<Eigen::Infinity>() / denom;
}

/**
 * Factor-once, solve-many wrapper shared by the SPD and general solvers.
 * `Direct` is an Eigen direct factorization, `Iterative` an Eigen Krylov solver.
 */
template <class Direct, class Iterative, SolveMethod kIterativeMethod>
class FactoredSolver {
 public:
  FactoredSolver(const SparseMatrix& matrix, SolverOptions options, const char* kind)
      : a_(matrix), options_(options), kind_(kind) {
    if (a_.rows() != a_.cols()) throw Error(std::string(kind_) + " solve needs a square matrix");
    const auto t0 = std::chrono::steady_clock::now();
    if (a_.rows() == 0) return;
    if (options_.iterative) {
      iterative_ = std::make_unique<Iterative>();
      iterative_->setTolerance(options_.tolerance);
      iterative_->setMaxIterations(options_.max_iterations);
      configure(*iterative_);
      iterative_->compute(a_);
      if (iterative_->info() != Eigen::Success) {
        throw SolveFailure(std::string(kind_) + ": preconditioner setup failed", base_report());
      }
    } else {
      direct_ = std::make_unique<Direct>();
      direct_->analyzePattern(a_);
      direct_->factorize(a_);
      if (direct_->info() != Eigen::Success) {
        throw SolveFailure(std::string(kind_) + ": factorization failed (matrix singular or not " +
                               (std::string(kind_) == "spd" ? "positive definite)" : "invertible)"),
                           base_report());
      }
    }
    factor_time_ = seconds_since(t0);
    a_norm_ = inf_norm(a_);
  }

  std::pair<Vector, SolveReport> solve(const Vector& b) const {
    if (b.size() != a_.rows()) throw Error(std::string(kind_) + " solve: right-hand side size mismatch");
    SolveReport report = base_report();
    report.factor_time_s = factor_time_;
    if (b.size() == 0 || b.squaredNorm() == 0.0) return {Vector::Zero(b.size()), report};

    const auto t0 = std::chrono::steady_clock::now();
    Vector x;
    if (iterative_) {
      x = iterative_->solve(b);
      report.iterations = static_cast<int>(iterative_->iterations());
      if (iterative_->info() != Eigen::Success) {
        report.relative_residual = relative_residual(a_, x, b);
        report.solve_time_s = seconds_since(t0);
        throw SolveFailure(std::string(kind_) + ": " + to_string(report.method) +
                               " did not converge within the iteration cap",
                           report);
      }
    } else {
      x = direct_->solve(b);
      for (int step = 0; step < options_.refinement_steps; ++step) {
        if (relative_residual(a_, x, b) <= options_.tolerance) break;
        x += direct_->solve(Vector(b - a_ * x));
      }
    }
    report.relative_residual = relative_residual(a_, x, b);
    report.backward_error = backward_error(a_, a_norm_, x, b);
    report.solve_time_s = seconds_since(t0);
    if (!accepted(report)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", report.relative_residual);
      throw SolveFailure(std::string(kind_) + ": relative residual " + buf + " above tolerance",
                         report);
    }
    return {std::move(x), report};
  }

  const SolverOptions& options() const { return options_; }

  /// A solve passes when the relative residual meets the tolerance, or when the
  /// residual is already at the rounding floor of the factorization (normwise
  /// backward error below `backward_error_floor`).
  bool accepted(const SolveReport& r) const {
    if (!std::isfinite(r.relative_residual)) return false;
    return r.relative_residual <= options_.tolerance || r.backward_error <= options_.backward_error_floor;
  }

 private:
  SolveReport base_report() const {
    SolveReport r;
    r.method = options_.iterative ? kIterativeMethod : SolveMethod::direct;
    return r;
  }

  template <class S>
  void configure(S& s) {
    if constexpr (requires { s.set_restart(1); }) s.set_restart(options_.gmres_restart);
  }

  ColMatrix a_;
  SolverOptions options_;
  const char* kind_;
  std::unique_ptr<Direct> direct_;
  std::unique_ptr<Iterative> iterative_;
  double factor_time_ = 0.0;
  double a_norm_ = 0.0;
};

}  // namespace detail

/// SPD systems: sparse Cholesky (AMD ordering) or preconditioned conjugate gradients.
class SpdSolver
    : public detail::FactoredSolver<
          Eigen::SimplicialLLT<detail::ColMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>,
          Eigen::ConjugateGradient<detail::ColMatrix, Eigen::Lower | Eigen::Upper,
                                   Eigen::IncompleteCholesky<double>>,
          SolveMethod::cg> {
 public:
  explicit SpdSolver(const SparseMatrix& a, SolverOptions options = {})
      : FactoredSolver(a, options, "spd") {}
};

/// Nonsymmetric or indefinite systems: sparse LU (COLAMD ordering) or restarted GMRES.
class GeneralSolver
    : public detail::FactoredSolver<Eigen::SparseLU<detail::ColMatrix, Eigen::COLAMDOrdering<int>>,
                                    Eigen::GMRES<detail::ColMatrix, Eigen::IncompleteLUT<double>>,
                                    SolveMethod::gmres> {
 public:
  explicit GeneralSolver(const SparseMatrix& k, SolverOptions options = {})
      : FactoredSolver(k, options, "general") {}
};

inline std::pair<Vector, SolveReport> solve_spd(const SparseMatrix& a, const Vector& b,
                                                SolverOptions options = {}) {
  return SpdSolver(a, options).solve(b);
}

inline std::pair<Vector, SolveReport> solve_general(const SparseMatrix& k, const Vector& b,
                                                    SolverOptions options = {}) {
  return GeneralSolver(k, options).solve(b);
}

}  // namespace twolevel
