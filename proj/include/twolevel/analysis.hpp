#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twolevel/element.hpp"
#include "twolevel/error.hpp"
#include "twolevel/space.hpp"

namespace twolevel {

struct ErrorNorms {
  double l2_squared = 0.0;
  double seminorm_squared = 0.0;

  double l2() const { return std::sqrt(l2_squared); }
  double h1_seminorm() const { return std::sqrt(seminorm_squared); }
  double h1() const { return std::sqrt(l2_squared + seminorm_squared); }
};

/// Error quadrature: exact to degree 2l + 6.
inline QuadratureRule default_error_quadrature(int degree) { return build_quadrature(2 * degree + 6); }

/// Cellwise L2 and gradient-L2 parts of u_h - u.
inline ErrorNorms error_norms(const FeSpace& space, const Vector& coeffs, const ScalarField& exact_u,
                              const VectorField& exact_grad_u, const QuadratureRule& quad) {
  if (coeffs.size() != space.num_dofs()) throw Error("coefficient vector does not match the space");
  const Tabulation tab = tabulate(space.element(), quad);
  const auto nb = static_cast<Eigen::Index>(space.dofs_per_cell());
  Eigen::VectorXd local(nb);
  ErrorNorms out;
  for (int t = 0; t < space.num_cells(); ++t) {
    const CellGeometry g = cell_geometry(space.mesh(), t);
    const auto dofs = space.cell_dofs(t);
    for (Eigen::Index i = 0; i < nb; ++i) local[i] = coeffs[dofs[static_cast<std::size_t>(i)]];
    const Eigen::VectorXd uh = tab.values * local;
    const Eigen::VectorXd rx = tab.grad_x * local;
    const Eigen::VectorXd ry = tab.grad_y * local;
    const Eigen::Matrix2d jit = g.inverse.transpose();
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const auto qi = static_cast<Eigen::Index>(q);
      const Point2 x = g.map(quad.points[q]);
      const double w = quad.weights[q] * g.det;
      const Eigen::Vector2d grad_h = jit * Eigen::Vector2d(rx[qi], ry[qi]);
      const double du = uh[qi] - exact_u(x);
      const Eigen::Vector2d dg = grad_h - exact_grad_u(x);
      out.l2_squared += w * du * du;
      out.seminorm_squared += w * dg.squaredNorm();
    }
  }
  return out;
}

/// Full H1 norm of u_h - u: sqrt(||u_h - u||^2 + ||grad(u_h - u)||^2).
inline double h1_error(const FeSpace& space, const Vector& coeffs, const ScalarField& exact_u,
                       const VectorField& exact_grad_u, const QuadratureRule& quad) {
  return error_norms(space, coeffs, exact_u, exact_grad_u, quad).h1();
}

inline double h1_error(const FeSpace& space, const Vector& coeffs, const ScalarField& exact_u,
                       const VectorField& exact_grad_u) {
  return h1_error(space, coeffs, exact_u, exact_grad_u, default_error_quadrature(space.degree()));
}

/**
 * Full H1 norm of I u - u_h, where I u is the Lagrange interpolant of u in
 * the same space as u_h, i.e. the exact solution is first represented in
 * the discrete space and the comparison happens there.
 */
inline double interpolant_h1_error(const FeSpace& space, const Vector& coeffs, const ScalarField& exact_u,
                                   const QuadratureRule& quad) {
  const Vector diff = interpolate(space, exact_u) - coeffs;
  const ScalarField zero = [](Point2) { return 0.0; };
  const VectorField zero_grad = [](Point2) { return Eigen::Vector2d::Zero().eval(); };
  return error_norms(space, diff, zero, zero_grad, quad).h1();
}

inline double interpolant_h1_error(const FeSpace& space, const Vector& coeffs, const ScalarField& exact_u) {
  return interpolant_h1_error(space, coeffs, exact_u, build_quadrature(2 * space.degree()));
}

/// What the discrete solution is compared against.
enum class ErrorReference { exact, interpolant };

/// One line of a convergence table.
struct ExperimentRow {
  int M = 0;
  double H = 0.0;
  int l = 0;
  int s_or_r = 0;
  int k = 0;
  long long dofs_coarse = 0;
  long long dofs_fine = 0;
  double h1_error = 0.0;
  double scaled_error = 0.0;
  double cpu_seconds = 0.0;
  bool timed = true;
  bool failed = false;
  std::string failure;
};

/// h1_error * H^{-p}, i.e. h1_error * M^p.
inline double scaled_error(double h1_error, int M, int p) { return h1_error * std::pow(static_cast<double>(M), p); }

struct OrderEstimate {
  std::vector<double> pairwise;  // between consecutive retained rows
  double slope = 0.0;            // least squares slope of log e against log H
  std::vector<std::string> warnings;
};

inline OrderEstimate estimate_orders(const std::vector<double>& mesh_sizes, const std::vector<double>& errors) {
  if (mesh_sizes.size() != errors.size()) throw Error("estimate_orders: size mismatch");
  OrderEstimate est;
  std::vector<std::pair<double, double>> pts;  // (log H, log e)
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i])) {
      est.warnings.push_back("excluded non-positive error at H=" + std::to_string(mesh_sizes[i]));
      continue;
    }
    pts.emplace_back(std::log(mesh_sizes[i]), std::log(errors[i]));
  }
  if (pts.size() < 2) throw Error("estimate_orders needs at least two usable rows");
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].first == pts[i - 1].first) throw Error("estimate_orders needs distinct mesh sizes");
    est.pairwise.push_back((pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first));
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) mx += x, my += y;
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  est.slope = sxy / sxx;
  return est;
}

inline OrderEstimate estimate_orders(const std::vector<ExperimentRow>& rows) {
  std::vector<double> hs, es;
  for (const auto& r : rows) {
    if (r.failed) continue;
    hs.push_back(r.H);
    es.push_back(r.h1_error);
  }
  return estimate_orders(hs, es);
}

/// Wall-clock seconds spent in `procedure` (steady clock).
template <class F>
double time_run(F&& procedure) {
  const auto t0 = std::chrono::steady_clock::now();
  std::forward<F>(procedure)();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace twolevel
