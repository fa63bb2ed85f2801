#pragma once

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

#include "twolevel/assembly.hpp"
#include "twolevel/error.hpp"

namespace twolevel {

/// A smooth exact solution with everything needed to manufacture f.
struct ManufacturedSolution {
  ScalarField u;
  VectorField grad;
  MatrixField hessian;
};

/// u = sin(pi x) sin(pi y).
inline ManufacturedSolution sine_solution() {
  constexpr double pi = std::numbers::pi;
  return {
      [](Point2 p) { return std::sin(pi * p.x) * std::sin(pi * p.y); },
      [](Point2 p) {
        return Eigen::Vector2d(pi * std::cos(pi * p.x) * std::sin(pi * p.y),
                               pi * std::sin(pi * p.x) * std::cos(pi * p.y));
      },
      [](Point2 p) {
        const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
        const double cx = std::cos(pi * p.x), cy = std::cos(pi * p.y);
        Eigen::Matrix2d h;
        h << -pi * pi * sx * sy, pi * pi * cx * cy, pi * pi * cx * cy, -pi * pi * sx * sy;
        return h;
      },
  };
}

/// u = x (1 - x)^2 y (1 - y)^2, a polynomial of total degree 6.
inline ManufacturedSolution polynomial_solution() {
  // q(t) = t (1 - t)^2 = t - 2t^2 + t^3
  static constexpr auto q = [](double t) { return t * (1.0 - t) * (1.0 - t); };
  static constexpr auto dq = [](double t) { return 1.0 - 4.0 * t + 3.0 * t * t; };
  static constexpr auto ddq = [](double t) { return 6.0 * t - 4.0; };
  return {
      [](Point2 p) { return q(p.x) * q(p.y); },
      [](Point2 p) { return Eigen::Vector2d(dq(p.x) * q(p.y), q(p.x) * dq(p.y)); },
      [](Point2 p) {
        Eigen::Matrix2d h;
        h << ddq(p.x) * q(p.y), dq(p.x) * dq(p.y), dq(p.x) * dq(p.y), q(p.x) * ddq(p.y);
        return h;
      },
  };
}

/**
 * Problem with constant coefficients whose source is obtained by substituting
 * `sol` into -div(alpha grad u) + beta . grad u + gamma u.
 */
inline ProblemSpec manufactured_problem(const ManufacturedSolution& sol, const Eigen::Matrix2d& alpha,
                                        const Eigen::Vector2d& beta, double gamma) {
  ProblemSpec spec;
  spec.alpha = [alpha](Point2) { return alpha; };
  spec.beta = [beta](Point2) { return beta; };
  spec.gamma = [gamma](Point2) { return gamma; };
  spec.f = [sol, alpha, beta, gamma](Point2 p) {
    const Eigen::Matrix2d h = sol.hessian(p);
    const double div_flux = alpha.cwiseProduct(h).sum();
    return -div_flux + beta.dot(sol.grad(p)) + gamma * sol.u(p);
  };
  spec.exact_u = sol.u;
  spec.exact_grad_u = sol.grad;
  return spec;
}

/// alpha = 1, beta = 0, gamma = -10, u = sin(pi x) sin(pi y), f = (2 pi^2 - 10) u.
inline ProblemSpec example1() {
  constexpr double pi = std::numbers::pi;
  const ManufacturedSolution sol = sine_solution();
  ProblemSpec spec = manufactured_problem(sol, Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), -10.0);
  spec.f = [u = sol.u](Point2 p) { return (2.0 * pi * pi - 10.0) * u(p); };
  return spec;
}

/// alpha = 1, beta = 0, gamma = -10, u = x (1-x)^2 y (1-y)^2.
inline ProblemSpec example2() {
  ProblemSpec spec =
      manufactured_problem(polynomial_solution(), Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), -10.0);
  // closed form of -Laplace(u) - 10 u
  spec.f = [](Point2 p) {
    const double qx = p.x * (1.0 - p.x) * (1.0 - p.x);
    const double qy = p.y * (1.0 - p.y) * (1.0 - p.y);
    return -(6.0 * p.x - 4.0) * qy - qx * (6.0 * p.y - 4.0) - 10.0 * qx * qy;
  };
  return spec;
}

/**
 * Reads a constant-coefficient problem from JSON:
 *   {"alpha": 1.0 | [[a11, a12], [a21, a22]], "beta": [b1, b2], "gamma": g,
 *    "exact": "sine" | "polynomial"}
 * The source term is manufactured from the named exact solution.
 */
inline ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open problem file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("problem file '" + path + "': " + e.what());
  }
  try {
    Eigen::Matrix2d alpha = Eigen::Matrix2d::Identity();
    if (j.contains("alpha")) {
      const auto& a = j.at("alpha");
      if (a.is_number()) {
        alpha *= a.get<double>();
      } else {
        alpha << a.at(0).at(0).get<double>(), a.at(0).at(1).get<double>(), a.at(1).at(0).get<double>(),
            a.at(1).at(1).get<double>();
      }
    }
    Eigen::Vector2d beta = Eigen::Vector2d::Zero();
    if (j.contains("beta")) beta << j.at("beta").at(0).get<double>(), j.at("beta").at(1).get<double>();
    const double gamma = j.value("gamma", 0.0);
    const std::string exact = j.value("exact", std::string("sine"));
    ManufacturedSolution sol;
    if (exact == "sine") {
      sol = sine_solution();
    } else if (exact == "polynomial") {
      sol = polynomial_solution();
    } else {
      throw ConfigError("problem file '" + path + "': unknown exact solution '" + exact + "'");
    }
    ProblemSpec spec = manufactured_problem(sol, alpha, beta, gamma);
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(0.5 * (alpha + alpha.transpose())).eigenvalues();
    if (!(ev.minCoeff() > 0.0)) throw ConfigError("problem file '" + path + "': alpha is not elliptic");
    spec.check_ellipticity(ev.minCoeff(), ev.maxCoeff());
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("problem file '" + path + "': " + e.what());
  }
}

}  // namespace twolevel
