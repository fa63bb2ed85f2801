#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twolevel/error.hpp"
#include "twolevel/mesh.hpp"

namespace twolevel {

inline constexpr int kMaxDegree = 6;

struct QuadratureRule {
  std::vector<Point2> points;
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on [0, 1] (nodes ascending).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int n) {
  if (n < 1) throw SizeError("Gauss-Legendre rule needs at least one point");
  std::vector<double> nodes(static_cast<std::size_t>(n));
  std::vector<double> weights(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const auto j = static_cast<std::size_t>(n - 1 - i);
    nodes[j] = 0.5 * (x + 1.0);
    weights[j] = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/((1-x^2)P'^2) scaled by 1/2
  }
  return {std::move(nodes), std::move(weights)};
}

/**
 * Quadrature on the reference triangle {x, y >= 0, x + y <= 1} obtained by
 * collapsing a tensor Gauss-Legendre rule on the unit square through
 * (u, v) -> (u (1 - v), v). With n points per axis the rule is exact for
 * total degree 2n - 2.
 */
inline QuadratureRule build_quadrature(int min_exact_degree) {
  if (min_exact_degree < 1) {
    throw SizeError("quadrature degree must be >= 1, got " + std::to_string(min_exact_degree));
  }
  const int n = (min_exact_degree + 3) / 2 + 1;  // ceil((d + 2) / 2) + 1
  const auto [nodes, weights] = gauss_legendre_unit(n);
  QuadratureRule rule;
  rule.exact_degree = 2 * n - 2;
  rule.points.reserve(static_cast<std::size_t>(n * n));
  rule.weights.reserve(static_cast<std::size_t>(n * n));
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double v = nodes[j];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double u = nodes[i];
      rule.points.push_back({u * (1.0 - v), v});
      rule.weights.push_back(weights[i] * weights[j] * (1.0 - v));
    }
  }
  return rule;
}

/// Values and reference gradients of every basis function at one point.
struct BasisEval {
  Eigen::VectorXd values;
  Eigen::MatrixX2d gradients;  // row i = grad of basis i
};

/**
 * Lagrange element of degree l on the reference triangle with equispaced
 * nodes (i/l, j/l), i + j <= l, ordered by j then i. Basis functions are
 * stored as coefficients in the monomial basis x^a y^b, a + b <= l, ordered
 * by total degree then by b.
 */
class ReferenceElement {
 public:
  explicit ReferenceElement(int degree);

  int degree() const { return degree_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Point2>& nodes() const { return nodes_; }
  /// Row i holds the monomial coefficients of basis function i.
  const Eigen::MatrixXd& basis_coefficients() const { return coefficients_; }
  const std::vector<std::array<int, 2>>& monomial_exponents() const { return exponents_; }
  /// Reciprocal condition estimate of the node/monomial evaluation matrix.
  double vandermonde_rcond() const { return rcond_; }

  BasisEval eval(Point2 p) const {
    Eigen::VectorXd mono(static_cast<Eigen::Index>(exponents_.size()));
    Eigen::VectorXd dmx(mono.size());
    Eigen::VectorXd dmy(mono.size());
    monomials(p, mono, dmx, dmy);
    BasisEval out;
    out.values = coefficients_ * mono;
    out.gradients.resize(mono.size(), 2);
    out.gradients.col(0) = coefficients_ * dmx;
    out.gradients.col(1) = coefficients_ * dmy;
    return out;
  }

  Eigen::VectorXd values(Point2 p) const { return eval(p).values; }

 private:
  void monomials(Point2 p, Eigen::VectorXd& m, Eigen::VectorXd& dx, Eigen::VectorXd& dy) const {
    std::array<double, kMaxDegree + 1> px{};
    std::array<double, kMaxDegree + 1> py{};
    px[0] = py[0] = 1.0;
    for (int k = 1; k <= degree_; ++k) {
      px[static_cast<std::size_t>(k)] = px[static_cast<std::size_t>(k - 1)] * p.x;
      py[static_cast<std::size_t>(k)] = py[static_cast<std::size_t>(k - 1)] * p.y;
    }
    for (std::size_t k = 0; k < exponents_.size(); ++k) {
      const auto a = static_cast<std::size_t>(exponents_[k][0]);
      const auto b = static_cast<std::size_t>(exponents_[k][1]);
      const auto idx = static_cast<Eigen::Index>(k);
      m[idx] = px[a] * py[b];
      dx[idx] = a == 0 ? 0.0 : static_cast<double>(a) * px[a - 1] * py[b];
      dy[idx] = b == 0 ? 0.0 : static_cast<double>(b) * px[a] * py[b - 1];
    }
  }

  int degree_;
  std::vector<Point2> nodes_;
  std::vector<std::array<int, 2>> exponents_;
  Eigen::MatrixXd coefficients_;
  double rcond_ = 0.0;
};

inline ReferenceElement::ReferenceElement(int degree) : degree_(degree) {
  if (degree < 1 || degree > kMaxDegree) {
    throw SizeError("element degree must lie in [1, 6], got " + std::to_string(degree));
  }
  for (int j = 0; j <= degree; ++j) {
    for (int i = 0; i + j <= degree; ++i) {
      nodes_.push_back({static_cast<double>(i) / degree, static_cast<double>(j) / degree});
    }
  }
  for (int t = 0; t <= degree; ++t) {
    for (int b = 0; b <= t; ++b) exponents_.push_back({t - b, b});
  }
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  Eigen::MatrixXd vandermonde(n, n);
  Eigen::VectorXd m(n), dx(n), dy(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    monomials(nodes_[static_cast<std::size_t>(i)], m, dx, dy);
    vandermonde.row(i) = m.transpose();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(vandermonde);
  rcond_ = lu.rcond();
  if (!lu.isInvertible() || rcond_ < 1e-12) {
    throw InternalError("Lagrange evaluation matrix of degree " + std::to_string(degree) +
                        " is numerically singular");
  }
  // V C = I with C(m, i) the coefficient of monomial m in basis i.
  coefficients_ = lu.inverse().transpose();
}

inline ReferenceElement build_reference_element(int degree) { return ReferenceElement(degree); }

/// Shared immutable element of the given degree, built once per process.
inline const ReferenceElement& reference_element(int degree) {
  static const std::vector<ReferenceElement> cache = [] {
    std::vector<ReferenceElement> all;
    for (int l = 1; l <= kMaxDegree; ++l) all.emplace_back(l);
    return all;
  }();
  if (degree < 1 || degree > kMaxDegree) {
    throw SizeError("element degree must lie in [1, 6], got " + std::to_string(degree));
  }
  return cache[static_cast<std::size_t>(degree - 1)];
}

/// Basis values and reference gradients tabulated at every point of a rule.
struct Tabulation {
  Eigen::MatrixXd values;  // (num_points x num_basis)
  Eigen::MatrixXd grad_x;
  Eigen::MatrixXd grad_y;
};

inline Tabulation tabulate(const ReferenceElement& elem, const QuadratureRule& rule) {
  const auto nq = static_cast<Eigen::Index>(rule.size());
  const auto nb = static_cast<Eigen::Index>(elem.num_nodes());
  Tabulation tab{Eigen::MatrixXd(nq, nb), Eigen::MatrixXd(nq, nb), Eigen::MatrixXd(nq, nb)};
  for (Eigen::Index q = 0; q < nq; ++q) {
    const BasisEval e = elem.eval(rule.points[static_cast<std::size_t>(q)]);
    tab.values.row(q) = e.values.transpose();
    tab.grad_x.row(q) = e.gradients.col(0).transpose();
    tab.grad_y.row(q) = e.gradients.col(1).transpose();
  }
  return tab;
}

}  // namespace twolevel
