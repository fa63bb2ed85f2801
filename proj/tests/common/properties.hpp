#pragma once

// Invariant checks shared by the unit tests and the acceptance binary. Each
// returns the largest deviation found (0 when everything holds exactly) or an
// empty string on success.

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "twolevel/twolevel.hpp"

namespace props {

using namespace twolevel;

/// Counts, areas, boundary edges and nestedness for every M <= max_M and both diagonals.
inline std::string mesh_invariants(int max_M) {
  for (Diagonal d : {Diagonal::anti, Diagonal::main}) {
    for (int M = 1; M <= max_M; ++M) {
      const Mesh mesh = build_structured_mesh(M, d);
      const std::string tag = " (M=" + std::to_string(M) + ")";
      if (mesh.num_vertices() != static_cast<std::size_t>((M + 1) * (M + 1))) return "vertex count" + tag;
      if (mesh.num_triangles() != static_cast<std::size_t>(2 * M * M)) return "triangle count" + tag;
      if (mesh.edges().size() != static_cast<std::size_t>(3 * M * M + 2 * M)) return "edge count" + tag;
      const auto n_boundary = std::count_if(mesh.edges().begin(), mesh.edges().end(),
                                            [](const Edge& e) { return e.on_boundary; });
      if (n_boundary != 4 * M) return "boundary edge count" + tag;
      double total = 0.0;
      for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const double a = mesh.signed_area(t);
        if (std::abs(a - 0.5 / (M * M)) > 1e-14) return "triangle area" + tag;
        total += a;
      }
      if (std::abs(total - 1.0) > 1e-12) return "area sum" + tag;

      if (2 * M <= max_M) {
        // every fine triangle lies inside the coarse triangle containing its centroid
        const Mesh fine = refine_nested(mesh, 2);
        for (int t = 0; t < static_cast<int>(fine.num_triangles()); ++t) {
          const auto& tri = fine.triangles()[static_cast<std::size_t>(t)];
          Point2 c{0, 0};
          for (int v : tri) {
            c.x += fine.vertices()[static_cast<std::size_t>(v)].x / 3;
            c.y += fine.vertices()[static_cast<std::size_t>(v)].y / 3;
          }
          const int owner = mesh.locate(c);
          const CellGeometry g = cell_geometry(mesh, owner);
          for (int v : tri) {
            const Point2 xi = g.pull_back(fine.vertices()[static_cast<std::size_t>(v)]);
            if (xi.x < -1e-12 || xi.y < -1e-12 || xi.x + xi.y > 1.0 + 1e-12) return "nestedness" + tag;
          }
        }
      }
    }
  }
  return {};
}

/// Lagrange property, partition of unity and quadrature exactness for l <= max_degree.
inline std::string element_invariants(int max_degree) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int l = 1; l <= max_degree; ++l) {
    const ReferenceElement& e = reference_element(l);
    const std::string tag = " (l=" + std::to_string(l) + ")";
    if (e.num_nodes() != (l + 1) * (l + 2) / 2) return "node count" + tag;
    for (int j = 0; j < e.num_nodes(); ++j) {
      const Eigen::VectorXd v = e.values(e.nodes()[static_cast<std::size_t>(j)]);
      for (int i = 0; i < e.num_nodes(); ++i) {
        if (std::abs(v[i] - (i == j ? 1.0 : 0.0)) > 1e-10) return "Lagrange property" + tag;
      }
    }
    for (int trial = 0; trial < 50; ++trial) {
      double a = unit(rng), b = unit(rng);
      if (a + b > 1.0) a = 1.0 - a, b = 1.0 - b;
      const BasisEval ev = e.eval({a, b});
      if (std::abs(ev.values.sum() - 1.0) > 1e-12) return "partition of unity" + tag;
      if (ev.gradients.colwise().sum().cwiseAbs().maxCoeff() > 1e-10) return "gradient sum" + tag;
    }
  }
  for (int d = 1; d <= 2 * max_degree; ++d) {
    const QuadratureRule q = build_quadrature(d);
    if (q.exact_degree < d) return "quadrature exact degree";
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) sum += q.weights[i] * std::pow(q.points[i].x, a) * std::pow(q.points[i].y, b);
        // int_T x^a y^b = a! b! / (a + b + 2)!
        const double exact = std::exp(std::lgamma(a + 1) + std::lgamma(b + 1) - std::lgamma(a + b + 3));
        if (std::abs(sum - exact) > 1e-14 + 1e-12 * exact) {
          return "quadrature x^" + std::to_string(a) + " y^" + std::to_string(b);
        }
      }
    }
  }
  return {};
}

inline ProblemSpec convection_problem() {
  Eigen::Matrix2d alpha;
  alpha << 2.0, 0.3, 0.3, 1.0;
  return manufactured_problem(sine_solution(), alpha, Eigen::Vector2d(1.5, -0.5), -3.0);
}

inline double max_abs(const SparseMatrix& m) {
  return m.nonZeros() == 0 ? 0.0 : Eigen::Map<const Eigen::VectorXd>(m.valuePtr(), m.nonZeros()).cwiseAbs().maxCoeff();
}

/// max |A - A^T| for the stiffness of a symmetric alpha.
inline double stiffness_asymmetry(int M, int l) {
  const FeSpace space = build_space(build_structured_mesh(M), l);
  const SparseMatrix a = assemble_stiffness(space, convection_problem(), default_assembly_quadrature(l));
  return max_abs(SparseMatrix(a - SparseMatrix(a.transpose())));
}

/// max |N - gamma * Mass| when beta = 0 and gamma is constant.
inline double nonsym_mass_deviation(int M, int l, double gamma) {
  const FeSpace space = build_space(build_structured_mesh(M), l);
  const ProblemSpec spec = manufactured_problem(sine_solution(), Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), gamma);
  const QuadratureRule q = default_assembly_quadrature(l);
  return max_abs(SparseMatrix(assemble_nonsym(space, spec, q) - gamma * assemble_mass(space, q)));
}

/// max |P^T Ahat_s P - Ahat_l| for the full form with convection.
inline double galerkin_identity_deviation(int M, int l, int s) {
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(M));
  const FeSpace coarse(mesh, l), fine(mesh, s);
  const ProblemSpec spec = convection_problem();
  const QuadratureRule q = default_assembly_quadrature(s);
  const SparseMatrix ac = assemble_stiffness(coarse, spec, q) + assemble_nonsym(coarse, spec, q);
  const SparseMatrix af = assemble_stiffness(fine, spec, q) + assemble_nonsym(fine, spec, q);
  const Prolongation p = build_prolongation(coarse, fine);
  const SparseMatrix pap = SparseMatrix(p.matrix.transpose()) * af * p.matrix;
  return max_abs(SparseMatrix(pap - ac));
}

/// With beta = gamma = 0 one round reproduces the fine Galerkin solution; returns max |difference|.
inline double degenerate_recovery_deviation(int M, int l, int s) {
  const ProblemSpec spec = manufactured_problem(sine_solution(), Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), 0.0);
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(M));
  const FeSpace coarse(mesh, l), fine(mesh, s);
  TwoLevelConfig cfg;
  cfg.iterations = 1;
  const IterationResult res = two_level_iterate(spec, coarse, fine, cfg);
  const Vector direct = galerkin_solve(fine, spec);
  return (res.solution - direct).lpNorm<Eigen::Infinity>();
}

/// After step 1, P^T (F - Ahat (u + P e)) vanishes on the coarse interior.
/// Returns its norm relative to the norm of P^T F.
inline double coarse_orthogonality(int M, int l, int s) {
  const ProblemSpec spec = convection_problem();
  auto mesh = std::make_shared<const Mesh>(build_structured_mesh(M));
  const FeSpace coarse(mesh, l), fine(mesh, s);
  TwoLevelConfig cfg;
  cfg.coarse_degree = l;
  cfg.fine_degree = s;
  CorrectionScheme scheme(spec, coarse, fine, cfg);
  // nonzero starting iterate
  const Vector u = interpolate(fine, *spec.exact_u);
  const Vector e = scheme.coarse_correction(u);
  const auto& sys = scheme.fine_system();
  const Vector corrected = u + scheme.prolongation().apply(e);
  const Vector r = restrict_to_interior(coarse, scheme.prolongation().apply_transpose(
                                                    Vector(sys.load - sys.apply_full(corrected))));
  const Vector scale = restrict_to_interior(coarse, scheme.prolongation().apply_transpose(sys.load));
  return r.norm() / scale.norm();
}

}  // namespace props
