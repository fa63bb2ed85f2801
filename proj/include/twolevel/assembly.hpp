#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "twolevel/element.hpp"
#include "twolevel/error.hpp"
#include "twolevel/space.hpp"

namespace twolevel {

/**
 * Coefficients and data of -div(alpha grad u) + beta . grad u + gamma u = f
 * on the unit square with u = 0 on the boundary. All fields are evaluated at
 * physical points.
 */
struct ProblemSpec {
  MatrixField alpha;
  VectorField beta;
  ScalarField gamma;
  ScalarField f;
  std::optional<ScalarField> exact_u;
  std::optional<VectorField> exact_grad_u;

  bool has_exact_solution() const { return exact_u.has_value() && exact_grad_u.has_value(); }

  /// Throws ConfigError unless the eigenvalues of alpha stay in [alpha_min, alpha_max]
  /// on a samples x samples grid (alpha is symmetrized first).
  void check_ellipticity(double alpha_min, double alpha_max, int samples = 11) const {
    if (!(alpha_min > 0.0)) throw ConfigError("ellipticity lower bound must be positive");
    for (int j = 0; j < samples; ++j) {
      for (int i = 0; i < samples; ++i) {
        const Point2 p{static_cast<double>(i) / (samples - 1), static_cast<double>(j) / (samples - 1)};
        const Eigen::Matrix2d a = alpha(p);
        const Eigen::Matrix2d sym = 0.5 * (a + a.transpose());
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(sym).eigenvalues();
        if (ev.minCoeff() < alpha_min || ev.maxCoeff() > alpha_max) {
          throw ConfigError("alpha violates ellipticity bounds at (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) + ")");
        }
      }
    }
  }
};

/// Default exactness of assembly rules: 2 * degree + 3.
inline QuadratureRule default_assembly_quadrature(int degree) { return build_quadrature(2 * degree + 3); }

namespace detail {

enum class FormPart { stiffness, nonsym };

// Per-cell integration of a(phi_j, phi_i) or N(phi_j, phi_i); contributions are
// emitted in cell order so the finished matrix never depends on scheduling.
inline SparseMatrix assemble_form(const FeSpace& space, const ProblemSpec& spec,
                                  const QuadratureRule& quad, FormPart part) {
  const Tabulation tab = tabulate(space.element(), quad);
  const auto nq = static_cast<Eigen::Index>(quad.size());
  const auto nb = static_cast<Eigen::Index>(space.dofs_per_cell());
  const int n_cells = space.num_cells();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n_cells) * static_cast<std::size_t>(nb * nb));
  Eigen::MatrixXd local(nb, nb);
  Eigen::MatrixXd gx(nq, nb), gy(nq, nb), wx(nq, nb), wy(nq, nb);
  for (int t = 0; t < n_cells; ++t) {
    const CellGeometry g = cell_geometry(space.mesh(), t);
    const Eigen::Matrix2d jit = g.inverse.transpose();
    // physical gradients: grad = J^{-T} grad_ref
    gx = jit(0, 0) * tab.grad_x + jit(0, 1) * tab.grad_y;
    gy = jit(1, 0) * tab.grad_x + jit(1, 1) * tab.grad_y;
    for (Eigen::Index q = 0; q < nq; ++q) {
      const double w = quad.weights[static_cast<std::size_t>(q)] * g.det;
      const Point2 x = g.map(quad.points[static_cast<std::size_t>(q)]);
      if (part == FormPart::stiffness) {
        // weighted flux alpha grad phi_j, row q
        const Eigen::Matrix2d a = w * spec.alpha(x);
        wx.row(q) = a(0, 0) * gx.row(q) + a(0, 1) * gy.row(q);
        wy.row(q) = a(1, 0) * gx.row(q) + a(1, 1) * gy.row(q);
      } else {
        const Eigen::Vector2d b = w * spec.beta(x);
        const double c = w * spec.gamma(x);
        wx.row(q) = b.x() * gx.row(q) + b.y() * gy.row(q) + c * tab.values.row(q);
      }
    }
    // local(i, j) = form(phi_j, phi_i)
    if (part == FormPart::stiffness) {
      local.noalias() = gx.transpose() * wx;
      local.noalias() += gy.transpose() * wy;
    } else {
      local.noalias() = tab.values.transpose() * wx;
    }
    const auto dofs = space.cell_dofs(t);
    for (Eigen::Index i = 0; i < nb; ++i) {
      for (Eigen::Index j = 0; j < nb; ++j) {
        triplets.emplace_back(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)],
                              local(i, j));
      }
    }
  }
  SparseMatrix m(space.num_dofs(), space.num_dofs());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace detail

/// A(i, j) = a(phi_j, phi_i) = int alpha grad phi_j . grad phi_i.
inline SparseMatrix assemble_stiffness(const FeSpace& space, const ProblemSpec& spec,
                                       const QuadratureRule& quad) {
  return detail::assemble_form(space, spec, quad, detail::FormPart::stiffness);
}

/// N(i, j) = int (beta . grad phi_j + gamma phi_j) phi_i, the part of the full form
/// that is moved to the right-hand side of the SPD step.
inline SparseMatrix assemble_nonsym(const FeSpace& space, const ProblemSpec& spec,
                                    const QuadratureRule& quad) {
  return detail::assemble_form(space, spec, quad, detail::FormPart::nonsym);
}

/// Mass matrix, assembled as the gamma = 1, beta = 0 instance of the N form.
inline SparseMatrix assemble_mass(const FeSpace& space, const QuadratureRule& quad) {
  ProblemSpec unit;
  unit.beta = [](Point2) { return Eigen::Vector2d::Zero().eval(); };
  unit.gamma = [](Point2) { return 1.0; };
  return assemble_nonsym(space, unit, quad);
}

/// F(i) = int g phi_i.
inline Vector assemble_load(const FeSpace& space, const ScalarField& g, const QuadratureRule& quad) {
  const Tabulation tab = tabulate(space.element(), quad);
  const auto nq = static_cast<Eigen::Index>(quad.size());
  Vector load = Vector::Zero(space.num_dofs());
  Eigen::VectorXd gw(nq);
  for (int t = 0; t < space.num_cells(); ++t) {
    const CellGeometry geo = cell_geometry(space.mesh(), t);
    for (Eigen::Index q = 0; q < nq; ++q) {
      gw[q] = quad.weights[static_cast<std::size_t>(q)] * geo.det * g(geo.map(quad.points[static_cast<std::size_t>(q)]));
    }
    const Eigen::VectorXd local = tab.values.transpose() * gw;
    const auto dofs = space.cell_dofs(t);
    for (std::size_t i = 0; i < dofs.size(); ++i) load[dofs[i]] += local[static_cast<Eigen::Index>(i)];
  }
  return load;
}

/// Discrete operators on one space; the full operator is stiffness + nonsym and is
/// never stored summed.
struct AssembledSystem {
  const FeSpace* space = nullptr;
  SparseMatrix stiffness;
  SparseMatrix nonsym;
  Vector load;

  const std::vector<int>& interior_dofs() const { return space->interior_dofs(); }
  /// (A + N) x, on all DOFs.
  Vector apply_full(const Vector& x) const { return stiffness * x + nonsym * x; }
};

inline AssembledSystem assemble_system(const FeSpace& space, const ProblemSpec& spec,
                                       const QuadratureRule& quad) {
  return {&space, assemble_stiffness(space, spec, quad), assemble_nonsym(space, spec, quad),
          assemble_load(space, spec.f, quad)};
}

inline AssembledSystem assemble_system(const FeSpace& space, const ProblemSpec& spec) {
  return assemble_system(space, spec, default_assembly_quadrature(space.degree()));
}

/// Row/column restriction of a full-space matrix to the interior DOFs.
inline SparseMatrix restrict_to_interior(const FeSpace& space, const SparseMatrix& m) {
  const auto n = static_cast<int>(space.interior_dofs().size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(m.nonZeros()));
  for (int row = 0; row < m.outerSize(); ++row) {
    const int ri = space.interior_index(row);
    if (ri < 0) continue;
    for (SparseMatrix::InnerIterator it(m, row); it; ++it) {
      const int ci = space.interior_index(static_cast<int>(it.col()));
      if (ci >= 0) triplets.emplace_back(ri, ci, it.value());
    }
  }
  SparseMatrix out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

inline Vector restrict_to_interior(const FeSpace& space, const Vector& v) {
  const auto& dofs = space.interior_dofs();
  Vector out(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[dofs[i]];
  return out;
}

/// Re-expands an interior vector with zeros on the boundary.
inline Vector expand_from_interior(const FeSpace& space, const Vector& interior) {
  Vector out = Vector::Zero(space.num_dofs());
  const auto& dofs = space.interior_dofs();
  for (std::size_t i = 0; i < dofs.size(); ++i) out[dofs[i]] = interior[static_cast<Eigen::Index>(i)];
  return out;
}

/// System after symmetric elimination of the homogeneous Dirichlet DOFs.
struct ReducedSystem {
  SparseMatrix stiffness;
  SparseMatrix nonsym;
  Vector load;
};

inline ReducedSystem apply_dirichlet(const AssembledSystem& system) {
  const FeSpace& s = *system.space;
  return {restrict_to_interior(s, system.stiffness), restrict_to_interior(s, system.nonsym),
          restrict_to_interior(s, system.load)};
}

/// Plain-text MatrixMarket coordinate dump (1-based), for debugging.
template <class Stream>
void write_matrix_market(Stream& os, const SparseMatrix& m) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  os.precision(17);
  for (int row = 0; row < m.outerSize(); ++row) {
    for (SparseMatrix::InnerIterator it(m, row); it; ++it) {
      os << row + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace twolevel
