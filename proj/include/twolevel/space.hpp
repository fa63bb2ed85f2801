#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "twolevel/element.hpp"
#include "twolevel/error.hpp"
#include "twolevel/mesh.hpp"

namespace twolevel {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using ScalarField = std::function<double(Point2)>;
using VectorField = std::function<Eigen::Vector2d(Point2)>;
using MatrixField = std::function<Eigen::Matrix2d(Point2)>;

/// Affine map x = origin + J * xi from the reference triangle onto a cell.
struct CellGeometry {
  Eigen::Vector2d origin;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse;  // J^{-1}
  double det = 0.0;

  Point2 map(Point2 ref) const {
    const Eigen::Vector2d x = origin + jacobian * Eigen::Vector2d(ref.x, ref.y);
    return {x.x(), x.y()};
  }
  Point2 pull_back(Point2 p) const {
    const Eigen::Vector2d xi = inverse * (Eigen::Vector2d(p.x, p.y) - origin);
    return {xi.x(), xi.y()};
  }
};

inline CellGeometry cell_geometry(const Mesh& mesh, int t) {
  const Triangle& tri = mesh.triangles()[static_cast<std::size_t>(t)];
  const Point2& a = mesh.vertices()[static_cast<std::size_t>(tri[0])];
  const Point2& b = mesh.vertices()[static_cast<std::size_t>(tri[1])];
  const Point2& c = mesh.vertices()[static_cast<std::size_t>(tri[2])];
  CellGeometry g;
  g.origin = {a.x, a.y};
  g.jacobian << b.x - a.x, c.x - a.x, b.y - a.y, c.y - a.y;
  g.det = g.jacobian.determinant();
  if (!(g.det > 0.0)) {
    throw MeshError("triangle " + std::to_string(t) + " has non-positive area");
  }
  g.inverse = g.jacobian.inverse();
  return g;
}

/// (lM + 1)^2: number of Lagrange DOFs of degree l on the M x M structured mesh,
/// boundary DOFs included.
inline long long dof_count(int M, int l) {
  if (M < 1) throw SizeError("mesh subdivisions must be >= 1, got " + std::to_string(M));
  if (l < 1 || l > kMaxDegree) {
    throw SizeError("element degree must lie in [1, 6], got " + std::to_string(l));
  }
  const long long side = static_cast<long long>(l) * M + 1;
  return side * side;
}

/**
 * Continuous Lagrange space of degree l on a structured mesh.
 *
 * Global DOFs are the points of the lattice with spacing 1/(lM), numbered
 * lexicographically by (y, x). Local DOF i of a cell is its reference node i
 * mapped through the cell's affine map.
 */
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree)
      : mesh_(std::move(mesh)), element_(&reference_element(degree)), degree_(degree) {
    if (!mesh_) throw Error("FeSpace needs a mesh");
    const int M = mesh_->subdivisions();
    const int N = degree * M;
    const int side = N + 1;
    num_dofs_ = static_cast<int>(dof_count(M, degree));

    coordinates_.reserve(static_cast<std::size_t>(num_dofs_));
    is_boundary_.assign(static_cast<std::size_t>(num_dofs_), false);
    for (int gy = 0; gy <= N; ++gy) {
      for (int gx = 0; gx <= N; ++gx) {
        coordinates_.push_back({static_cast<double>(gx) / N, static_cast<double>(gy) / N});
        if (gx == 0 || gy == 0 || gx == N || gy == N) {
          is_boundary_[static_cast<std::size_t>(gy * side + gx)] = true;
        }
      }
    }
    interior_index_.assign(static_cast<std::size_t>(num_dofs_), -1);
    for (int d = 0; d < num_dofs_; ++d) {
      if (is_boundary_[static_cast<std::size_t>(d)]) {
        boundary_dofs_.push_back(d);
      } else {
        interior_index_[static_cast<std::size_t>(d)] = static_cast<int>(interior_dofs_.size());
        interior_dofs_.push_back(d);
      }
    }

    const auto& nodes = element_->nodes();
    const auto n_local = nodes.size();
    cell_dofs_.resize(mesh_->num_triangles() * n_local);
    for (std::size_t t = 0; t < mesh_->num_triangles(); ++t) {
      const Triangle& tri = mesh_->triangles()[t];
      const auto v0 = mesh_->vertex_lattice(tri[0]);
      const auto v1 = mesh_->vertex_lattice(tri[1]);
      const auto v2 = mesh_->vertex_lattice(tri[2]);
      int j = 0;
      for (int nj = 0; nj <= degree; ++nj) {
        for (int ni = 0; ni + nj <= degree; ++ni, ++j) {
          const int gx = degree * v0[0] + ni * (v1[0] - v0[0]) + nj * (v2[0] - v0[0]);
          const int gy = degree * v0[1] + ni * (v1[1] - v0[1]) + nj * (v2[1] - v0[1]);
          cell_dofs_[t * n_local + static_cast<std::size_t>(j)] = gy * side + gx;
        }
      }
    }
  }

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const ReferenceElement& element() const { return *element_; }
  int degree() const { return degree_; }
  int num_dofs() const { return num_dofs_; }
  int dofs_per_cell() const { return element_->num_nodes(); }
  int num_cells() const { return static_cast<int>(mesh_->num_triangles()); }

  const std::vector<Point2>& dof_coordinates() const { return coordinates_; }
  std::span<const int> cell_dofs(int t) const {
    const auto n = static_cast<std::size_t>(dofs_per_cell());
    return {cell_dofs_.data() + static_cast<std::size_t>(t) * n, n};
  }
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  const std::vector<int>& interior_dofs() const { return interior_dofs_; }
  bool is_boundary(int dof) const { return is_boundary_[static_cast<std::size_t>(dof)]; }
  /// Position of `dof` in interior_dofs(), or -1 for boundary DOFs.
  int interior_index(int dof) const { return interior_index_[static_cast<std::size_t>(dof)]; }

  /// Value and gradient of the finite element function with coefficients `c` at p.
  std::pair<double, Eigen::Vector2d> evaluate(const Vector& c, Point2 p) const {
    const int t = mesh_->locate(p);
    if (t < 0) throw Error("evaluation point outside the domain");
    const CellGeometry g = cell_geometry(*mesh_, t);
    const BasisEval e = element_->eval(g.pull_back(p));
    double value = 0.0;
    Eigen::Vector2d ref_grad = Eigen::Vector2d::Zero();
    const auto dofs = cell_dofs(t);
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double ci = c[dofs[i]];
      value += ci * e.values[ii];
      ref_grad += ci * e.gradients.row(ii).transpose();
    }
    return {value, g.inverse.transpose() * ref_grad};
  }

 private:
  std::shared_ptr<const Mesh> mesh_;
  const ReferenceElement* element_;
  int degree_;
  int num_dofs_ = 0;
  std::vector<Point2> coordinates_;
  std::vector<int> cell_dofs_;
  std::vector<int> boundary_dofs_;
  std::vector<int> interior_dofs_;
  std::vector<bool> is_boundary_;
  std::vector<int> interior_index_;
};

inline FeSpace build_space(std::shared_ptr<const Mesh> mesh, int degree) {
  return FeSpace(std::move(mesh), degree);
}

inline FeSpace build_space(Mesh mesh, int degree) {
  return FeSpace(std::make_shared<const Mesh>(std::move(mesh)), degree);
}

/// Lagrange interpolant: pointwise values of g at the DOF coordinates.
inline Vector interpolate(const FeSpace& space, const ScalarField& g) {
  Vector c(space.num_dofs());
  const auto& xs = space.dof_coordinates();
  for (std::size_t i = 0; i < xs.size(); ++i) c[static_cast<Eigen::Index>(i)] = g(xs[i]);
  return c;
}

/// Exact embedding of a coarser space into a finer one, P(j, i) = phi_i^source(x_j^target).
struct Prolongation {
  const FeSpace* source = nullptr;
  const FeSpace* target = nullptr;
  SparseMatrix matrix;  // target dofs x source dofs

  Vector apply(const Vector& c) const { return matrix * c; }
  Vector apply_transpose(const Vector& v) const { return matrix.transpose() * v; }
};

inline Prolongation build_prolongation(const FeSpace& source, const FeSpace& target) {
  const int ms = source.mesh().subdivisions();
  const int mt = target.mesh().subdivisions();
  const bool degree_nested = ms == mt && source.degree() <= target.degree() &&
                             source.mesh().diagonal() == target.mesh().diagonal();
  const bool mesh_nested = source.degree() == target.degree() && mt % ms == 0 &&
                           source.mesh().diagonal() == target.mesh().diagonal();
  if (!degree_nested && !mesh_nested) {
    throw IncompatibleSpaces("no exact embedding from (M=" + std::to_string(ms) +
                             ", l=" + std::to_string(source.degree()) + ") into (M=" +
                             std::to_string(mt) + ", l=" + std::to_string(target.degree()) + ")");
  }

  constexpr double kDropTolerance = 1e-14;
  const auto& elem = source.element();
  const auto& xs = target.dof_coordinates();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(xs.size() * static_cast<std::size_t>(source.dofs_per_cell()));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const int t = source.mesh().locate(xs[j]);
    const CellGeometry g = cell_geometry(source.mesh(), t);
    const Vector phi = elem.values(g.pull_back(xs[j]));
    const auto dofs = source.cell_dofs(t);
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      const double v = phi[static_cast<Eigen::Index>(i)];
      if (std::abs(v) > kDropTolerance) {
        triplets.emplace_back(static_cast<int>(j), dofs[i], v);
      }
    }
  }
  Prolongation p{&source, &target, SparseMatrix(target.num_dofs(), source.num_dofs())};
  p.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return p;
}

}  // namespace twolevel
