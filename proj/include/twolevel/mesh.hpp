#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "twolevel/error.hpp"

namespace twolevel {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

using Triangle = std::array<int, 3>;

struct Edge {
  std::array<int, 2> vertices;  // sorted ascending
  bool on_boundary = false;
};

inline constexpr int kDefaultMaxSubdivisions = 4096;

/// Which diagonal splits each cell: `anti` is the slope -1 line, `main` the slope +1 line.
enum class Diagonal { anti, main };

/**
 * Structured triangulation of the unit square.
 *
 * The square is cut into M x M cells, each split by one diagonal into two
 * right triangles. With the default slope -1 diagonal, cell (cx, cy) owns
 * triangles 2*(cy*M + cx) (lower-left) and 2*(cy*M + cx) + 1 (upper-right);
 * with the slope +1 diagonal the pair is (lower-right, upper-left).
 * Vertices are numbered row-major, lexicographically by (y, x).
 */
class Mesh {
 public:
  int subdivisions() const { return m_; }
  double size() const { return 1.0 / m_; }
  Diagonal diagonal() const { return diagonal_; }

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<bool>& boundary_vertex_flags() const { return boundary_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  /// Integer lattice coordinates (ix, iy) of a vertex, so that x = ix / M.
  std::array<int, 2> vertex_lattice(int v) const { return {v % (m_ + 1), v / (m_ + 1)}; }

  double signed_area(int t) const {
    const auto& tri = triangles_[static_cast<std::size_t>(t)];
    const Point2& a = vertices_[static_cast<std::size_t>(tri[0])];
    const Point2& b = vertices_[static_cast<std::size_t>(tri[1])];
    const Point2& c = vertices_[static_cast<std::size_t>(tri[2])];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  }

  /// Index of a triangle containing p (closed), or -1 when p is outside the
  /// square by more than `tol`.
  int locate(Point2 p, double tol = 1e-12) const {
    if (p.x < -tol || p.y < -tol || p.x > 1.0 + tol || p.y > 1.0 + tol) return -1;
    const double sx = std::clamp(p.x, 0.0, 1.0) * m_;
    const double sy = std::clamp(p.y, 0.0, 1.0) * m_;
    const int cx = std::min(static_cast<int>(sx), m_ - 1);
    const int cy = std::min(static_cast<int>(sy), m_ - 1);
    const double a = sx - cx;
    const double b = sy - cy;
    const int cell = cy * m_ + cx;
    if (diagonal_ == Diagonal::anti) return 2 * cell + (a + b <= 1.0 ? 0 : 1);
    return 2 * cell + (a >= b ? 0 : 1);
  }

 private:
  friend Mesh build_structured_mesh(int, Diagonal, int);

  int m_ = 0;
  Diagonal diagonal_ = Diagonal::anti;
  std::vector<Point2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<bool> boundary_;
  std::vector<Edge> edges_;
};

namespace detail {

inline std::vector<Edge> derive_edges(const std::vector<Triangle>& triangles) {
  std::vector<std::array<int, 2>> all;
  all.reserve(triangles.size() * 3);
  for (const auto& t : triangles) {
    for (int i = 0; i < 3; ++i) {
      int a = t[static_cast<std::size_t>(i)];
      int b = t[static_cast<std::size_t>((i + 1) % 3)];
      if (a > b) std::swap(a, b);
      all.push_back({a, b});
    }
  }
  std::sort(all.begin(), all.end());
  std::vector<Edge> edges;
  edges.reserve(all.size() / 2 + 1);
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    edges.push_back({all[i], j - i == 1});
    i = j;
  }
  return edges;
}

}  // namespace detail

/// Builds the M x M structured mesh. Throws SizeError for M < 1 or M > max_subdivisions.
inline Mesh build_structured_mesh(int M, Diagonal diagonal = Diagonal::anti,
                                  int max_subdivisions = kDefaultMaxSubdivisions) {
  if (M < 1 || M > max_subdivisions) {
    throw SizeError("mesh subdivisions must lie in [1, " + std::to_string(max_subdivisions) +
                    "], got " + std::to_string(M));
  }
  Mesh mesh;
  mesh.m_ = M;
  mesh.diagonal_ = diagonal;
  const auto n = static_cast<std::size_t>(M + 1);
  mesh.vertices_.reserve(n * n);
  mesh.boundary_.reserve(n * n);
  for (int iy = 0; iy <= M; ++iy) {
    for (int ix = 0; ix <= M; ++ix) {
      mesh.vertices_.push_back({static_cast<double>(ix) / M, static_cast<double>(iy) / M});
      mesh.boundary_.push_back(ix == 0 || iy == 0 || ix == M || iy == M);
    }
  }
  auto vid = [M](int ix, int iy) { return iy * (M + 1) + ix; };
  mesh.triangles_.reserve(2 * static_cast<std::size_t>(M) * static_cast<std::size_t>(M));
  for (int cy = 0; cy < M; ++cy) {
    for (int cx = 0; cx < M; ++cx) {
      if (diagonal == Diagonal::anti) {
        mesh.triangles_.push_back({vid(cx, cy), vid(cx + 1, cy), vid(cx, cy + 1)});
        mesh.triangles_.push_back({vid(cx + 1, cy + 1), vid(cx, cy + 1), vid(cx + 1, cy)});
      } else {
        mesh.triangles_.push_back({vid(cx, cy), vid(cx + 1, cy), vid(cx + 1, cy + 1)});
        mesh.triangles_.push_back({vid(cx, cy), vid(cx + 1, cy + 1), vid(cx, cy + 1)});
      }
    }
  }
  mesh.edges_ = detail::derive_edges(mesh.triangles_);
  return mesh;
}

/// Uniform refinement by factor r: every coarse triangle becomes r^2 fine
/// triangles with the same diagonal orientation, so the meshes are nested.
inline Mesh refine_nested(const Mesh& coarse, int r, int max_subdivisions = kDefaultMaxSubdivisions) {
  if (r < 1) throw SizeError("refinement factor must be >= 1, got " + std::to_string(r));
  const long long fine = static_cast<long long>(coarse.subdivisions()) * r;
  if (fine > max_subdivisions) {
    throw SizeError("refined mesh exceeds " + std::to_string(max_subdivisions) + " subdivisions");
  }
  return build_structured_mesh(static_cast<int>(fine), coarse.diagonal(), max_subdivisions);
}

/// Debug dump: "vertices:" block of "x y" lines, then "triangles:" block of "i j k" lines.
inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "vertices:\n";
  for (const auto& v : mesh.vertices()) os << v.x << ' ' << v.y << '\n';
  os << "triangles:\n";
  for (const auto& t : mesh.triangles()) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace twolevel
