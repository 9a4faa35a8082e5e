#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace cbfed {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Boundary partition: Gamma0 carries no-slip data, Gamma1 the friction slip law.
enum class BoundaryTag { Gamma0, Gamma1 };

struct BoundaryEdge {
  std::size_t v0;
  std::size_t v1;
  BoundaryTag tag;
};

/// Structured triangulation of an axis-aligned rectangle.
///
/// Vertices are laid out row by row (index = j * (n + 1) + i). Every grid cell
/// is split along its lower-left to upper-right diagonal into two
/// counterclockwise triangles, the lower one first.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::size_t n = 0;  // cells per side
  double h = 0.0;     // 1 / n

  [[nodiscard]] std::size_t num_vertices() const { return vertices.size(); }
  [[nodiscard]] std::size_t num_triangles() const { return triangles.size(); }
  [[nodiscard]] double signed_area(std::size_t t) const;

  /// Triangle containing p, found by direct lookup on the structured grid.
  /// Throws std::out_of_range if p lies outside the closed unit square by more
  /// than 1e-12.
  [[nodiscard]] std::size_t locate(Point p) const;
};

/// n x n grid on (0,1)^2; top side y = 1 is Gamma1, the other three sides Gamma0.
TriMesh unit_square_mesh(std::size_t n);

/// Vertices incident to at least one boundary edge with the given tag, sorted.
/// The two top corners appear in both sets.
std::vector<std::size_t> boundary_vertices(const TriMesh& mesh, BoundaryTag tag);

/// Plain-text export: header "nv nt nbe", then vertex, triangle and boundary lines.
void write_mesh(std::ostream& os, const TriMesh& mesh);

}  // namespace cbfed
