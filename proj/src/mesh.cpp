#include "cbfed/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cbfed {

double TriMesh::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[0]];
  const Point& b = vertices[tri[1]];
  const Point& c = vertices[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::size_t TriMesh::locate(Point p) const {
  constexpr double tol = 1e-12;
  if (p.x < -tol || p.x > 1.0 + tol || p.y < -tol || p.y > 1.0 + tol || !std::isfinite(p.x) ||
      !std::isfinite(p.y)) {
    throw std::out_of_range("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                            ") lies outside the mesh");
  }
  const double nd = static_cast<double>(n);
  const double sx = std::clamp(p.x * nd, 0.0, nd);
  const double sy = std::clamp(p.y * nd, 0.0, nd);
  const auto i = std::min(static_cast<std::size_t>(sx), n - 1);
  const auto j = std::min(static_cast<std::size_t>(sy), n - 1);
  const double s = sx - static_cast<double>(i);
  const double t = sy - static_cast<double>(j);
  const std::size_t cell = j * n + i;
  return 2 * cell + (s >= t ? 0 : 1);
}

TriMesh unit_square_mesh(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("unit_square_mesh: n must be positive");
  }
  TriMesh mesh;
  mesh.n = n;
  mesh.h = 1.0 / static_cast<double>(n);
  const std::size_t stride = n + 1;
  const double nd = static_cast<double>(n);

  mesh.vertices.reserve(stride * stride);
  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      mesh.vertices.push_back({static_cast<double>(i) / nd, static_cast<double>(j) / nd});
    }
  }

  mesh.triangles.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v00 = j * stride + i;
      const std::size_t v10 = v00 + 1;
      const std::size_t v01 = v00 + stride;
      const std::size_t v11 = v01 + 1;
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }

  // Counterclockwise walk: bottom, right, top (slip), left.
  mesh.boundary_edges.reserve(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    mesh.boundary_edges.push_back({i, i + 1, BoundaryTag::Gamma0});
  }
  for (std::size_t j = 0; j < n; ++j) {
    mesh.boundary_edges.push_back({j * stride + n, (j + 1) * stride + n, BoundaryTag::Gamma0});
  }
  for (std::size_t i = n; i > 0; --i) {
    mesh.boundary_edges.push_back({n * stride + i, n * stride + i - 1, BoundaryTag::Gamma1});
  }
  for (std::size_t j = n; j > 0; --j) {
    mesh.boundary_edges.push_back({j * stride, (j - 1) * stride, BoundaryTag::Gamma0});
  }
  return mesh;
}

std::vector<std::size_t> boundary_vertices(const TriMesh& mesh, BoundaryTag tag) {
  std::vector<std::size_t> out;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == tag) {
      out.push_back(e.v0);
      out.push_back(e.v1);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void write_mesh(std::ostream& os, const TriMesh& mesh) {
  os << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.boundary_edges.size()
     << '\n';
  os.precision(17);
  for (const auto& v : mesh.vertices) {
    os << v.x << ' ' << v.y << '\n';
  }
  for (const auto& t : mesh.triangles) {
    os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  for (const auto& e : mesh.boundary_edges) {
    os << e.v0 << ' ' << e.v1 << ' ' << (e.tag == BoundaryTag::Gamma1 ? 1 : 0) << '\n';
  }
}

}  // namespace cbfed
