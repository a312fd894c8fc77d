#pragma once

// Synthetic models shared by the unit and acceptance suites. All closed
// shapes are wound so that face normals point outward.

#include <citymesh/mesh.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace citymesh::fixtures {

// Collects triangles; vertices are shared when their positions agree to 1e-9.
class MeshBuilder {
public:
  VertexIndex vertex(const Vec3& p) {
    const auto key = std::make_tuple(std::llround(p.x() * 1e9), std::llround(p.y() * 1e9), std::llround(p.z() * 1e9));
    const auto [it, inserted] = lookup_.try_emplace(key, static_cast<VertexIndex>(soup_.vertices.size()));
    if (inserted)
      soup_.vertices.push_back(p);
    return it->second;
  }

  // Vertex that is never shared with another.
  VertexIndex freshVertex(const Vec3& p) {
    soup_.vertices.push_back(p);
    return static_cast<VertexIndex>(soup_.vertices.size() - 1);
  }

  void triangle(VertexIndex a, VertexIndex b, VertexIndex c) { soup_.triangles.push_back({a, b, c}); }

  // Triangle wound so its normal points away from `inside`.
  void triangleOutward(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& inside) {
    const Vec3 n = (b - a).cross(c - a);
    if (n.dot((a + b + c) / 3.0 - inside) >= 0.0)
      triangle(vertex(a), vertex(b), vertex(c));
    else
      triangle(vertex(a), vertex(c), vertex(b));
  }

  // Quad p0 p1 p2 p3 (in order around its boundary) split into nu x nv cells,
  // two triangles each, wound away from `inside`.
  void quadGrid(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, int nu, int nv, const Vec3& inside) {
    auto at = [&](int i, int j) {
      const double u = double(i) / nu, v = double(j) / nv;
      return Vec3((1 - u) * (1 - v) * p0 + u * (1 - v) * p1 + u * v * p2 + (1 - u) * v * p3);
    };
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nv; ++j) {
        triangleOutward(at(i, j), at(i + 1, j), at(i + 1, j + 1), inside);
        triangleOutward(at(i, j), at(i + 1, j + 1), at(i, j + 1), inside);
      }
  }

  // Convex polygon fanned from its first point.
  void convexPolygon(const std::vector<Vec3>& pts, const Vec3& inside) {
    for (std::size_t k = 1; k + 1 < pts.size(); ++k)
      triangleOutward(pts[0], pts[k], pts[k + 1], inside);
  }

  // Axis-aligned box; each side split into n x n cells.
  void box(const Vec3& lo, const Vec3& hi, int n = 1) {
    const Vec3 c = (lo + hi) / 2;
    const double x0 = lo.x(), y0 = lo.y(), z0 = lo.z(), x1 = hi.x(), y1 = hi.y(), z1 = hi.z();
    quadGrid({x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0}, {x0, y1, z0}, n, n, c); // bottom
    quadGrid({x0, y0, z1}, {x1, y0, z1}, {x1, y1, z1}, {x0, y1, z1}, n, n, c); // top
    quadGrid({x0, y0, z0}, {x1, y0, z0}, {x1, y0, z1}, {x0, y0, z1}, n, n, c); // -y
    quadGrid({x0, y1, z0}, {x1, y1, z0}, {x1, y1, z1}, {x0, y1, z1}, n, n, c); // +y
    quadGrid({x0, y0, z0}, {x0, y1, z0}, {x0, y1, z1}, {x0, y0, z1}, n, n, c); // -x
    quadGrid({x1, y0, z0}, {x1, y1, z0}, {x1, y1, z1}, {x1, y0, z1}, n, n, c); // +x
  }

  const TriangleSoup& soup() const { return soup_; }

  TriangleMesh build() const { return TriangleMesh::fromSoup(soup_); }

private:
  TriangleSoup soup_;
  std::map<std::tuple<long long, long long, long long>, VertexIndex> lookup_;
};

// Unit cube centered at the origin as six quads.
inline const char* kUnitCubeObj = R"(# unit cube
v -0.5 -0.5 -0.5
v  0.5 -0.5 -0.5
v  0.5  0.5 -0.5
v -0.5  0.5 -0.5
v -0.5 -0.5  0.5
v  0.5 -0.5  0.5
v  0.5  0.5  0.5
v -0.5  0.5  0.5
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 2 3 7 6
f 3 4 8 7
f 4 1 5 8
)";

inline TriangleMesh unitCube() { return loadObj(std::string_view(kUnitCubeObj)).mesh; }

// Faces of `mesh` whose normal equals `n` to 1e-9.
inline std::vector<FaceIndex> facesWithNormal(const TriangleMesh& mesh, const Vec3& n) {
  std::vector<FaceIndex> out;
  for (FaceIndex f = 0; f < mesh.faceCount(); ++f)
    if ((mesh.faces()[f].normal - n).norm() < 1e-9)
      out.push_back(f);
  return out;
}

// Two unit cubes along +x; the second starts at x = 1 + gap. No shared vertices.
inline TriangleMesh twoCubes(double gap) {
  MeshBuilder b;
  b.box({0, 0, 0}, {1, 1, 1});
  b.box({1 + gap, 0, 0}, {2 + gap, 1, 1});
  return b.build();
}

// Axis-aligned box house: 4 walls, flat roof, floor; 12 triangles.
inline TriangleMesh boxHouse() {
  MeshBuilder b;
  b.box({0, 0, 0}, {10, 6, 4});
  return b.build();
}

// Gabled house, 10 x 6 footprint, eaves at z = 4, roof pitch 30 degrees,
// ridge along x. Walls and roof planes are subdivided.
inline TriangleMesh gabledHouse() {
  MeshBuilder b;
  const double w = 10, d = 6, h = 4;
  const double ridge = h + (d / 2) * std::tan(std::numbers::pi / 6);
  const Vec3 inside(w / 2, d / 2, h / 2);
  b.quadGrid({0, 0, 0}, {w, 0, 0}, {w, d, 0}, {0, d, 0}, 2, 2, inside);  // floor
  b.quadGrid({0, 0, 0}, {w, 0, 0}, {w, 0, h}, {0, 0, h}, 4, 2, inside);  // front
  b.quadGrid({0, d, 0}, {w, d, 0}, {w, d, h}, {0, d, h}, 4, 2, inside);  // back
  b.quadGrid({0, 0, 0}, {0, d, 0}, {0, d, h}, {0, 0, h}, 2, 2, inside);  // left
  b.quadGrid({w, 0, 0}, {w, d, 0}, {w, d, h}, {w, 0, h}, 2, 2, inside);  // right
  b.convexPolygon({{0, 0, h}, {0, d, h}, {0, d / 2, ridge}}, inside);     // gable triangles
  b.convexPolygon({{w, 0, h}, {w, d, h}, {w, d / 2, ridge}}, inside);
  b.quadGrid({0, 0, h}, {w, 0, h}, {w, d / 2, ridge}, {0, d / 2, ridge}, 4, 2, inside); // roof planes
  b.quadGrid({0, d, h}, {w, d, h}, {w, d / 2, ridge}, {0, d / 2, ridge}, 4, 2, inside);
  return b.build();
}

// 16-gon prism (radius 1, height 2, axis z); lateral quads split into
// `rows` bands, end caps fanned.
inline TriangleMesh prism16(int rows = 2) {
  MeshBuilder b;
  const int n = 16;
  const double hgt = 2;
  const Vec3 inside(0, 0, hgt / 2);
  std::vector<Vec3> bottom, top;
  for (int k = 0; k < n; ++k) {
    const double a = 2 * std::numbers::pi * k / n;
    bottom.emplace_back(std::cos(a), std::sin(a), 0.0);
    top.emplace_back(std::cos(a), std::sin(a), hgt);
  }
  for (int k = 0; k < n; ++k) {
    const int k1 = (k + 1) % n;
    b.quadGrid(bottom[k], bottom[k1], top[k1], top[k], 1, rows, inside);
  }
  b.convexPolygon(bottom, inside);
  b.convexPolygon(top, inside);
  return b.build();
}

// Barrel vault: half of a 16-gon (8 facets of 22.5 degrees) of radius 2 along
// y, closed by two vertical end caps and a rectangular base.
inline TriangleMesh halfCylinderVault(int lengthCells = 3) {
  MeshBuilder b;
  const int facets = 8;
  const double r = 2, len = 6;
  const Vec3 inside(0, len / 2, r / 3);
  std::vector<Vec3> front, back;
  for (int k = 0; k <= facets; ++k) {
    const double a = std::numbers::pi * k / facets;
    front.emplace_back(r * std::cos(a), 0.0, r * std::sin(a));
    back.emplace_back(r * std::cos(a), len, r * std::sin(a));
  }
  for (int k = 0; k < facets; ++k)
    b.quadGrid(front[k], front[k + 1], back[k + 1], back[k], 1, lengthCells, inside);
  b.convexPolygon(front, inside);
  b.convexPolygon(back, inside);
  b.quadGrid({-r, 0, 0}, {r, 0, 0}, {r, len, 0}, {-r, len, 0}, 2, lengthCells, inside);
  return b.build();
}

// Indices of the vault's curved faces (normals with a positive z or x
// component away from the base and caps).
inline std::vector<FaceIndex> vaultSurfaceFaces(const TriangleMesh& mesh) {
  std::vector<FaceIndex> out;
  for (FaceIndex f = 0; f < mesh.faceCount(); ++f) {
    const Vec3& n = mesh.faces()[f].normal;
    if (std::abs(n.y()) < 1e-9 && n.z() > 0)
      out.push_back(f);
  }
  return out;
}

// Flat n x n grid of quads on z = 0 spanning [x0, x0 + size] x [0, size].
inline void flatPlate(MeshBuilder& b, double x0, double size, int n) {
  b.quadGrid({x0, 0, 0}, {x0 + size, 0, 0}, {x0 + size, size, 0}, {x0, size, 0}, n, n, {x0 + size / 2, size / 2, -1});
}

inline TriangleMesh flatGrid2x2() {
  MeshBuilder b;
  flatPlate(b, 0, 2, 2);
  return b.build();
}

// Two coplanar plates on z = 0 separated by a gap of 1.
inline TriangleMesh twoPlates() {
  MeshBuilder b;
  flatPlate(b, 0, 2, 2);
  flatPlate(b, 3, 2, 2);
  return b.build();
}

// Open staircase profile extruded along y: three treads and three risers.
inline TriangleMesh stairSteps() {
  MeshBuilder b;
  const double run = 1, rise = 0.5, width = 3;
  const Vec3 inside(-5, width / 2, -5);
  for (int s = 0; s < 3; ++s) {
    const double x = s * run, z = s * rise;
    b.quadGrid({x, 0, z}, {x, width, z}, {x, width, z + rise}, {x, 0, z + rise}, 1, 2, inside);                  // riser
    b.quadGrid({x, 0, z + rise}, {x + run, 0, z + rise}, {x + run, width, z + rise}, {x, width, z + rise}, 2, 2, // tread
               {x + run / 2, width / 2, -5});
  }
  return b.build();
}

// L-shaped footprint house, walls of height 3, flat roof and floor.
inline TriangleMesh lShapedHouse() {
  MeshBuilder b;
  const double h = 3;
  // footprint corners counter-clockwise seen from above
  const std::vector<Vec3> foot = {{0, 0, 0}, {8, 0, 0}, {8, 4, 0}, {4, 4, 0}, {4, 8, 0}, {0, 8, 0}};
  for (std::size_t k = 0; k < foot.size(); ++k) {
    const Vec3& p = foot[k];
    const Vec3& q = foot[(k + 1) % foot.size()];
    const Vec3 edge = q - p;
    // outward = edge x up for a counter-clockwise footprint
    const Vec3 outward = edge.cross(Vec3::UnitZ()).normalized();
    const Vec3 inside = (p + q) / 2 - outward + Vec3(0, 0, h / 2);
    b.quadGrid(p, q, q + Vec3(0, 0, h), p + Vec3(0, 0, h), 2, 1, inside);
  }
  // roof and floor as two rectangles each
  for (double z : {0.0, h}) {
    const Vec3 in(0, 0, z == 0.0 ? 1.0 : -1.0);
    b.quadGrid({0, 0, z}, {8, 0, z}, {8, 4, z}, {0, 4, z}, 2, 1, Vec3(4, 2, z) + in);
    b.quadGrid({0, 4, z}, {4, 4, z}, {4, 8, z}, {0, 8, z}, 1, 1, Vec3(2, 6, z) + in);
  }
  return b.build();
}

// 4 x 4 x 3 box whose 4 x 4 roof grid carries a 1 x 1 chimney rising by 1.
inline TriangleMesh cubeWithChimney() {
  MeshBuilder b;
  const double s = 4, h = 3;
  const Vec3 inside(s / 2, s / 2, h / 2);
  b.quadGrid({0, 0, 0}, {s, 0, 0}, {s, s, 0}, {0, s, 0}, 2, 2, inside);
  b.quadGrid({0, 0, 0}, {s, 0, 0}, {s, 0, h}, {0, 0, h}, 2, 2, inside);
  b.quadGrid({0, s, 0}, {s, s, 0}, {s, s, h}, {0, s, h}, 2, 2, inside);
  b.quadGrid({0, 0, 0}, {0, s, 0}, {0, s, h}, {0, 0, h}, 2, 2, inside);
  b.quadGrid({s, 0, 0}, {s, s, 0}, {s, s, h}, {s, 0, h}, 2, 2, inside);
  // roof cells, skipping the chimney cell [1,2] x [1,2]
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == 1 && j == 1)
        continue;
      b.quadGrid({double(i), double(j), h}, {i + 1.0, double(j), h}, {i + 1.0, j + 1.0, h}, {double(i), j + 1.0, h}, 1,
                 1, {i + 0.5, j + 0.5, 0});
    }
  const Vec3 chimneyInside(1.5, 1.5, h + 0.5);
  b.quadGrid({1, 1, h}, {2, 1, h}, {2, 1, h + 1}, {1, 1, h + 1}, 1, 1, chimneyInside);
  b.quadGrid({1, 2, h}, {2, 2, h}, {2, 2, h + 1}, {1, 2, h + 1}, 1, 1, chimneyInside);
  b.quadGrid({1, 1, h}, {1, 2, h}, {1, 2, h + 1}, {1, 1, h + 1}, 1, 1, chimneyInside);
  b.quadGrid({2, 1, h}, {2, 2, h}, {2, 2, h + 1}, {2, 1, h + 1}, 1, 1, chimneyInside);
  b.quadGrid({1, 1, h + 1}, {2, 1, h + 1}, {2, 2, h + 1}, {1, 2, h + 1}, 1, 1, chimneyInside);
  return b.build();
}

// Latitude/longitude sphere of radius 1.
inline TriangleMesh uvSphere(int stacks = 8, int slices = 12) {
  MeshBuilder b;
  auto at = [&](int i, int j) {
    const double th = std::numbers::pi * i / stacks, ph = 2 * std::numbers::pi * j / slices;
    return Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
  };
  for (int i = 0; i < stacks; ++i)
    for (int j = 0; j < slices; ++j) {
      const Vec3 a = at(i, j), c = at(i + 1, j), d = at(i + 1, j + 1), e = at(i, j + 1);
      if (i > 0)
        b.triangleOutward(a, c, e, Vec3::Zero());
      if (i + 1 < stacks)
        b.triangleOutward(c, d, e, Vec3::Zero());
    }
  return b.build();
}

// `count` independent random triangles in [-1, 1]^3 (no shared vertices).
inline TriangleMesh randomTriangles(std::size_t count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MeshBuilder b;
  while (b.soup().triangles.size() < count) {
    const Vec3 a(u(rng), u(rng), u(rng));
    const Vec3 d1 = 0.4 * Vec3(u(rng), u(rng), u(rng));
    const Vec3 d2 = 0.4 * Vec3(u(rng), u(rng), u(rng));
    if (d1.cross(d2).norm() < 1e-3)
      continue;
    b.triangle(b.freshVertex(a), b.freshVertex(a + d1), b.freshVertex(a + d2));
  }
  return b.build();
}

// Same triangles with face order permuted: face k of the result is face
// perm[k] of `mesh`.
inline TriangleMesh permuteFaces(const TriangleMesh& mesh, const std::vector<FaceIndex>& perm) {
  TriangleSoup soup;
  soup.vertices = mesh.vertices();
  for (auto f : perm)
    soup.triangles.push_back(mesh.faces()[f].vertexIndices);
  return TriangleMesh::fromSoup(soup).withUpVector(mesh.upVector());
}

// Uniformly scaled copy.
inline TriangleMesh scaled(const TriangleMesh& mesh, double s) {
  TriangleSoup soup;
  for (const auto& v : mesh.vertices())
    soup.vertices.push_back(v * s);
  for (const auto& f : mesh.faces())
    soup.triangles.push_back(f.vertexIndices);
  return TriangleMesh::fromSoup(soup).withUpVector(mesh.upVector());
}

struct NamedFixture {
  std::string name;
  TriangleMesh mesh;
};

// The five acceptance fixtures.
inline std::vector<NamedFixture> acceptanceFixtures() {
  return {{"cube", unitCube()},
          {"two-cube weld pair", twoCubes(0.05)},
          {"gabled house", gabledHouse()},
          {"16-gon prism", prism16()},
          {"half-cylinder vault", halfCylinderVault()}};
}

} // namespace citymesh::fixtures
