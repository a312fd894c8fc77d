#pragma once

#include <citymesh/error.hpp>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace citymesh {

using Vec3 = Eigen::Vector3d;
using FaceIndex = std::uint32_t;
using VertexIndex = std::uint32_t;
using TriangleIndices = std::array<VertexIndex, 3>;

// Unit normal of the triangle (a, b, c) by the right-hand rule.
// Throws DegenerateFaceError when the points are coincident or collinear.
inline Vec3 faceNormal(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 n = e1.cross(e2);
  const double len = n.norm();
  if (!(len > 1e-12 * e1.norm() * e2.norm()) || !std::isfinite(len))
    throw DegenerateFaceError("triangle has no defined normal (collinear or coincident vertices)");
  return n / len;
}

struct TriangleFace {
  TriangleIndices vertexIndices;
  Vec3 normal;
  Vec3 centroid;
};

// Vertices plus fan-triangulated index triples, before degenerate filtering.
// This is what the OBJ reader produces and what validation inspects.
struct TriangleSoup {
  std::vector<Vec3> vertices;
  std::vector<TriangleIndices> triangles;
};

struct BoundingBox {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool empty() const { return !(min.x() <= max.x()); }
  double diagonal() const { return empty() ? 0.0 : (max - min).norm(); }
};

inline BoundingBox boundingBox(const std::vector<Vec3>& points) {
  BoundingBox box;
  for (const auto& p : points)
    box.extend(p);
  return box;
}

// Immutable indexed triangle mesh with per-face normals and centroids.
class TriangleMesh {
public:
  TriangleMesh() = default;

  // Builds a mesh from a soup. Triangles whose area is below
  // 1e-12 * (bounding-box diagonal)^2 are dropped and counted in *dropped.
  // Throws ParameterError on out-of-range indices or non-finite positions.
  static TriangleMesh fromSoup(const TriangleSoup& soup, std::size_t* dropped = nullptr) {
    TriangleMesh mesh;
    mesh.vertices_ = soup.vertices;
    for (const auto& v : mesh.vertices_)
      if (!v.allFinite())
        throw ParameterError("vertex position is not finite");
    mesh.box_ = boundingBox(mesh.vertices_);
    const double diag = mesh.box_.diagonal();
    const double minArea = 1e-12 * diag * diag;

    std::size_t droppedCount = 0;
    mesh.faces_.reserve(soup.triangles.size());
    for (const auto& tri : soup.triangles) {
      for (auto idx : tri)
        if (idx >= mesh.vertices_.size())
          throw ParameterError("vertex index " + std::to_string(idx) + " out of range");
      const Vec3& a = mesh.vertices_[tri[0]];
      const Vec3& b = mesh.vertices_[tri[1]];
      const Vec3& c = mesh.vertices_[tri[2]];
      const double area = 0.5 * (b - a).cross(c - a).norm();
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] || !(area >= minArea) || area == 0.0) {
        ++droppedCount;
        continue;
      }
      mesh.faces_.push_back({tri, faceNormal(a, b, c), (a + b + c) / 3.0});
    }
    if (dropped)
      *dropped = droppedCount;
    return mesh;
  }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<TriangleFace>& faces() const { return faces_; }
  const TriangleFace& face(FaceIndex i) const { return faces_.at(i); }
  std::size_t faceCount() const { return faces_.size(); }
  std::size_t vertexCount() const { return vertices_.size(); }
  bool empty() const { return faces_.empty(); }

  const Vec3& position(FaceIndex f, int corner) const { return vertices_[faces_[f].vertexIndices[corner]]; }

  const Vec3& upVector() const { return up_; }
  const BoundingBox& bounds() const { return box_; }
  double diagonal() const { return box_.diagonal(); }

  // Copy of this mesh with a different UP vector (normalized).
  TriangleMesh withUpVector(const Vec3& up) const {
    const double len = up.norm();
    if (!(len > 0.0) || !std::isfinite(len))
      throw ParameterError("UP vector must be non-zero and finite");
    TriangleMesh copy = *this;
    copy.up_ = up / len;
    return copy;
  }

private:
  std::vector<Vec3> vertices_;
  std::vector<TriangleFace> faces_;
  Vec3 up_ = Vec3::UnitZ();
  BoundingBox box_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> splitWs(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
      ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t')
      ++j;
    if (j > i)
      out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parseReal(std::string_view tok, std::size_t line) {
  double value = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+')
    ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line, "non-numeric coordinate '" + std::string(tok) + "'");
  if (!std::isfinite(value))
    throw ParseError(line, "non-finite coordinate '" + std::string(tok) + "'");
  return value;
}

// Resolves the position part of a face token ("i", "i/t", "i//n", "i/t/n").
inline VertexIndex parseFaceIndex(std::string_view tok, std::size_t vertexCount, std::size_t line) {
  const std::string_view head = tok.substr(0, tok.find('/'));
  long long idx = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (head.empty() || ec != std::errc() || ptr != head.data() + head.size())
    throw ParseError(line, "malformed face index '" + std::string(tok) + "'");
  const long long n = static_cast<long long>(vertexCount);
  long long resolved = idx > 0 ? idx - 1 : n + idx;
  if (idx == 0 || resolved < 0 || resolved >= n)
    throw ParseError(line, "face index " + std::to_string(idx) + " out of range (" + std::to_string(n) +
                               " vertices defined)");
  return static_cast<VertexIndex>(resolved);
}

} // namespace detail

// Reads `v` and `f` records; every other record type is ignored. Polygons are
// fan-triangulated from their first vertex.
inline TriangleSoup parseObj(std::istream& in) {
  TriangleSoup soup;
  std::string raw;
  std::size_t line = 0;
  std::size_t faceRecords = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = detail::trim(raw);
    if (const auto hash = text.find('#'); hash != std::string_view::npos)
      text = detail::trim(text.substr(0, hash));
    if (text.empty())
      continue;
    const auto tokens = detail::splitWs(text);
    const auto& kind = tokens.front();
    if (kind == "v") {
      if (tokens.size() < 4)
        throw ParseError(line, "vertex record needs 3 coordinates");
      soup.vertices.emplace_back(detail::parseReal(tokens[1], line), detail::parseReal(tokens[2], line),
                                 detail::parseReal(tokens[3], line));
    } else if (kind == "f") {
      if (tokens.size() < 4)
        throw ParseError(line, "face record needs at least 3 vertices");
      std::vector<VertexIndex> poly;
      poly.reserve(tokens.size() - 1);
      for (std::size_t k = 1; k < tokens.size(); ++k)
        poly.push_back(detail::parseFaceIndex(tokens[k], soup.vertices.size(), line));
      for (std::size_t k = 1; k + 1 < poly.size(); ++k)
        soup.triangles.push_back({poly[0], poly[k], poly[k + 1]});
      ++faceRecords;
    }
  }
  if (faceRecords == 0)
    throw ParseError(line, "no face records");
  return soup;
}

struct LoadResult {
  TriangleMesh mesh;
  std::size_t droppedDegenerate = 0;
};

inline LoadResult loadObj(std::istream& in) {
  LoadResult result;
  result.mesh = TriangleMesh::fromSoup(parseObj(in), &result.droppedDegenerate);
  return result;
}

inline LoadResult loadObj(std::string_view text) {
  std::istringstream in{std::string(text)};
  return loadObj(in);
}

inline LoadResult loadObjFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open model file '" + path + "'");
  return loadObj(in);
}

} // namespace citymesh
