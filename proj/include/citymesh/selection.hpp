#pragma once

#include <citymesh/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace citymesh {

// A set of face indices over a mesh with `faceCount` faces, kept sorted.
class Selection {
public:
  Selection() = default;

  Selection(std::size_t faceCount, std::vector<FaceIndex> faces, std::string provenance = "manual")
      : faceCount_(faceCount), faces_(std::move(faces)), provenance_(std::move(provenance)) {
    std::sort(faces_.begin(), faces_.end());
    faces_.erase(std::unique(faces_.begin(), faces_.end()), faces_.end());
    if (!faces_.empty() && faces_.back() >= faceCount_)
      throw ParameterError("face index " + std::to_string(faces_.back()) + " out of range");
  }

  static Selection none(std::size_t faceCount) { return Selection(faceCount, {}); }

  static Selection all(std::size_t faceCount) {
    std::vector<FaceIndex> faces(faceCount);
    for (std::size_t i = 0; i < faceCount; ++i)
      faces[i] = static_cast<FaceIndex>(i);
    return Selection(faceCount, std::move(faces));
  }

  Selection inverted() const {
    std::vector<FaceIndex> out;
    out.reserve(faceCount_ - faces_.size());
    auto it = faces_.begin();
    for (std::size_t i = 0; i < faceCount_; ++i) {
      if (it != faces_.end() && *it == i)
        ++it;
      else
        out.push_back(static_cast<FaceIndex>(i));
    }
    return Selection(faceCount_, std::move(out));
  }

  bool contains(FaceIndex f) const { return std::binary_search(faces_.begin(), faces_.end(), f); }
  std::size_t size() const { return faces_.size(); }
  bool empty() const { return faces_.empty(); }
  std::size_t faceCount() const { return faceCount_; }
  const std::vector<FaceIndex>& faces() const { return faces_; }
  const std::string& provenance() const { return provenance_; }

  // Provenance is descriptive only and does not take part in equality.
  friend bool operator==(const Selection& a, const Selection& b) {
    return a.faceCount_ == b.faceCount_ && a.faces_ == b.faces_;
  }

private:
  std::size_t faceCount_ = 0;
  std::vector<FaceIndex> faces_;
  std::string provenance_ = "manual";
};

enum class SetOp { Union, Difference, Intersection };

inline Selection combine(const Selection& a, const Selection& b, SetOp op) {
  if (a.faceCount() != b.faceCount())
    throw MeshMismatchError("selections refer to meshes with " + std::to_string(a.faceCount()) + " and " +
                            std::to_string(b.faceCount()) + " faces");
  std::vector<FaceIndex> out;
  const auto& x = a.faces();
  const auto& y = b.faces();
  switch (op) {
  case SetOp::Union:
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    break;
  case SetOp::Difference:
    std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    break;
  case SetOp::Intersection:
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    break;
  }
  return Selection(a.faceCount(), std::move(out));
}

struct PickRay {
  Vec3 origin;
  Vec3 direction; // unit length

  static PickRay make(const Vec3& origin, const Vec3& direction) {
    const double len = direction.norm();
    if (!(len > 0.0) || !std::isfinite(len) || !origin.allFinite())
      throw ParameterError("pick ray needs a finite origin and a non-zero direction");
    return {origin, direction / len};
  }
};

// Hits closer than this along the ray are ignored.
inline constexpr double kMinHitDistance = 1e-9;

// Watertight ray/triangle test (Woop, Benthin, Wald 2013). Returns the ray
// parameter of the hit, if any. Back faces count.
inline std::optional<double> intersectTriangle(const PickRay& ray, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3& dir = ray.direction;
  int kz = 0;
  dir.cwiseAbs().maxCoeff(&kz);
  int kx = (kz + 1) % 3;
  int ky = (kx + 1) % 3;
  if (dir[kz] < 0.0)
    std::swap(kx, ky);

  const double sx = dir[kx] / dir[kz];
  const double sy = dir[ky] / dir[kz];
  const double sz = 1.0 / dir[kz];

  const Vec3 pa = a - ray.origin;
  const Vec3 pb = b - ray.origin;
  const Vec3 pc = c - ray.origin;

  const double ax = pa[kx] - sx * pa[kz], ay = pa[ky] - sy * pa[kz];
  const double bx = pb[kx] - sx * pb[kz], by = pb[ky] - sy * pb[kz];
  const double cx = pc[kx] - sx * pc[kz], cy = pc[ky] - sy * pc[kz];

  double u = cx * by - cy * bx;
  double v = ax * cy - ay * cx;
  double w = bx * ay - by * ax;

  // Edge functions that are exactly zero are re-evaluated in extended precision.
  if (u == 0.0 || v == 0.0 || w == 0.0) {
    using ld = long double;
    u = static_cast<double>(ld(cx) * ld(by) - ld(cy) * ld(bx));
    v = static_cast<double>(ld(ax) * ld(cy) - ld(ay) * ld(cx));
    w = static_cast<double>(ld(bx) * ld(ay) - ld(by) * ld(ax));
  }

  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0))
    return std::nullopt;
  const double det = u + v + w;
  if (det == 0.0)
    return std::nullopt;

  const double az = sz * pa[kz], bz = sz * pb[kz], cz = sz * pc[kz];
  const double t = (u * az + v * bz + w * cz) / det;
  if (!(t > kMinHitDistance) || !std::isfinite(t))
    return std::nullopt;
  return t;
}

struct RayHit {
  FaceIndex face;
  double t;
};

// Nearest hit along the ray; equal distances resolve to the smaller face index.
inline std::optional<RayHit> pickFirstHit(const TriangleMesh& mesh, const PickRay& ray) {
  std::optional<RayHit> best;
  for (FaceIndex f = 0; f < mesh.faceCount(); ++f) {
    const auto t = intersectTriangle(ray, mesh.position(f, 0), mesh.position(f, 1), mesh.position(f, 2));
    if (t && (!best || *t < best->t))
      best = RayHit{f, *t};
  }
  return best;
}

// Adds (or with `erase`, removes) the first hit of every ray to `current`.
inline Selection paintStroke(const TriangleMesh& mesh, std::span<const PickRay> rays, bool erase,
                             const Selection& current) {
  if (rays.empty())
    throw ParameterError("paint stroke needs at least one ray");
  if (current.faceCount() != mesh.faceCount())
    throw MeshMismatchError("selection does not belong to this mesh");
  std::vector<FaceIndex> hits;
  for (const auto& ray : rays)
    if (const auto hit = pickFirstHit(mesh, ray))
      hits.push_back(hit->face);
  const Selection stroke(mesh.faceCount(), std::move(hits));
  return combine(current, stroke, erase ? SetOp::Difference : SetOp::Union);
}

} // namespace citymesh
