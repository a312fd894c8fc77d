#pragma once

#include <citymesh/face_graph.hpp>
#include <citymesh/mesh.hpp>
#include <citymesh/selection.hpp>

#include <cmath>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace citymesh {

enum class SegmentationMode { Normal, Spatial, NormalAndSpatial, Coplanar, SpatialCoplanar, Wall, Curve, Cylinder };

inline constexpr SegmentationMode kAllSegmentationModes[] = {
    SegmentationMode::Normal,          SegmentationMode::Spatial, SegmentationMode::NormalAndSpatial,
    SegmentationMode::Coplanar,        SegmentationMode::SpatialCoplanar, SegmentationMode::Wall,
    SegmentationMode::Curve,           SegmentationMode::Cylinder};

inline std::string_view toString(SegmentationMode mode) {
  switch (mode) {
  case SegmentationMode::Normal: return "Normal";
  case SegmentationMode::Spatial: return "Spatial";
  case SegmentationMode::NormalAndSpatial: return "NormalAndSpatial";
  case SegmentationMode::Coplanar: return "Coplanar";
  case SegmentationMode::SpatialCoplanar: return "SpatialCoplanar";
  case SegmentationMode::Wall: return "Wall";
  case SegmentationMode::Curve: return "Curve";
  case SegmentationMode::Cylinder: return "Cylinder";
  }
  return "?";
}

inline std::optional<SegmentationMode> segmentationModeFromString(std::string_view name) {
  for (auto mode : kAllSegmentationModes)
    if (toString(mode) == name)
      return mode;
  return std::nullopt;
}

// Inclusive bounds on the dot product of neighboring face normals.
struct DotBand {
  double lo = 0.0;
  double hi = 1.0;
};

struct SegmentationParams {
  std::optional<DotBand> band;   // Cylinder; defaults to [w, 1 - bandEpsilon]
  double bandEpsilon = 1e-3;     // Cylinder default upper bound offset
  double planarEpsilon = 1e-4;   // Cylinder: dot >= 1 - planarEpsilon always passes
  bool literalWall = false;      // Wall: raw dot products instead of |dot|
};

struct SegmentationRequest {
  SegmentationMode mode = SegmentationMode::Normal;
  FaceIndex seedFace = 0;
  double weight = 0.1;
  SegmentationParams params;
};

enum class SegmentationStatus { Ok, SeedRejected };

struct SegmentationResult {
  Selection selection;
  SegmentationStatus status = SegmentationStatus::Ok;
  std::string message;
};

namespace detail {

inline void checkSeed(std::size_t faceCount, FaceIndex seed) {
  if (seed >= faceCount)
    throw ParameterError("seed face " + std::to_string(seed) + " out of range (" + std::to_string(faceCount) +
                         " faces)");
}

inline void checkWeight(double w, double lo, double hi) {
  if (!(w >= lo && w <= hi))
    throw ParameterError("weight " + std::to_string(w) + " outside [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
}

inline void checkGraph(const TriangleMesh& mesh, const FaceGraph& graph) {
  if (graph.nodeCount() != mesh.faceCount())
    throw MeshMismatchError("graph node count does not match mesh face count");
}

inline std::string provenance(SegmentationMode mode, FaceIndex seed, std::optional<double> w = std::nullopt) {
  std::ostringstream os;
  os << toString(mode) << " seed=" << seed;
  if (w)
    os << " w=" << *w;
  return os.str();
}

// Breadth-first closure from `seed` along edges for which admit(from, to)
// holds. Because admission never revokes a face and admit depends only on the
// edge, the result is the least fixed point and does not depend on visit order.
template <class Admit>
std::vector<FaceIndex> floodFill(const FaceGraph& graph, FaceIndex seed, Admit&& admit) {
  std::vector<bool> in(graph.nodeCount(), false);
  std::vector<FaceIndex> out;
  std::queue<FaceIndex> frontier;
  in[seed] = true;
  frontier.push(seed);
  while (!frontier.empty()) {
    const FaceIndex f = frontier.front();
    frontier.pop();
    out.push_back(f);
    for (auto n : graph.neighbors(f)) {
      if (in[n] || !admit(f, n))
        continue;
      in[n] = true;
      frontier.push(n);
    }
  }
  return out;
}

} // namespace detail

// Faces whose normal lies within w of the seed normal; w in [0, 2].
inline Selection segNormal(const TriangleMesh& mesh, FaceIndex seed, double w) {
  detail::checkSeed(mesh.faceCount(), seed);
  detail::checkWeight(w, 0.0, 2.0);
  const Vec3& ns = mesh.face(seed).normal;
  std::vector<FaceIndex> out{seed};
  for (FaceIndex i = 0; i < mesh.faceCount(); ++i)
    if ((ns - mesh.faces()[i].normal).norm() <= w)
      out.push_back(i);
  return Selection(mesh.faceCount(), std::move(out), detail::provenance(SegmentationMode::Normal, seed, w));
}

// Connected component of the seed.
inline Selection segSpatial(const FaceGraph& graph, FaceIndex seed) {
  detail::checkSeed(graph.nodeCount(), seed);
  auto faces = detail::floodFill(graph, seed, [](FaceIndex, FaceIndex) { return true; });
  return Selection(graph.nodeCount(), std::move(faces), detail::provenance(SegmentationMode::Spatial, seed));
}

inline Selection segNormalSpatial(const TriangleMesh& mesh, const FaceGraph& graph, FaceIndex seed, double w) {
  detail::checkGraph(mesh, graph);
  detail::checkSeed(mesh.faceCount(), seed);
  detail::checkWeight(w, 0.0, 2.0);
  const Vec3 ns = mesh.face(seed).normal;
  auto faces = detail::floodFill(graph, seed, [&](FaceIndex, FaceIndex to) {
    return (ns - mesh.faces()[to].normal).norm() <= w;
  });
  return Selection(mesh.faceCount(), std::move(faces), detail::provenance(SegmentationMode::NormalAndSpatial, seed, w));
}

// Distance of face i's centroid from the seed plane, as a fraction of the
// bounding-box diagonal.
class CoplanarTest {
public:
  CoplanarTest(const TriangleMesh& mesh, FaceIndex seed, double w)
      : mesh_(mesh), origin_(mesh.position(seed, 0)), normal_(mesh.face(seed).normal),
        tolerance_(w * mesh.diagonal()) {}

  bool operator()(FaceIndex i) const {
    return std::abs((mesh_.faces()[i].centroid - origin_).dot(normal_)) <= tolerance_;
  }

private:
  const TriangleMesh& mesh_;
  Vec3 origin_;
  Vec3 normal_;
  double tolerance_;
};

inline Selection segCoplanar(const TriangleMesh& mesh, FaceIndex seed, double w) {
  detail::checkSeed(mesh.faceCount(), seed);
  if (!(w >= 0.0) || !std::isfinite(w))
    throw ParameterError("weight must be finite and non-negative");
  const CoplanarTest coplanar(mesh, seed, w);
  std::vector<FaceIndex> out{seed};
  for (FaceIndex i = 0; i < mesh.faceCount(); ++i)
    if (coplanar(i))
      out.push_back(i);
  return Selection(mesh.faceCount(), std::move(out), detail::provenance(SegmentationMode::Coplanar, seed, w));
}

inline Selection segSpatialCoplanar(const TriangleMesh& mesh, const FaceGraph& graph, FaceIndex seed, double w) {
  detail::checkGraph(mesh, graph);
  detail::checkSeed(mesh.faceCount(), seed);
  if (!(w >= 0.0) || !std::isfinite(w))
    throw ParameterError("weight must be finite and non-negative");
  const CoplanarTest coplanar(mesh, seed, w);
  auto faces = detail::floodFill(graph, seed, [&](FaceIndex, FaceIndex to) { return coplanar(to); });
  return Selection(mesh.faceCount(), std::move(faces), detail::provenance(SegmentationMode::SpatialCoplanar, seed, w));
}

// Wall predicate against the seed normal and the mesh UP vector.
class WallTest {
public:
  WallTest(const TriangleMesh& mesh, FaceIndex seed, double w, bool literal)
      : mesh_(mesh), seedNormal_(mesh.face(seed).normal), w_(w), literal_(literal) {}

  bool alignedWithSeed(FaceIndex i) const {
    double d = seedNormal_.dot(mesh_.faces()[i].normal);
    if (!literal_)
      d = std::abs(d);
    return d <= w_ || d >= 1.0 - w_;
  }

  bool notHorizontal(FaceIndex i) const {
    double d = mesh_.upVector().dot(mesh_.faces()[i].normal);
    if (!literal_)
      d = std::abs(d);
    return d <= 1.0 - w_;
  }

  bool operator()(FaceIndex i) const { return alignedWithSeed(i) && notHorizontal(i); }

private:
  const TriangleMesh& mesh_;
  Vec3 seedNormal_;
  double w_;
  bool literal_;
};

// Walls connected to the seed. A seed facing along UP yields an empty
// selection with status SeedRejected.
inline SegmentationResult segWall(const TriangleMesh& mesh, const FaceGraph& graph, FaceIndex seed, double w,
                                  bool literal = false) {
  detail::checkGraph(mesh, graph);
  detail::checkSeed(mesh.faceCount(), seed);
  detail::checkWeight(w, 0.0, 1.0);
  const WallTest wall(mesh, seed, w, literal);
  const auto prov = detail::provenance(SegmentationMode::Wall, seed, w);
  if (!wall.notHorizontal(seed))
    return {Selection(mesh.faceCount(), {}, prov), SegmentationStatus::SeedRejected,
            "seed face normal is too close to the UP vector to be a wall"};
  auto faces = detail::floodFill(graph, seed, [&](FaceIndex, FaceIndex to) { return wall(to); });
  return {Selection(mesh.faceCount(), std::move(faces), prov), SegmentationStatus::Ok, {}};
}

// Smooth surface: a face joins when its normal is within the weight of an
// already admitted neighbor (N_j . N_i >= w).
inline Selection segCurve(const TriangleMesh& mesh, const FaceGraph& graph, FaceIndex seed, double w) {
  detail::checkGraph(mesh, graph);
  detail::checkSeed(mesh.faceCount(), seed);
  detail::checkWeight(w, 0.0, 1.0);
  const auto& faces = mesh.faces();
  auto out = detail::floodFill(graph, seed, [&](FaceIndex from, FaceIndex to) {
    return faces[from].normal.dot(faces[to].normal) >= w;
  });
  return Selection(mesh.faceCount(), std::move(out), detail::provenance(SegmentationMode::Curve, seed, w));
}

inline DotBand cylinderBand(double w, const SegmentationParams& params) {
  return params.band.value_or(DotBand{w, 1.0 - params.bandEpsilon});
}

// Faceted cylinder: neighbor normals must turn by an amount inside the band,
// or not at all (coplanar steps within a facet).
inline Selection segCylinder(const TriangleMesh& mesh, const FaceGraph& graph, FaceIndex seed, double w,
                             const SegmentationParams& params = {}) {
  detail::checkGraph(mesh, graph);
  detail::checkSeed(mesh.faceCount(), seed);
  detail::checkWeight(w, 0.0, 1.0);
  const DotBand band = cylinderBand(w, params);
  if (!(0.0 <= band.lo && band.lo <= band.hi && band.hi <= 1.0))
    throw ParameterError("cylinder band must satisfy 0 <= lo <= hi <= 1");
  if (!(params.planarEpsilon >= 0.0))
    throw ParameterError("planar epsilon must be non-negative");
  const double planar = 1.0 - params.planarEpsilon;
  const auto& faces = mesh.faces();
  auto out = detail::floodFill(graph, seed, [&](FaceIndex from, FaceIndex to) {
    const double d = faces[from].normal.dot(faces[to].normal);
    return (band.lo <= d && d <= band.hi) || d >= planar;
  });
  return Selection(mesh.faceCount(), std::move(out), detail::provenance(SegmentationMode::Cylinder, seed, w));
}

inline SegmentationResult segment(const TriangleMesh& mesh, const FaceGraph& graph, const SegmentationRequest& req) {
  detail::checkGraph(mesh, graph);
  switch (req.mode) {
  case SegmentationMode::Normal: return {segNormal(mesh, req.seedFace, req.weight)};
  case SegmentationMode::Spatial: return {segSpatial(graph, req.seedFace)};
  case SegmentationMode::NormalAndSpatial: return {segNormalSpatial(mesh, graph, req.seedFace, req.weight)};
  case SegmentationMode::Coplanar: return {segCoplanar(mesh, req.seedFace, req.weight)};
  case SegmentationMode::SpatialCoplanar: return {segSpatialCoplanar(mesh, graph, req.seedFace, req.weight)};
  case SegmentationMode::Wall: return segWall(mesh, graph, req.seedFace, req.weight, req.params.literalWall);
  case SegmentationMode::Curve: return {segCurve(mesh, graph, req.seedFace, req.weight)};
  case SegmentationMode::Cylinder: return {segCylinder(mesh, graph, req.seedFace, req.weight, req.params)};
  }
  throw ParameterError("unknown segmentation mode");
}

} // namespace citymesh
