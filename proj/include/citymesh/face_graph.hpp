#pragma once

#include <citymesh/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <vector>

namespace citymesh {

// Undirected graph whose nodes are the faces of a mesh. Neighbor lists are
// kept sorted and duplicate-free.
class FaceGraph {
public:
  FaceGraph() = default;
  explicit FaceGraph(std::size_t nodeCount) : adjacency_(nodeCount) {}

  std::size_t nodeCount() const { return adjacency_.size(); }
  const std::vector<FaceIndex>& neighbors(FaceIndex f) const { return adjacency_[f]; }
  const std::vector<std::vector<FaceIndex>>& adjacency() const { return adjacency_; }
  std::optional<double> weldPrecision() const { return weldPrecision_; }

  bool adjacent(FaceIndex a, FaceIndex b) const {
    const auto& n = adjacency_[a];
    return std::binary_search(n.begin(), n.end(), b);
  }

  std::size_t edgeCount() const {
    std::size_t twice = 0;
    for (const auto& n : adjacency_)
      twice += n.size();
    return twice / 2;
  }

  // Undirected edges as (lo, hi) pairs, lexicographically sorted.
  std::vector<std::pair<FaceIndex, FaceIndex>> edges() const {
    std::vector<std::pair<FaceIndex, FaceIndex>> out;
    for (FaceIndex a = 0; a < adjacency_.size(); ++a)
      for (auto b : adjacency_[a])
        if (a < b)
          out.emplace_back(a, b);
    return out;
  }

private:
  friend class FaceGraphBuilder;
  std::vector<std::vector<FaceIndex>> adjacency_;
  std::optional<double> weldPrecision_;
};

// Accumulates edges, then normalizes them into a FaceGraph.
class FaceGraphBuilder {
public:
  explicit FaceGraphBuilder(std::size_t nodeCount) : adjacency_(nodeCount) {}
  explicit FaceGraphBuilder(const FaceGraph& base) : adjacency_(base.adjacency_) {}

  void link(FaceIndex a, FaceIndex b) {
    if (a == b)
      return;
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }

  FaceGraph build(std::optional<double> weldPrecision = std::nullopt) && {
    for (auto& n : adjacency_) {
      std::sort(n.begin(), n.end());
      n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    FaceGraph g;
    g.adjacency_ = std::move(adjacency_);
    g.weldPrecision_ = weldPrecision;
    return g;
  }

private:
  std::vector<std::vector<FaceIndex>> adjacency_;
};

namespace detail {

// vertex -> faces that use it
inline std::vector<std::vector<FaceIndex>> vertexFaces(const TriangleMesh& mesh) {
  std::vector<std::vector<FaceIndex>> incident(mesh.vertexCount());
  for (FaceIndex f = 0; f < mesh.faceCount(); ++f)
    for (auto v : mesh.faces()[f].vertexIndices)
      incident[v].push_back(f);
  return incident;
}

} // namespace detail

// Faces are adjacent iff they share at least one vertex index.
inline FaceGraph buildBaseGraph(const TriangleMesh& mesh) {
  FaceGraphBuilder builder(mesh.faceCount());
  for (const auto& faces : detail::vertexFaces(mesh))
    for (std::size_t i = 0; i < faces.size(); ++i)
      for (std::size_t j = i + 1; j < faces.size(); ++j)
        builder.link(faces[i], faces[j]);
  return std::move(builder).build();
}

// Adds edges between the faces of any two distinct vertices closer than 1/p.
// Candidates come from buckets keyed by floor(|v| * p); a pair within 1/p has
// norms differing by less than 1/p, so it always lands in the same or an
// adjacent bucket. The exact distance test decides.
inline FaceGraph weldGraph(const TriangleMesh& mesh, const FaceGraph& base, double precision) {
  if (!(precision > 0.0) || !std::isfinite(precision))
    throw ParameterError("weld precision must be a positive finite number");
  if (base.nodeCount() != mesh.faceCount())
    throw MeshMismatchError("graph node count does not match mesh face count");

  const double threshold = 1.0 / precision;
  const auto incident = detail::vertexFaces(mesh);
  const auto& positions = mesh.vertices();

  std::map<std::int64_t, std::vector<VertexIndex>> buckets;
  for (VertexIndex v = 0; v < positions.size(); ++v) {
    if (incident[v].empty())
      continue;
    const auto key = static_cast<std::int64_t>(std::floor(positions[v].norm() * precision));
    buckets[key].push_back(v);
  }

  FaceGraphBuilder builder(base);
  auto linkVertices = [&](VertexIndex u, VertexIndex v) {
    if ((positions[u] - positions[v]).norm() >= threshold)
      return;
    for (auto fu : incident[u])
      for (auto fv : incident[v])
        builder.link(fu, fv);
  };

  for (auto it = buckets.begin(); it != buckets.end(); ++it) {
    const auto& members = it->second;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        linkVertices(members[i], members[j]);
    // Lower buckets were paired with this one when they were visited. Key + 2
    // covers norms whose products with p round across two boundaries.
    for (std::int64_t step = 1; step <= 2; ++step) {
      const auto next = buckets.find(it->first + step);
      if (next == buckets.end())
        continue;
      for (auto u : members)
        for (auto v : next->second)
          linkVertices(u, v);
    }
  }
  return std::move(builder).build(precision);
}

// Maximal connected face sets. Component k is the one containing the k-th
// smallest "first face"; each component is sorted ascending.
inline std::vector<std::vector<FaceIndex>> connectedComponents(const FaceGraph& graph) {
  std::vector<std::vector<FaceIndex>> components;
  std::vector<bool> seen(graph.nodeCount(), false);
  for (FaceIndex start = 0; start < graph.nodeCount(); ++start) {
    if (seen[start])
      continue;
    std::vector<FaceIndex> component;
    std::queue<FaceIndex> frontier;
    frontier.push(start);
    seen[start] = true;
    while (!frontier.empty()) {
      const FaceIndex f = frontier.front();
      frontier.pop();
      component.push_back(f);
      for (auto n : graph.neighbors(f))
        if (!seen[n]) {
          seen[n] = true;
          frontier.push(n);
        }
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

} // namespace citymesh
