#pragma once

#include <citymesh/mesh.hpp>
#include <citymesh/selection.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace citymesh {

enum class SemanticClass : std::uint8_t {
  Unclassified,
  WallSurface,
  RoofSurface,
  GroundSurface,
  ClosureSurface,
  OuterCeilingSurface,
  OuterFloorSurface,
  Window,
  Door,
  BuildingInstallation,
};

inline constexpr std::array kAllSemanticClasses = {
    SemanticClass::Unclassified,        SemanticClass::WallSurface,       SemanticClass::RoofSurface,
    SemanticClass::GroundSurface,       SemanticClass::ClosureSurface,    SemanticClass::OuterCeilingSurface,
    SemanticClass::OuterFloorSurface,   SemanticClass::Window,            SemanticClass::Door,
    SemanticClass::BuildingInstallation};

inline std::string_view toString(SemanticClass cls) {
  switch (cls) {
  case SemanticClass::Unclassified: return "Unclassified";
  case SemanticClass::WallSurface: return "WallSurface";
  case SemanticClass::RoofSurface: return "RoofSurface";
  case SemanticClass::GroundSurface: return "GroundSurface";
  case SemanticClass::ClosureSurface: return "ClosureSurface";
  case SemanticClass::OuterCeilingSurface: return "OuterCeilingSurface";
  case SemanticClass::OuterFloorSurface: return "OuterFloorSurface";
  case SemanticClass::Window: return "Window";
  case SemanticClass::Door: return "Door";
  case SemanticClass::BuildingInstallation: return "BuildingInstallation";
  }
  return "Unclassified";
}

inline std::optional<SemanticClass> semanticClassFromString(std::string_view label) {
  for (auto cls : kAllSemanticClasses)
    if (toString(cls) == label)
      return cls;
  return std::nullopt;
}

inline bool isBoundarySurface(SemanticClass cls) {
  switch (cls) {
  case SemanticClass::WallSurface:
  case SemanticClass::RoofSurface:
  case SemanticClass::GroundSurface:
  case SemanticClass::ClosureSurface:
  case SemanticClass::OuterCeilingSurface:
  case SemanticClass::OuterFloorSurface: return true;
  default: return false;
  }
}

inline bool isOpening(SemanticClass cls) { return cls == SemanticClass::Window || cls == SemanticClass::Door; }

// Total map from face index to class; unassigned faces are Unclassified.
class SemanticMap {
public:
  SemanticMap() = default;
  explicit SemanticMap(std::size_t faceCount) : classes_(faceCount, SemanticClass::Unclassified) {}

  std::size_t faceCount() const { return classes_.size(); }
  SemanticClass operator[](FaceIndex f) const { return classes_.at(f); }
  const std::vector<SemanticClass>& classes() const { return classes_; }

  void set(FaceIndex f, SemanticClass cls) { classes_.at(f) = cls; }

  std::size_t count(SemanticClass cls) const {
    return static_cast<std::size_t>(std::count(classes_.begin(), classes_.end(), cls));
  }

  friend bool operator==(const SemanticMap&, const SemanticMap&) = default;

private:
  std::vector<SemanticClass> classes_;
};

// Every face in `sel` takes class `cls`; later assignments overwrite earlier ones.
inline SemanticMap assign(SemanticMap map, const Selection& sel, SemanticClass cls) {
  if (sel.faceCount() != map.faceCount())
    throw MeshMismatchError("selection and semantic map cover different meshes");
  for (auto f : sel.faces())
    map.set(f, cls);
  return map;
}

// Angular tolerances in degrees for suggestClasses.
struct SuggestThresholds {
  double roof = 45.0;
  double ground = 45.0;
  double wall = 45.0;
};

// Orientation heuristic: the angle between a face normal and UP picks roof,
// ground, or wall. Openings and installations are never suggested.
inline SemanticMap suggestClasses(const TriangleMesh& mesh, const SuggestThresholds& t = {}) {
  if (!(t.roof > 0.0 && t.ground > 0.0 && t.wall > 0.0))
    throw ParameterError("suggestion thresholds must be positive");
  SemanticMap map(mesh.faceCount());
  const Vec3& up = mesh.upVector();
  for (FaceIndex f = 0; f < mesh.faceCount(); ++f) {
    const double c = std::clamp(up.dot(mesh.faces()[f].normal), -1.0, 1.0);
    const double theta = std::acos(c) * 180.0 / std::numbers::pi;
    if (theta <= t.roof)
      map.set(f, SemanticClass::RoofSurface);
    else if (theta >= 180.0 - t.ground)
      map.set(f, SemanticClass::GroundSurface);
    else if (std::abs(theta - 90.0) <= t.wall)
      map.set(f, SemanticClass::WallSurface);
  }
  return map;
}

// Sidecar: one `faceIndex<TAB>classLabel` line per classified face. Lines
// starting with '#' are skipped so session headers can share the file.
inline void writeSidecar(std::ostream& out, const SemanticMap& map) {
  for (FaceIndex f = 0; f < map.faceCount(); ++f)
    if (map[f] != SemanticClass::Unclassified)
      out << f << '\t' << toString(map[f]) << '\n';
}

inline SemanticMap readSidecar(std::istream& in, std::size_t faceCount) {
  SemanticMap map(faceCount);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = detail::trim(raw);
    if (text.empty() || text.front() == '#')
      continue;
    const auto tab = text.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError(line, "expected 'faceIndex<TAB>classLabel'");
    const auto indexText = text.substr(0, tab);
    const auto label = detail::trim(text.substr(tab + 1));
    unsigned long long index = 0;
    const auto [ptr, ec] = std::from_chars(indexText.data(), indexText.data() + indexText.size(), index);
    if (ec != std::errc() || ptr != indexText.data() + indexText.size())
      throw ParseError(line, "malformed face index '" + std::string(indexText) + "'");
    if (index >= faceCount)
      throw ParseError(line, "face index " + std::to_string(index) + " out of range (mesh has " +
                                 std::to_string(faceCount) + " faces)");
    const auto cls = semanticClassFromString(label);
    if (!cls)
      throw ParseError(line, "unknown class label '" + std::string(label) + "'");
    map.set(static_cast<FaceIndex>(index), *cls);
  }
  return map;
}

} // namespace citymesh
