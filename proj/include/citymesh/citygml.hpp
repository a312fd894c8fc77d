#pragma once

#include <citymesh/face_graph.hpp>
#include <citymesh/mesh.hpp>
#include <citymesh/semantics.hpp>

#include <array>
#include <charconv>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace citymesh {

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// Numeric values follow the CityGML/val3dity ring error codes.
enum class FaceIssue : int {
  DuplicatePoint = 102,
  RingNotClosed = 103,
  Collinear = 104,
};

inline std::string_view toString(FaceIssue issue) {
  switch (issue) {
  case FaceIssue::DuplicatePoint: return "DUPLICATE_POINT";
  case FaceIssue::RingNotClosed: return "RING_NOT_CLOSED";
  case FaceIssue::Collinear: return "COLLINEAR";
  }
  return "?";
}

struct ValidationIssue {
  std::size_t face;
  FaceIssue code;
  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

namespace detail {

// Duplicate and collinear checks for one triangle; `scale` is the model's
// bounding-box diagonal.
inline std::optional<FaceIssue> triangleIssue(const Vec3& a, const Vec3& b, const Vec3& c, double scale) {
  const double dupTol = 1e-12 * scale;
  if ((a - b).norm() <= dupTol || (b - c).norm() <= dupTol || (a - c).norm() <= dupTol)
    return FaceIssue::DuplicatePoint;
  if (0.5 * (b - a).cross(c - a).norm() < 1e-12 * scale * scale)
    return FaceIssue::Collinear;
  return std::nullopt;
}

} // namespace detail

// Per-triangle ring checks. Self-intersection across faces is not examined.
inline std::vector<ValidationIssue> validateFaces(const TriangleSoup& soup) {
  std::vector<ValidationIssue> issues;
  const double scale = boundingBox(soup.vertices).diagonal();
  for (std::size_t f = 0; f < soup.triangles.size(); ++f) {
    const auto& t = soup.triangles[f];
    if (auto issue = detail::triangleIssue(soup.vertices[t[0]], soup.vertices[t[1]], soup.vertices[t[2]], scale))
      issues.push_back({f, *issue});
  }
  return issues;
}

inline std::vector<ValidationIssue> validateFaces(const TriangleMesh& mesh) {
  std::vector<ValidationIssue> issues;
  for (FaceIndex f = 0; f < mesh.faceCount(); ++f)
    if (auto issue = detail::triangleIssue(mesh.position(f, 0), mesh.position(f, 1), mesh.position(f, 2),
                                           mesh.diagonal()))
      issues.push_back({f, *issue});
  return issues;
}

// Checks a ring read back from a document: four positions, first == last,
// three distinct non-collinear points.
inline std::optional<FaceIssue> validateRing(std::span<const Vec3> ring, double scale) {
  if (ring.size() != 4 || ring.front() != ring.back())
    return FaceIssue::RingNotClosed;
  return detail::triangleIssue(ring[0], ring[1], ring[2], scale);
}

// ---------------------------------------------------------------------------
// Document model
// ---------------------------------------------------------------------------

struct TriangleRing {
  FaceIndex face;
  std::array<Vec3, 4> positions; // positions[3] == positions[0]
};

struct SurfaceGroup {
  SemanticClass cls;
  std::vector<TriangleRing> rings;
  std::vector<SurfaceGroup> openings; // only used on boundary surfaces
};

struct BuildingModel {
  std::string id = "Building";
  std::vector<SurfaceGroup> installations;
  std::vector<SurfaceGroup> boundaries;
  std::vector<SurfaceGroup> openings; // openings placed directly under the building
};

struct CityDocument {
  std::string name;
  std::vector<BuildingModel> buildings;
};

enum class SchemaLocations { AsPublished, CityGml2 };
enum class OpeningPlacement { Flat, NestedInBoundary };

struct ExportOptions {
  SchemaLocations schemaLocations = SchemaLocations::AsPublished;
  OpeningPlacement openings = OpeningPlacement::Flat;
  // Adjacency used to parent openings when nesting; base graph if null.
  const FaceGraph* graph = nullptr;
  std::string description = "citymesh";
};

struct ExportReport {
  std::size_t unclassifiedAsInstallation = 0;
};

namespace detail {

inline TriangleRing makeRing(const TriangleMesh& mesh, FaceIndex f) {
  const Vec3& a = mesh.position(f, 0);
  return {f, {a, mesh.position(f, 1), mesh.position(f, 2), a}};
}

inline SurfaceGroup makeGroup(const TriangleMesh& mesh, SemanticClass cls, const std::vector<FaceIndex>& faces) {
  SurfaceGroup g{cls, {}, {}};
  g.rings.reserve(faces.size());
  for (auto f : faces)
    g.rings.push_back(makeRing(mesh, f));
  return g;
}

} // namespace detail

// Groups faces by class. Unclassified faces join the BuildingInstallation group.
inline CityDocument buildCityDocument(const TriangleMesh& mesh, const SemanticMap& map, std::string name,
                                      const ExportOptions& options = {}, ExportReport* report = nullptr) {
  if (mesh.empty())
    throw Error("cannot export an empty mesh");
  if (map.faceCount() != mesh.faceCount())
    throw MeshMismatchError("semantic map does not cover the mesh faces");

  std::map<SemanticClass, std::vector<FaceIndex>> byClass;
  std::size_t unclassified = 0;
  for (FaceIndex f = 0; f < mesh.faceCount(); ++f) {
    SemanticClass cls = map[f];
    if (cls == SemanticClass::Unclassified) {
      cls = SemanticClass::BuildingInstallation;
      ++unclassified;
    }
    byClass[cls].push_back(f);
  }
  if (report)
    report->unclassifiedAsInstallation = unclassified;

  BuildingModel building;
  for (auto cls : kAllSemanticClasses) {
    const auto it = byClass.find(cls);
    if (it == byClass.end())
      continue;
    SurfaceGroup group = detail::makeGroup(mesh, cls, it->second);
    if (isBoundarySurface(cls))
      building.boundaries.push_back(std::move(group));
    else if (isOpening(cls))
      building.openings.push_back(std::move(group));
    else
      building.installations.push_back(std::move(group));
  }

  if (options.openings == OpeningPlacement::NestedInBoundary && !building.boundaries.empty()) {
    FaceGraph base;
    const FaceGraph* graph = options.graph;
    if (!graph) {
      base = buildBaseGraph(mesh);
      graph = &base;
    }
    if (graph->nodeCount() != mesh.faceCount())
      throw MeshMismatchError("graph node count does not match mesh face count");

    std::vector<SurfaceGroup> flat;
    for (auto& opening : building.openings) {
      // Parent = boundary group with the most graph edges to the opening;
      // ties go to the earlier class (WallSurface first).
      std::size_t best = building.boundaries.size();
      std::size_t bestEdges = 0;
      for (std::size_t b = 0; b < building.boundaries.size(); ++b) {
        std::size_t edges = 0;
        for (const auto& ring : opening.rings)
          for (auto n : graph->neighbors(ring.face))
            if (map[n] == building.boundaries[b].cls)
              ++edges;
        if (edges > bestEdges) {
          bestEdges = edges;
          best = b;
        }
      }
      if (best == building.boundaries.size())
        flat.push_back(std::move(opening));
      else
        building.boundaries[best].openings.push_back(std::move(opening));
    }
    building.openings = std::move(flat);
  }

  CityDocument doc;
  doc.name = std::move(name);
  doc.buildings.push_back(std::move(building));
  return doc;
}

// ---------------------------------------------------------------------------
// XML writer
// ---------------------------------------------------------------------------

namespace detail {

// Shortest decimal that parses back to the same double.
inline void appendNumber(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

inline std::string formatPos(const Vec3& p) {
  std::string s;
  appendNumber(s, p.x());
  s.push_back(' ');
  appendNumber(s, p.y());
  s.push_back(' ');
  appendNumber(s, p.z());
  return s;
}

inline std::string escapeXml(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out.push_back(c);
    }
  }
  return out;
}

inline constexpr std::string_view kPublishedSchemaLocations =
    "http://schemas.opengis.net/citygml/relief/1.0/relief.xsd "
    "http://schemas.opengis.net/citygml/landuse/1.0/landUse.xsd "
    "http://schemas.opengis.net/citygml/building/1.0/building.xsd "
    "http://schemas.opengis.net/citygml/cityobjectgroup/1.0/cityObjectGroup.xsd "
    "http://schemas.opengis.net/citygml/cityfurniture/1.0/cityFurniture.xsd "
    "http://schemas.opengis.net/citygml/appearance/1.0/appearance.xsd "
    "http://schemas.opengis.net/citygml/texturedsurface/1.0/texturedSurface.xsd "
    "http://schemas.opengis.net/citygml/transportation/1.0/transportation.xsd "
    "http://schemas.opengis.net/citygml/waterbody/1.0/waterBody.xsd "
    "http://schemas.opengis.net/citygml/vegetation/1.0/vegetation.xsd "
    "http://schemas.opengis.net/citygml/generics/1.0/generics.xsd";

inline constexpr std::string_view kCityGml2SchemaLocations =
    "http://www.opengis.net/citygml/2.0 http://schemas.opengis.net/citygml/2.0/cityGMLBase.xsd "
    "http://www.opengis.net/citygml/building/2.0 http://schemas.opengis.net/citygml/building/2.0/building.xsd";

class XmlWriter {
public:
  explicit XmlWriter(std::string& out, int depth = 0) : out_(out), depth_(depth) {}

  void open(std::string_view tag, std::string_view attrs = {}) {
    indent();
    out_ += '<';
    out_ += tag;
    if (!attrs.empty()) {
      out_ += ' ';
      out_ += attrs;
    }
    out_ += ">\n";
    ++depth_;
  }

  void close(std::string_view tag) {
    --depth_;
    indent();
    out_ += "</";
    out_ += tag;
    out_ += ">\n";
  }

  void leaf(std::string_view tag, std::string_view text) {
    indent();
    out_ += '<';
    out_ += tag;
    out_ += '>';
    out_ += text;
    out_ += "</";
    out_ += tag;
    out_ += ">\n";
  }

private:
  void indent() { out_.append(static_cast<std::size_t>(depth_) * 2, ' '); }

  std::string& out_;
  int depth_;
};

inline std::string gmlId(std::string_view id) { return "gml:id=\"" + escapeXml(id) + "\""; }

inline void writeMultiSurface(XmlWriter& xml, const SurfaceGroup& group, std::string_view idClass) {
  xml.open("gml:MultiSurface");
  for (const auto& ring : group.rings) {
    xml.open("gml:surfaceMember");
    xml.open("gml:Polygon", gmlId(std::string(idClass) + "_" + std::to_string(ring.face)));
    xml.open("gml:exterior");
    xml.open("gml:LinearRing");
    for (const auto& p : ring.positions)
      xml.leaf("gml:pos", formatPos(p));
    xml.close("gml:LinearRing");
    xml.close("gml:exterior");
    xml.close("gml:Polygon");
    xml.close("gml:surfaceMember");
  }
  xml.close("gml:MultiSurface");
}

inline void writeFeature(XmlWriter& xml, const SurfaceGroup& group, std::string_view geometryProperty);

inline void writeOpening(XmlWriter& xml, const SurfaceGroup& opening) {
  xml.open("bldg:opening");
  writeFeature(xml, opening, "bldg:lod3MultiSurface");
  xml.close("bldg:opening");
}

inline void writeFeature(XmlWriter& xml, const SurfaceGroup& group, std::string_view geometryProperty) {
  const std::string cls(toString(group.cls));
  const std::string tag = "bldg:" + cls;
  xml.open(tag, gmlId(cls));
  xml.open(geometryProperty);
  writeMultiSurface(xml, group, cls);
  xml.close(geometryProperty);
  for (const auto& opening : group.openings)
    writeOpening(xml, opening);
  xml.close(tag);
}

} // namespace detail

inline std::string writeCityGml(const CityDocument& doc, const ExportOptions& options = {}) {
  using detail::escapeXml;
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<CityModel xmlns=\"http://www.opengis.net/citygml/2.0\"\n"
         "  xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n"
         "  xmlns:xlink=\"http://www.w3.org/1999/xlink\"\n"
         "  xmlns:smil20=\"http://www.w3.org/2001/SMIL20/\"\n"
         "  xmlns:blgd=\"http://www.opengis.net/citygml/building/2.0\"\n"
         "  xmlns:frn=\"http://www.opengis.net/citygml/cityfurniture/2.0\"\n"
         "  xmlns:grp=\"http://www.opengis.net/citygml/cityobjectgroup/2.0\"\n"
         "  xmlns:luse=\"http://www.opengis.net/citygml/landuse/2.0\"\n"
         "  xmlns:tex=\"http://www.opengis.net/citygml/texturedsurface/2.0\"\n"
         "  xmlns:tun=\"http://www.opengis.net/citygml/tunnel/2.0\"\n"
         "  xmlns:wtr=\"http://www.opengis.net/citygml/waterbody/2.0\"\n"
         "  xmlns:bldg=\"http://www.opengis.net/citygml/building/2.0\"\n"
         "  xmlns:core=\"http://www.opengis.net/citygml/2.0\"\n"
         "  xmlns:gml=\"http://www.opengis.net/gml\"\n"
         "  xsi:schemaLocation=\"";
  out += options.schemaLocations == SchemaLocations::AsPublished ? detail::kPublishedSchemaLocations
                                                                  : detail::kCityGml2SchemaLocations;
  out += "\">\n";

  // children of the already-open root element
  detail::XmlWriter xml(out, 1);
  xml.leaf("gml:description", escapeXml(options.description));
  xml.leaf("gml:name", escapeXml(doc.name));
  for (const auto& building : doc.buildings) {
    xml.open("core:cityObjectMember");
    xml.open("bldg:Building", detail::gmlId(building.id));
    for (const auto& group : building.installations) {
      xml.open("bldg:outerBuildingInstallation");
      detail::writeFeature(xml, group, "bldg:lod3Geometry");
      xml.close("bldg:outerBuildingInstallation");
    }
    for (const auto& group : building.boundaries) {
      xml.open("bldg:boundedBy");
      detail::writeFeature(xml, group, "bldg:lod3MultiSurface");
      xml.close("bldg:boundedBy");
    }
    for (const auto& opening : building.openings)
      detail::writeOpening(xml, opening);
    xml.close("bldg:Building");
    xml.close("core:cityObjectMember");
  }
  out += "</CityModel>\n";
  return out;
}

inline std::string exportCityGml(const TriangleMesh& mesh, const SemanticMap& map, std::string docName,
                                 const ExportOptions& options = {}, ExportReport* report = nullptr) {
  return writeCityGml(buildCityDocument(mesh, map, std::move(docName), options, report), options);
}

} // namespace citymesh
