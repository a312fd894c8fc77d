#pragma once

#include <citymesh/citygml.hpp>
#include <citymesh/face_graph.hpp>
#include <citymesh/mesh.hpp>
#include <citymesh/segmentation.hpp>
#include <citymesh/selection.hpp>
#include <citymesh/semantics.hpp>

#include <boost/beast/core/detail/base64.hpp>
#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

namespace citymesh {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Session file: '#'-prefixed header lines followed by the semantics sidecar.
//
//   # citymesh-session 1
//   # model-hash 9f0c3a1b22d4e5f6
//   # weld-precision 10          (or "none")
//   # up 0 0 1
//   0<TAB>WallSurface
//   ...
// ---------------------------------------------------------------------------

struct SessionFile {
  std::string modelHash;
  std::optional<double> weldPrecision;
  Vec3 up = Vec3::UnitZ();
  SemanticMap semantics;
};

// FNV-1a over the model file bytes, as 16 hex digits.
inline std::string hashModelBytes(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void writeSessionFile(std::ostream& out, const SessionFile& file) {
  std::string up;
  detail::appendNumber(up, file.up.x());
  up += ' ';
  detail::appendNumber(up, file.up.y());
  up += ' ';
  detail::appendNumber(up, file.up.z());
  out << "# citymesh-session 1\n";
  out << "# model-hash " << (file.modelHash.empty() ? "none" : file.modelHash) << '\n';
  out << "# weld-precision ";
  if (file.weldPrecision) {
    std::string p;
    detail::appendNumber(p, *file.weldPrecision);
    out << p;
  } else {
    out << "none";
  }
  out << '\n';
  out << "# up " << up << '\n';
  writeSidecar(out, file.semantics);
}

// Accepts a bare sidecar as well: missing header lines keep their defaults.
inline SessionFile readSessionFile(std::istream& in, std::size_t faceCount) {
  std::ostringstream body;
  body << in.rdbuf();
  const std::string text = body.str();

  SessionFile file;
  std::istringstream lines(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(lines, raw)) {
    ++line;
    const auto trimmed = detail::trim(raw);
    if (trimmed.empty() || trimmed.front() != '#')
      continue;
    const auto tokens = detail::splitWs(trimmed.substr(1));
    if (tokens.empty())
      continue;
    if (tokens[0] == "model-hash" && tokens.size() == 2) {
      file.modelHash = tokens[1] == "none" ? "" : std::string(tokens[1]);
    } else if (tokens[0] == "weld-precision" && tokens.size() == 2) {
      if (tokens[1] != "none")
        file.weldPrecision = detail::parseReal(tokens[1], line);
    } else if (tokens[0] == "up" && tokens.size() == 4) {
      file.up = Vec3(detail::parseReal(tokens[1], line), detail::parseReal(tokens[2], line),
                     detail::parseReal(tokens[3], line));
    }
  }
  std::istringstream sidecar(text);
  file.semantics = readSidecar(sidecar, faceCount);
  return file;
}

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

// Request failure reported to the client as {"code", "message"}.
class RequestError : public Error {
public:
  RequestError(std::string code, const std::string& message) : Error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

namespace detail {

template <class T>
std::string base64Of(const std::vector<T>& values) {
  static_assert(std::endian::native == std::endian::little, "mesh buffers are little-endian");
  namespace b64 = boost::beast::detail::base64;
  const std::size_t bytes = values.size() * sizeof(T);
  std::string out(b64::encoded_size(bytes), '\0');
  out.resize(b64::encode(out.data(), values.data(), bytes));
  return out;
}

inline Vec3 vec3From(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
    throw RequestError("bad_request", std::string(what) + " must be an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Non-negative integer, whether the parser stored it signed or unsigned.
inline bool isIndex(const Json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

inline Json jsonOf(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline const Json& field(const Json& req, const char* name) {
  if (!req.contains(name))
    throw RequestError("bad_request", std::string("missing field '") + name + "'");
  return req[name];
}

inline double numberField(const Json& req, const char* name) {
  const Json& j = field(req, name);
  if (!j.is_number())
    throw RequestError("bad_request", std::string("field '") + name + "' must be a number");
  return j.get<double>();
}

inline std::string stringField(const Json& req, const char* name) {
  const Json& j = field(req, name);
  if (!j.is_string())
    throw RequestError("bad_request", std::string("field '") + name + "' must be a string");
  return j.get<std::string>();
}

inline PickRay rayFrom(const Json& j) {
  if (!j.is_object())
    throw RequestError("bad_request", "ray must be an object with origin and direction");
  return PickRay::make(vec3From(field(j, "origin"), "origin"), vec3From(field(j, "direction"), "direction"));
}

inline Json selectionJson(const Selection& sel) {
  return {{"faces", sel.faces()}, {"count", sel.size()}, {"provenance", sel.provenance()}};
}

} // namespace detail

// Mutable editing state over one immutable mesh. handle() is safe to call
// from several threads: reads share a lock, mutations are serialized and
// each successful mutation bumps the revision by one.
class Session {
public:
  explicit Session(TriangleMesh mesh, std::string modelHash = {}, std::size_t droppedDegenerate = 0)
      : mesh_(std::move(mesh)), graph_(buildBaseGraph(mesh_)), active_(Selection::none(mesh_.faceCount())),
        semantics_(mesh_.faceCount()), modelHash_(std::move(modelHash)), dropped_(droppedDegenerate) {}

  static Session fromObjFile(const std::string& path) {
    const std::string bytes = readFile(path);
    auto loaded = loadObj(std::string_view(bytes));
    return Session(std::move(loaded.mesh), hashModelBytes(bytes), loaded.droppedDegenerate);
  }

  Json handle(const Json& request) {
    std::string op;
    try {
      if (!request.is_object())
        throw RequestError("bad_request", "request must be a JSON object");
      op = detail::stringField(request, "op");
      if (isMutation(op)) {
        std::unique_lock lock(mutex_);
        if (request.contains("revision") &&
            (!detail::isIndex(request["revision"]) || request["revision"].get<std::uint64_t>() != revision_))
          throw RequestError("stale_revision", "request was made against revision " + request["revision"].dump() +
                                                   ", current is " + std::to_string(revision_));
        Json body = mutate(op, request);
        ++revision_;
        return ok(std::move(body));
      }
      std::shared_lock lock(mutex_);
      return ok(read(op, request));
    } catch (const RequestError& e) {
      return failure(e.code(), e.what());
    } catch (const ParseError& e) {
      return failure("parse_error", e.what());
    } catch (const ParameterError& e) {
      return failure("parameter_error", e.what());
    } catch (const MeshMismatchError& e) {
      return failure("mesh_mismatch", e.what());
    } catch (const Json::exception& e) {
      return failure("bad_request", e.what());
    } catch (const Error& e) {
      return failure("error", e.what());
    }
  }

  std::uint64_t revision() const {
    std::shared_lock lock(mutex_);
    return revision_;
  }

  // Snapshot copies for in-process callers.
  Selection activeSelection() const {
    std::shared_lock lock(mutex_);
    return active_;
  }
  SemanticMap semantics() const {
    std::shared_lock lock(mutex_);
    return semantics_;
  }
  const TriangleMesh& mesh() const { return mesh_; }

  static bool isMutation(const std::string& op) {
    static const char* const ops[] = {"runSegmentation", "paint",       "select",         "setSelection",
                                      "saveSelection",   "combine",     "setWeldPrecision", "assignClass",
                                      "suggestClasses",  "setUpVector", "loadSession"};
    for (const char* m : ops)
      if (op == m)
        return true;
    return false;
  }

private:
  Json ok(Json body) const {
    if (body.is_null())
      body = Json::object();
    body["ok"] = true;
    body["revision"] = revision_;
    return body;
  }

  Json failure(const std::string& code, const std::string& message) const {
    return {{"ok", false}, {"revision", revision()}, {"error", {{"code", code}, {"message", message}}}};
  }

  // --- reads (shared lock held) ---

  Json read(const std::string& op, const Json& req) const {
    if (op == "getState")
      return state();
    if (op == "getMeshBuffers")
      return meshBuffers();
    if (op == "getSelection")
      return {{"selection", detail::selectionJson(active_)}};
    if (op == "pick") {
      const auto hit = pickFirstHit(mesh_, detail::rayFrom(detail::field(req, "ray")));
      if (!hit)
        return {{"face", nullptr}};
      return {{"face", hit->face}, {"t", hit->t}};
    }
    if (op == "getComponents") {
      const auto components = connectedComponents(graph_);
      return {{"count", components.size()}, {"components", components}};
    }
    if (op == "validate") {
      Json issues = Json::array();
      for (const auto& issue : validateFaces(mesh_))
        issues.push_back({{"face", issue.face}, {"code", static_cast<int>(issue.code)},
                          {"name", toString(issue.code)}});
      return {{"issues", issues}};
    }
    if (op == "export")
      return exportDocument(req);
    if (op == "saveSession") {
      const auto path = detail::stringField(req, "path");
      std::ofstream out(path, std::ios::binary);
      if (!out)
        throw RequestError("io_error", "cannot write '" + path + "'");
      writeSessionFile(out, {modelHash_, graph_.weldPrecision(), mesh_.upVector(), semantics_});
      return {{"path", path}};
    }
    throw RequestError("unknown_op", "unknown operation '" + op + "'");
  }

  Json state() const {
    Json saved = Json::array();
    for (const auto& [name, sel] : saved_)
      saved.push_back(name);
    Json classes = Json::object();
    for (auto cls : kAllSemanticClasses)
      classes[std::string(toString(cls))] = semantics_.count(cls);
    return {{"faceCount", mesh_.faceCount()},
            {"vertexCount", mesh_.vertexCount()},
            {"droppedDegenerate", dropped_},
            {"selection", detail::selectionJson(active_)},
            {"savedSelections", saved},
            {"weldPrecision", graph_.weldPrecision() ? Json(*graph_.weldPrecision()) : Json(nullptr)},
            {"upVector", detail::jsonOf(mesh_.upVector())},
            {"classCounts", classes},
            {"modelHash", modelHash_}};
  }

  // Flat little-endian arrays, base64 encoded:
  //   positions float32[3 * vertexCount], indices uint32[3 * faceCount],
  //   normals float32[3 * faceCount], classes uint8[faceCount] (classLabels
  //   maps the values), selected uint8[faceCount].
  Json meshBuffers() const {
    std::vector<float> positions;
    positions.reserve(mesh_.vertexCount() * 3);
    for (const auto& v : mesh_.vertices())
      for (int k = 0; k < 3; ++k)
        positions.push_back(static_cast<float>(v[k]));
    std::vector<std::uint32_t> indices;
    std::vector<float> normals;
    std::vector<std::uint8_t> classes, selected;
    for (FaceIndex f = 0; f < mesh_.faceCount(); ++f) {
      const auto& face = mesh_.faces()[f];
      for (int k = 0; k < 3; ++k) {
        indices.push_back(face.vertexIndices[k]);
        normals.push_back(static_cast<float>(face.normal[k]));
      }
      classes.push_back(static_cast<std::uint8_t>(semantics_[f]));
      selected.push_back(active_.contains(f) ? 1 : 0);
    }
    Json labels = Json::array();
    for (auto cls : kAllSemanticClasses)
      labels.push_back(toString(cls));
    return {{"encoding", "base64-le"},
            {"vertexCount", mesh_.vertexCount()},
            {"faceCount", mesh_.faceCount()},
            {"positions", detail::base64Of(positions)},
            {"indices", detail::base64Of(indices)},
            {"normals", detail::base64Of(normals)},
            {"classes", detail::base64Of(classes)},
            {"selected", detail::base64Of(selected)},
            {"classLabels", labels}};
  }

  Json exportDocument(const Json& req) const {
    ExportOptions options;
    options.graph = &graph_;
    if (req.contains("schemaLocations")) {
      const auto s = detail::stringField(req, "schemaLocations");
      if (s == "published")
        options.schemaLocations = SchemaLocations::AsPublished;
      else if (s == "citygml2")
        options.schemaLocations = SchemaLocations::CityGml2;
      else
        throw RequestError("bad_request", "schemaLocations must be 'published' or 'citygml2'");
    }
    if (req.contains("nestOpenings") && req["nestOpenings"].get<bool>())
      options.openings = OpeningPlacement::NestedInBoundary;
    const std::string name = req.contains("docName") ? detail::stringField(req, "docName") : "citymesh.gml";

    ExportReport report;
    const std::string document = exportCityGml(mesh_, semantics_, name, options, &report);
    Json body = {{"unclassifiedAsInstallation", report.unclassifiedAsInstallation}};
    if (req.contains("path")) {
      const auto path = detail::stringField(req, "path");
      std::ofstream out(path, std::ios::binary);
      if (!out || !out.write(document.data(), static_cast<std::streamsize>(document.size())))
        throw RequestError("io_error", "cannot write '" + path + "'");
      body["path"] = path;
      body["bytes"] = document.size();
    } else {
      body["document"] = document;
    }
    return body;
  }

  // --- mutations (exclusive lock held; revision bumped by caller on success) ---

  Json mutate(const std::string& op, const Json& req) {
    if (op == "runSegmentation") {
      auto result = segment(mesh_, graph_, segmentationRequest(req));
      active_ = result.selection;
      return {{"selection", detail::selectionJson(active_)},
              {"status", result.status == SegmentationStatus::Ok ? "ok" : "seed_rejected"},
              {"message", result.message}};
    }
    if (op == "paint") {
      const Json& raysJson = detail::field(req, "rays");
      if (!raysJson.is_array())
        throw RequestError("bad_request", "rays must be an array");
      std::vector<PickRay> rays;
      for (const auto& r : raysJson)
        rays.push_back(detail::rayFrom(r));
      const bool erase = req.value("erase", false);
      active_ = paintStroke(mesh_, rays, erase, active_);
      return {{"selection", detail::selectionJson(active_)}};
    }
    if (op == "select") {
      const auto what = detail::stringField(req, "what");
      if (what == "all")
        active_ = Selection::all(mesh_.faceCount());
      else if (what == "none")
        active_ = Selection::none(mesh_.faceCount());
      else if (what == "invert")
        active_ = active_.inverted();
      else
        throw RequestError("bad_request", "what must be 'all', 'none' or 'invert'");
      return {{"selection", detail::selectionJson(active_)}};
    }
    if (op == "setSelection") {
      active_ = Selection(mesh_.faceCount(), detail::field(req, "faces").get<std::vector<FaceIndex>>());
      return {{"selection", detail::selectionJson(active_)}};
    }
    if (op == "saveSelection") {
      const auto name = detail::stringField(req, "name");
      saved_.insert_or_assign(name, active_);
      return {{"name", name}, {"count", active_.size()}};
    }
    if (op == "combine") {
      const auto name = detail::stringField(req, "name");
      const auto it = saved_.find(name);
      if (it == saved_.end())
        throw RequestError("not_found", "no saved selection named '" + name + "'");
      active_ = combine(active_, it->second, setOpFrom(detail::stringField(req, "setOp")));
      return {{"selection", detail::selectionJson(active_)}};
    }
    if (op == "setWeldPrecision") {
      const Json& p = detail::field(req, "p");
      FaceGraph base = buildBaseGraph(mesh_);
      graph_ = p.is_null() ? std::move(base) : weldGraph(mesh_, base, detail::numberField(req, "p"));
      return {{"weldPrecision", p}, {"components", connectedComponents(graph_).size()}};
    }
    if (op == "assignClass") {
      const auto label = detail::stringField(req, "cls");
      const auto cls = semanticClassFromString(label);
      if (!cls)
        throw RequestError("bad_request", "unknown class '" + label + "'");
      semantics_ = assign(std::move(semantics_), active_, *cls);
      return {{"assigned", active_.size()}, {"cls", label}};
    }
    if (op == "suggestClasses") {
      SuggestThresholds t;
      t.roof = req.value("roof", t.roof);
      t.ground = req.value("ground", t.ground);
      t.wall = req.value("wall", t.wall);
      const SemanticMap suggested = suggestClasses(mesh_, t);
      std::size_t filled = 0;
      for (FaceIndex f = 0; f < mesh_.faceCount(); ++f)
        if (semantics_[f] == SemanticClass::Unclassified && suggested[f] != SemanticClass::Unclassified) {
          semantics_.set(f, suggested[f]);
          ++filled;
        }
      return {{"filled", filled}};
    }
    if (op == "setUpVector") {
      mesh_ = mesh_.withUpVector(detail::vec3From(detail::field(req, "v"), "v"));
      return {{"upVector", detail::jsonOf(mesh_.upVector())}};
    }
    if (op == "loadSession") {
      const auto path = detail::stringField(req, "path");
      std::ifstream in(path, std::ios::binary);
      if (!in)
        throw RequestError("io_error", "cannot open '" + path + "'");
      SessionFile file = readSessionFile(in, mesh_.faceCount());
      if (!file.modelHash.empty() && !modelHash_.empty() && file.modelHash != modelHash_)
        throw RequestError("model_mismatch", "session was recorded against a different model");
      TriangleMesh mesh = mesh_.withUpVector(file.up);
      FaceGraph base = buildBaseGraph(mesh);
      FaceGraph graph = file.weldPrecision ? weldGraph(mesh, base, *file.weldPrecision) : std::move(base);
      mesh_ = std::move(mesh);
      graph_ = std::move(graph);
      semantics_ = std::move(file.semantics);
      return {{"path", path}};
    }
    throw RequestError("unknown_op", "unknown operation '" + op + "'");
  }

  static SetOp setOpFrom(const std::string& name) {
    if (name == "union")
      return SetOp::Union;
    if (name == "difference")
      return SetOp::Difference;
    if (name == "intersection")
      return SetOp::Intersection;
    throw RequestError("bad_request", "setOp must be 'union', 'difference' or 'intersection'");
  }

  static SegmentationRequest segmentationRequest(const Json& req) {
    SegmentationRequest r;
    const auto modeName = detail::stringField(req, "mode");
    const auto mode = segmentationModeFromString(modeName);
    if (!mode)
      throw RequestError("bad_request", "unknown segmentation mode '" + modeName + "'");
    r.mode = *mode;
    const Json& seed = detail::field(req, "seed");
    if (!detail::isIndex(seed))
      throw RequestError("bad_request", "seed must be a non-negative integer");
    const auto seedValue = seed.get<std::uint64_t>();
    if (seedValue > std::numeric_limits<FaceIndex>::max())
      throw ParameterError("seed face " + std::to_string(seedValue) + " out of range");
    r.seedFace = static_cast<FaceIndex>(seedValue);
    if (req.contains("weight"))
      r.weight = detail::numberField(req, "weight");
    else if (req.contains("w"))
      r.weight = detail::numberField(req, "w");
    if (req.contains("params")) {
      const Json& p = req["params"];
      if (p.contains("lo") || p.contains("hi"))
        r.params.band = DotBand{p.value("lo", 0.0), p.value("hi", 1.0)};
      r.params.bandEpsilon = p.value("bandEpsilon", r.params.bandEpsilon);
      r.params.planarEpsilon = p.value("planarEpsilon", r.params.planarEpsilon);
      r.params.literalWall = p.value("literalWall", r.params.literalWall);
    }
    return r;
  }

  mutable std::shared_mutex mutex_;
  TriangleMesh mesh_;
  FaceGraph graph_;
  Selection active_;
  SemanticMap semantics_;
  std::map<std::string, Selection> saved_;
  std::uint64_t revision_ = 0;
  std::string modelHash_;
  std::size_t dropped_;
};

// Batch replay: model + session/sidecar file -> CityGML document at outPath.
// Returns a process exit status; diagnostics go to `err`.
struct ConvertOptions {
  std::string docName; // defaults to the output file name
  SchemaLocations schemaLocations = SchemaLocations::AsPublished;
  bool nestOpenings = false;
};

inline int cliConvert(const std::string& modelPath, const std::string& sessionPath, const std::string& outPath,
                      std::ostream& err, const ConvertOptions& convert = {}) {
  try {
    auto loaded = loadObjFile(modelPath);
    std::ifstream in(sessionPath, std::ios::binary);
    if (!in)
      throw Error("cannot open session file '" + sessionPath + "'");
    SessionFile session = readSessionFile(in, loaded.mesh.faceCount());

    const TriangleMesh mesh = loaded.mesh.withUpVector(session.up);
    ExportOptions options;
    options.schemaLocations = convert.schemaLocations;
    FaceGraph graph;
    if (convert.nestOpenings) {
      options.openings = OpeningPlacement::NestedInBoundary;
      graph = buildBaseGraph(mesh);
      if (session.weldPrecision)
        graph = weldGraph(mesh, graph, *session.weldPrecision);
      options.graph = &graph;
    }
    const std::string name =
        convert.docName.empty() ? std::filesystem::path(outPath).filename().string() : convert.docName;
    const std::string document = exportCityGml(mesh, session.semantics, name, options);

    std::ofstream out(outPath, std::ios::binary);
    if (!out || !out.write(document.data(), static_cast<std::streamsize>(document.size())))
      throw Error("cannot write '" + outPath + "'");
    return 0;
  } catch (const std::exception& e) {
    err << "convert: " << e.what() << '\n';
    return 1;
  }
}

} // namespace citymesh
