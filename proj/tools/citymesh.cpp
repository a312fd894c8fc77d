// citymesh command line: interactive session server and batch tools.
#include <citymesh/citymesh.hpp>
#include <citymesh/server.hpp>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

void configureLogging() {
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("CITYMESH_LOG"))
    spdlog::set_level(spdlog::level::from_str(level));
}

int runServe(const std::string& host, int port, const std::string& model) {
  auto session = citymesh::Session::fromObjFile(model);
  const auto& mesh = session.mesh();
  spdlog::info("loaded {}: {} vertices, {} faces", model, mesh.vertexCount(), mesh.faceCount());
  citymesh::SessionServer server(session, [](const std::string& op, bool ok) {
    if (ok)
      spdlog::debug("rpc {}", op);
    else
      spdlog::warn("rpc {} failed", op);
  });
  spdlog::info("listening on http://{}:{}/rpc", host, port);
  if (!server.listen(host, port)) {
    spdlog::error("cannot listen on {}:{}", host, port);
    return 1;
  }
  return 0;
}

int runValidate(const std::string& model) {
  std::ifstream in(model, std::ios::binary);
  if (!in)
    throw citymesh::Error("cannot open model file '" + model + "'");
  const auto soup = citymesh::parseObj(in);
  const auto issues = citymesh::validateFaces(soup);
  for (const auto& issue : issues)
    std::cout << issue.face << '\t' << static_cast<int>(issue.code) << '\t' << citymesh::toString(issue.code) << '\n';
  std::cout << soup.triangles.size() << " triangles, " << issues.size() << " issues\n";
  return issues.empty() ? 0 : 1;
}

int runInfo(const std::string& model) {
  const auto loaded = citymesh::loadObjFile(model);
  const auto& mesh = loaded.mesh;
  const auto components = citymesh::connectedComponents(citymesh::buildBaseGraph(mesh));
  const auto& box = mesh.bounds();
  std::cout << "vertices\t" << mesh.vertexCount() << '\n'
            << "faces\t" << mesh.faceCount() << '\n'
            << "dropped_degenerate\t" << loaded.droppedDegenerate << '\n'
            << "components\t" << components.size() << '\n';
  if (!box.empty())
    std::cout << "bbox_min\t" << box.min.x() << ' ' << box.min.y() << ' ' << box.min.z() << '\n'
              << "bbox_max\t" << box.max.x() << ' ' << box.max.y() << ' ' << box.max.z() << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  configureLogging();
  CLI::App app{"citymesh: triangle-mesh building models to CityGML 2.0 LOD3"};
  app.require_subcommand(1);

  std::string model, session, out, name, host = "127.0.0.1";
  int port = 8080;
  bool citygml2Schema = false, nestOpenings = false;

  auto* serve = app.add_subcommand("serve", "serve an interactive editing session over HTTP/JSON");
  serve->add_option("--model", model, "OBJ model")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--host", host, "bind address")->capture_default_str();

  auto* convert = app.add_subcommand("convert", "write CityGML from a model and a saved session");
  convert->add_option("--model", model, "OBJ model")->required();
  convert->add_option("--session", session, "session or sidecar file")->required();
  convert->add_option("--out", out, "output .gml path")->required();
  convert->add_option("--name", name, "gml:name (defaults to the output file name)");
  convert->add_flag("--citygml2-schema", citygml2Schema, "emit CityGML 2.0 schemaLocation pairs");
  convert->add_flag("--nest-openings", nestOpenings, "place openings inside their boundary surface");

  auto* validate = app.add_subcommand("validate", "report per-triangle ring issues");
  validate->add_option("--model", model, "OBJ model")->required();

  auto* info = app.add_subcommand("info", "print model statistics");
  info->add_option("--model", model, "OBJ model")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve)
      return runServe(host, port, model);
    if (*convert) {
      citymesh::ConvertOptions options;
      options.docName = name;
      options.schemaLocations =
          citygml2Schema ? citymesh::SchemaLocations::CityGml2 : citymesh::SchemaLocations::AsPublished;
      options.nestOpenings = nestOpenings;
      const int status = citymesh::cliConvert(model, session, out, std::cerr, options);
      if (status == 0)
        spdlog::info("wrote {}", out);
      return status;
    }
    if (*validate)
      return runValidate(model);
    if (*info)
      return runInfo(model);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
