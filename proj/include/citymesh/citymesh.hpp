#pragma once

// Everything except the HTTP front end (citymesh/server.hpp).
#include <citymesh/citygml.hpp>
#include <citymesh/error.hpp>
#include <citymesh/face_graph.hpp>
#include <citymesh/mesh.hpp>
#include <citymesh/segmentation.hpp>
#include <citymesh/selection.hpp>
#include <citymesh/semantics.hpp>
#include <citymesh/session.hpp>
