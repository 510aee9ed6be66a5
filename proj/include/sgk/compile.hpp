#pragma once
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sgk/diagram.hpp"
#include "sgk/graphs.hpp"
#include "sgk/tri.hpp"

namespace sgk {

struct Point2 {
  double x = 0;
  double y = 0;
};

// Straight-line drawing of the diagram: node positions and, per arc, a
// polyline from arcEnds[0] to arcEnds[1].
struct PlanarLayout {
  std::map<std::string, Point2> nodes;
  std::map<std::string, std::vector<Point2>> arcs;
  std::set<std::string> crossings;
};

PlanarLayout planar_layout(const Diagram& d);
// Re-traces every rotation from the drawing's angles and checks the polylines
// meet only at shared endpoints.
bool layout_realizes(const Diagram& d, const PlanarLayout& layout);

struct CompiledGraph {
  Triangulation sphere;
  SubComplex graph;         // vertices by vertex id, edge paths by edge id
  DecoratedGraph metadata;  // underlying graph with decorations
};

CompiledGraph compile_to_sphere(const Diagram& d);

// Throws InvalidSubComplex unless the marked vertices are distinct, every
// path is a chain of edges between the right endpoints, and paths meet only
// at their ends.
void validate_subcomplex(const Triangulation& t, const SubComplex& sub, const DecoratedGraph& metadata);

// Graph read back from the subcomplex: one vertex per marked vertex, one edge
// per path joining the marked vertices at its ends.
DecoratedGraph graph_from_subcomplex(const Triangulation& t, const SubComplex& sub, const DecoratedGraph& metadata);

struct SphereReport {
  bool closed = false;
  bool orientable = false;
  HomologyProfile homology;
  bool homologyConsistent = false;
  std::size_t simplifiedSize = 0;
  std::string status;  // "certified", "homology-consistent" or "failed"
  std::vector<std::string> problems;
};

SphereReport verify_sphere(const Triangulation& t, const SimplifyOptions& opt = {});

std::string write_sub(const SubComplex& sub, const DecoratedGraph& metadata);
std::pair<SubComplex, DecoratedGraph> read_sub(const std::string& text);

}  // namespace sgk
