#pragma once
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sgk/graphs.hpp"
#include "sgk/tri.hpp"

namespace sgk {

struct Region {
  enum class Kind { Vertex, Edge };
  Kind kind = Kind::Vertex;
  std::string id;
  std::optional<unsigned> color;
  bool operator==(const Region&) const = default;
};

// Exterior of a graph in S^3 with its boundary pattern.  Boundary faces of
// `manifold` carry the region index as FaceData::label; juncture edges and the
// positive (head) end of directed edges are flagged in the face masks.
struct MarkedExterior {
  Triangulation manifold;
  std::vector<Region> regions;  // vertex regions first, then edge regions, each in id order
  DecoratedGraph graph;

  int region_of_vertex(const std::string& v) const;
  int region_of_edge(const std::string& e) const;
};

struct ExteriorOptions {
  int depth = 2;  // order of the derived subdivision near the graph vertices
  bool simplify = true;
  SimplifyOptions simplifyOptions{100000000};
};

// Regions of a normalized graph in MarkedExterior order.
std::vector<Region> regions_of(const DecoratedGraph& g);

// Throws InvalidSubComplex for a broken subcomplex.
MarkedExterior build_exterior(const Triangulation& sphere, const SubComplex& graph, const DecoratedGraph& metadata,
                              const ExteriorOptions& opt = {});

MarkedExterior simplify_exterior(const MarkedExterior& me, const SimplifyOptions& opt = SimplifyOptions{100000000});

struct Juncture {
  int vertexRegion = -1;
  int edgeRegion = -1;
  bool positive = false;
  std::vector<int> edges;  // edge classes of the current skeleton, in cyclic order
};
std::vector<Juncture> junctures(const MarkedExterior& me);

struct RegionStats {
  int euler = 0;
  int triangles = 0;
  int junctures = 0;
  int component = -1;  // boundary component index
};
std::vector<RegionStats> region_stats(const MarkedExterior& me);

// Empty when every structural invariant holds.
std::vector<std::string> check_exterior(const MarkedExterior& me);

struct RegionSummary {
  struct Entry {
    Region region;
    int euler = 0;
    int junctures = 0;
    int component = -1;
  };
  struct Link {
    std::string vertexRegion;
    std::string edgeRegion;
    bool positive = false;
  };
  std::vector<int> componentEuler;
  std::vector<Entry> regions;
  std::vector<Link> links;
  std::string canonical;  // equal iff the labelled region structures agree
  std::string describe() const;
};
RegionSummary region_summary(const MarkedExterior& me);

struct FlattenedPattern {
  std::vector<std::array<int, 3>> triangles;  // boundary surface, oriented as the boundary of X
  std::vector<std::array<int, 2>> edges;      // the pattern, a 1-subcomplex of the triangles
};
FlattenedPattern flatten_pattern(const MarkedExterior& me);

// What a flattened pattern encodes, read back from the pattern alone.
struct PatternReading {
  struct Mark {
    std::array<int, 3> upArcs{};
    std::array<int, 3> downArcs{};
    bool closedTriangle = false;
    bool orientationAgrees = false;  // p1 -> p2 -> p3 runs positively around the vertex side
  };
  std::vector<Mark> marks;
  int boundaryComponents = 0;
};
PatternReading read_pattern(const FlattenedPattern& p);

// Caps every boundary component with a cone (after subdividing to a
// simplicial complex); boundary labels are dropped.
Triangulation cone_boundary(const Triangulation& t);
// One sphere boundary component, trivial homology, and the capped
// triangulation is a certified 3-sphere.
bool certify_ball(const Triangulation& t);

std::string graph_to_json(const DecoratedGraph& g);
DecoratedGraph graph_from_json(const std::string& text);
std::string exterior_to_json(const MarkedExterior& me);
MarkedExterior exterior_from_json(const std::string& text);
std::string summary_to_json(const RegionSummary& s);

}  // namespace sgk
