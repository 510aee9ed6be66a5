#pragma once
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sgk/graphs.hpp"

namespace sgk {

struct VertexNode {
  std::string id;
  std::vector<std::string> rotation;  // counterclockwise arc labels
  std::set<std::size_t> outSlots;     // slots a single-arc directed loop leaves through
  std::optional<unsigned> color;
  bool operator==(const VertexNode&) const = default;
};

// Arcs listed counterclockwise; the strand arcs[0]-arcs[2] passes under arcs[1]-arcs[3].
struct Crossing {
  std::string id;
  std::array<std::string, 4> arcs;
  bool operator==(const Crossing&) const = default;
};

struct DiagramEdge {
  std::string id;
  std::vector<std::string> arcs;  // in traversal order
  std::optional<unsigned> color;
  std::optional<std::pair<std::string, std::string>> direction;
  bool operator==(const DiagramEdge&) const = default;
};

struct Diagram {
  std::vector<VertexNode> vertices;
  std::vector<Crossing> crossings;
  std::vector<DiagramEdge> edges;
  bool operator==(const Diagram&) const = default;
};

// Derived combinatorics of a validated diagram.  Nodes are the vertices
// followed by the crossings; a slot is (node, position in its rotation).
struct DiagramInfo {
  struct Slot {
    int node = -1;
    int pos = -1;
    bool operator==(const Slot&) const = default;
    bool operator<(const Slot& o) const { return node != o.node ? node < o.node : pos < o.pos; }
  };
  struct Step {  // traversal of one arc inside an edge
    std::string arc;
    Slot from;
    Slot to;
  };
  int vertexCount = 0;
  int crossingCount = 0;
  std::vector<std::vector<std::string>> rotation;  // per node
  std::map<std::string, std::array<Slot, 2>> arcEnds;
  std::map<std::string, std::string> arcEdge;
  std::map<std::string, std::vector<Step>> edgeSteps;  // per edge id, traversal order
  std::map<std::string, std::pair<std::string, std::string>> edgeEnds;  // start/end vertex ids
  std::vector<std::vector<Slot>> faces;                 // darts with the face on their left
  std::vector<int> nodeComponent;
  int componentCount = 0;

  bool isVertex(int node) const { return node < vertexCount; }
  Slot twin(const Slot& s) const;
  Slot faceNext(const Slot& s) const;
};

DecorationType diagram_decoration_type(const Diagram& d);

Diagram parse(const std::string& text);
Diagram parse_file(const std::string& path);
std::string render(const Diagram& d);
DiagramInfo validate(const Diagram& d);

DecoratedGraph underlying_graph(const Diagram& d);
Diagram disjoint_union(const Diagram& d1, const Diagram& d2);
Diagram vertex_sum(const Diagram& d1, const std::string& v1, const Diagram& d2, const std::string& v2);
// Swaps over and under at every crossing; twice is the identity up to the starting slot.
Diagram mirror(const Diagram& d);
Diagram relabel_prefix(const Diagram& d, const std::string& prefix);

// Sub-diagram presenting the sub-graph on the given vertices and edges;
// crossings involving a dropped strand are resolved.
Diagram restrict_diagram(const Diagram& d, const std::set<std::string>& vertices,
                         const std::set<std::string>& edges);

// Recolour vertices (adds a vertex colouring when absent; missing entries become 0).
Diagram recolor_vertices(const Diagram& d, const std::map<std::string, unsigned>& colors);

struct CanonicalDiagram {
  Diagram diagram;                            // canonical labels v*, c*, a*, e*
  std::string code;                           // equal iff related by an orientation-preserving relabelling
  std::map<std::string, std::string> vertexMap;  // original id -> canonical id
  std::map<std::string, std::string> edgeMap;
};
CanonicalDiagram canonical_diagram(const Diagram& d);

}  // namespace sgk
