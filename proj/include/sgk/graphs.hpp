#pragma once
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sgk/error.hpp"

namespace sgk {

struct GraphEdge {
  std::string id;
  std::string u;
  std::string v;
  bool isLoop() const { return u == v; }
  bool operator==(const GraphEdge&) const = default;
};

struct DecorationType {
  bool vertexColors = false;
  bool edgeColors = false;
  bool directions = false;
  bool operator==(const DecorationType&) const = default;
};

// Abstract multigraph with optional decorations.  Vertices and edges are kept
// sorted by id; an absent decoration map means the decoration is switched off.
struct DecoratedGraph {
  std::vector<std::string> vertices;
  std::vector<GraphEdge> edges;
  std::optional<std::map<std::string, unsigned>> vertexColor;
  std::optional<std::map<std::string, unsigned>> edgeColor;
  std::optional<std::map<std::string, std::pair<std::string, std::string>>> edgeDirection;

  DecorationType type() const;
  void normalize();
  void validate() const;
  bool hasVertex(const std::string& v) const;
  const GraphEdge* edge(const std::string& id) const;
  std::size_t degree(const std::string& v) const;
  unsigned colorOf(const std::string& v) const;
  bool operator==(const DecoratedGraph&) const = default;
};

struct GraphIso {
  std::map<std::string, std::string> vertexMap;
  std::map<std::string, std::string> edgeMap;
  bool operator==(const GraphIso&) const = default;
};

// Decoration-preserving isomorphisms g1 -> g2 extending `pinned`, in the
// canonical order: vertices of g1 assigned in id order, candidates tried in id
// order, then parallel-edge bijections in lexicographic permutation order.
std::vector<GraphIso> iso_search(const DecoratedGraph& g1, const DecoratedGraph& g2,
                                 const std::map<std::string, std::string>& pinned = {},
                                 std::size_t limit = static_cast<std::size_t>(-1));

DecoratedGraph apply_iso(const GraphIso& iso, const DecoratedGraph& g);

// Canonical string for the decorated isomorphism class; falls back to a pure
// refinement invariant when the labelling search exceeds `searchCap`.
std::string canonical_form(const DecoratedGraph& g, std::size_t searchCap = 200000);

bool is_tree(const DecoratedGraph& g);
std::set<std::string> leaves(const DecoratedGraph& g);
std::size_t component_count(const DecoratedGraph& g);
std::vector<std::set<std::string>> components(const DecoratedGraph& g);
// Vertices lying in two or more abstract blocks; a loop is its own block.
std::set<std::string> abstract_cut_vertices(const DecoratedGraph& g);

DecoratedGraph induced_subgraph(const DecoratedGraph& g, const std::set<std::string>& vertices,
                                const std::set<std::string>& edges);
DecoratedGraph graph_disjoint_union(const DecoratedGraph& a, const DecoratedGraph& b,
                                    const std::string& prefixA = "a.", const std::string& prefixB = "b.");

struct TreeSkeleton {
  struct Link {
    std::string id;
    std::string i;
    std::string j;
    std::string v;
    bool operator==(const Link&) const = default;
  };
  std::vector<std::string> iNodes;
  std::vector<std::string> jNodes;
  std::vector<Link> links;

  void validate() const;
  void validate(const std::map<std::string, DecoratedGraph>& blockGraphs) const;
  std::vector<const Link*> linksAt(const std::string& node) const;
};

struct SkeletonIso {
  std::map<std::string, std::string> nodeMap;
  std::map<std::string, std::string> linkMap;
  bool operator==(const SkeletonIso&) const = default;
};

DecoratedGraph realized_underlying_graph(const TreeSkeleton& s,
                                         const std::map<std::string, DecoratedGraph>& blockGraphs);
std::vector<SkeletonIso> skeleton_isos(const TreeSkeleton& s1, const TreeSkeleton& s2);
std::map<std::string, std::string> cut_vertex_table(const TreeSkeleton& s,
                                                    const std::map<std::string, DecoratedGraph>& blockGraphs);

}  // namespace sgk
