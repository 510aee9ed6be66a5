#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sgk/exterior.hpp"
#include "sgk/tri.hpp"

namespace sgk {

// Seven coordinates per tetrahedron: triangles at vertices 0..3, then the
// quads 01|23, 02|13, 03|12.
struct NormalCoordinates {
  std::vector<std::int64_t> v;

  std::size_t tets() const { return v.size() / 7; }
  std::int64_t tri(std::size_t tet, int vertex) const { return v[7 * tet + vertex]; }
  std::int64_t quad(std::size_t tet, int type) const { return v[7 * tet + 4 + type]; }
  bool operator==(const NormalCoordinates&) const = default;
  bool operator<(const NormalCoordinates& o) const { return v < o.v; }
};

// Quad type whose two vertex pairs keep a and b together.
int quad_type(int a, int b);

struct MatchingSystem {
  std::size_t unknowns = 0;
  std::vector<std::vector<std::pair<int, int>>> equations;  // sparse rows: (column, coefficient)
};
MatchingSystem matching_system(const Triangulation& t);
MatchingSystem matching_system(const MarkedExterior& me);

bool satisfies_matching(const Triangulation& t, const NormalCoordinates& nc);
bool is_admissible(const NormalCoordinates& nc);
// Number of points in which the surface meets an edge of tetrahedron `tet`.
std::int64_t edge_weight(const NormalCoordinates& nc, std::size_t tet, int a, int b);

struct EnumerationBudget {
  std::size_t maxRays = 40000;  // vertex rays kept at any stage
  std::size_t maxPairs = 400000000;  // candidate pairs examined overall
  double wallSeconds = 60;
};

struct Enumeration {
  std::vector<NormalCoordinates> surfaces;  // sorted, primitive
  bool complete = true;
  std::string reason;  // why the enumeration stopped early
  std::size_t peakRays = 0;
};

// Admissible vertex rays of the matching cone intersected with the face on
// which the coordinates flagged in `forcedZero` vanish.
Enumeration enumerate_vertex_surfaces(const Triangulation& t, const std::vector<char>& forcedZero,
                                      const EnumerationBudget& budget = {});
// cleanOnly: every disc meeting a juncture edge is forced to zero.
Enumeration vertex_normal_surfaces(const MarkedExterior& me, bool cleanOnly, const EnumerationBudget& budget = {});

// Forced-zero masks for common faces of the cone.
std::vector<char> zero_on_boundary(const Triangulation& t);
std::vector<char> zero_on_edges(const Triangulation& t, const std::vector<char>& edgeClasses);

struct SurfaceAnalysis {
  struct Curve {
    std::set<int> regions;  // labels of the boundary faces it runs through
    int arcs = 0;
    int junctureCrossings = 0;
  };
  struct Side {
    int euler = 0;
    bool touchesJuncture = false;
  };
  long eulerChar = 0;
  bool closed = true;
  bool connected = false;
  int componentCount = 0;
  std::vector<Curve> boundaryCurves;
  // For a single boundary curve: the two sides of it in its boundary component
  // (empty when the curve does not separate the component).
  std::vector<Side> curveSides;
  // For a connected surface cutting the manifold in two: boundary components
  // met by each side.
  std::vector<std::set<int>> sidePartition;
};
SurfaceAnalysis analyze(const MarkedExterior& me, const NormalCoordinates& nc);

struct SurfaceSearch {
  enum class Status { Found, None, Unknown };
  Status status = Status::None;
  std::optional<NormalCoordinates> surface;
  int region = -1;  // region holding the boundary of a found disc
  std::string reason;
};

// A connected closed normal sphere with boundary components on both sides.
SurfaceSearch find_reducing_sphere(const MarkedExterior& me, const EnumerationBudget& budget = {});
// A clean normal disc whose boundary is essential in its region minus the
// junctures.  `regions` restricts the search (all regions when empty).
// Exhausting the candidates is reported as Unknown, never as None.
SurfaceSearch find_clean_reducing_disc(const MarkedExterior& me, const EnumerationBudget& budget = {},
                                       const std::vector<int>& regions = {});

// Cuts along a reducing sphere and caps both copies with cones; the output
// holding the smaller region index comes first.
std::pair<MarkedExterior, MarkedExterior> split_along_sphere(const MarkedExterior& me, const NormalCoordinates& s);

struct DiscSplit {
  MarkedExterior first;
  MarkedExterior second;
  std::string vertex;  // the vertex both summands share
};
DiscSplit split_along_disc(const MarkedExterior& me, const NormalCoordinates& d);

std::string coordinates_to_json(const NormalCoordinates& nc);
std::string analysis_to_json(const SurfaceAnalysis& a);

}  // namespace sgk
