#pragma once
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgk/error.hpp"

namespace sgk {

// Permutation of {0,1,2,3}, stored as the images of 0..3.
struct Perm4 {
  std::array<std::uint8_t, 4> m{0, 1, 2, 3};

  Perm4() = default;
  Perm4(int a, int b, int c, int d) : m{std::uint8_t(a), std::uint8_t(b), std::uint8_t(c), std::uint8_t(d)} {}
  int operator[](int i) const { return m[i]; }
  Perm4 inverse() const;
  Perm4 operator*(const Perm4& o) const;  // (p*q)(i) = p(q(i))
  int sign() const;
  int index() const;  // position among the 24 permutations in lexicographic order
  static Perm4 from_index(int k);
  static Perm4 transposition(int a, int b);
  std::string str() const;
  bool operator==(const Perm4&) const = default;
  bool operator<(const Perm4& o) const { return m < o.m; }
};

// Boundary decoration of a tetrahedron face.  Edge masks are indexed by the
// tetrahedron vertex of the face that is opposite the edge inside the face.
struct FaceData {
  int label = -1;
  std::uint8_t juncture = 0;
  std::uint8_t positive = 0;
  bool operator==(const FaceData&) const = default;
};

struct Gluing {
  int tet = -1;  // -1: boundary
  Perm4 perm;    // this tet's vertices -> neighbour's vertices
  bool boundary() const { return tet < 0; }
  bool operator==(const Gluing&) const = default;
};

struct Triangulation {
  std::vector<std::array<Gluing, 4>> adj;
  std::vector<std::array<FaceData, 4>> face;
  std::vector<char> locked;

  std::size_t size() const { return adj.size(); }
  int add_tet();
  void join(int t, int f, int n, const Perm4& p);
  void unjoin(int t, int f);
  bool operator==(const Triangulation&) const = default;
};

// Tetrahedron edge numbering: 0:01 1:02 2:03 3:12 4:13 5:23.
int edge_index(int a, int b);
std::array<int, 2> edge_vertices(int e);

struct EdgeRef {
  int tet = 0;
  int a = 0;  // oriented a -> b
  int b = 1;
  bool operator==(const EdgeRef&) const = default;
};

// Vertices and edge paths of a triangulation, named by representative corners.
struct SubComplex {
  std::map<std::string, std::pair<int, int>> vertices;  // name -> (tet, vertex)
  std::map<std::string, std::vector<EdgeRef>> edgePaths;
};

struct Skeleton {
  int nVertices = 0;
  int nEdges = 0;
  int nTriangles = 0;
  std::vector<std::array<int, 4>> tetVertex;
  std::vector<std::array<int, 6>> tetEdge;
  std::vector<std::array<int, 6>> tetEdgeSign;  // +1 if a<b runs along the class orientation
  std::vector<std::array<int, 4>> tetTriangle;
  std::vector<std::array<int, 4>> tetTriangleSign;  // orientation of ascending order vs class
  std::vector<std::array<int, 2>> edgeEnds;          // vertex classes, class orientation
  std::vector<int> edgeDegree;                       // number of tetrahedron edges in the class
  std::vector<std::vector<std::pair<int, int>>> edgeEmb;  // (tet, edge index)
  std::vector<std::vector<std::pair<int, int>>> triangleEmb;
  std::vector<char> vertexBoundary, edgeBoundary, triangleBoundary;
  std::vector<char> edgeJuncture, edgePositive, vertexJuncture;
  std::vector<int> vertexLinkEuler;
};

// Throws InvalidTriangulation on malformed gluings, edges identified with
// themselves in reverse, or vertex links other than spheres and discs.
Skeleton skeleton(const Triangulation& t);

// Coherently orients t so that every tetrahedron is positive (tetrahedron 0
// keeps its vertex order) and every gluing permutation is odd.  `relabel`
// receives, per tetrahedron, the map old vertex -> new vertex.
Triangulation validate_and_orient(const Triangulation& t, std::vector<Perm4>* relabel = nullptr);
bool is_oriented(const Triangulation& t);
SubComplex relabel_subcomplex(const SubComplex& s, const std::vector<Perm4>& relabel);

struct Subdivision {
  Triangulation tri;
  SubComplex sub;
};
// Barycentric subdivision; tetrahedron 24*t + k is the flag of Perm4::from_index(k)
// before orientation.
Subdivision barycentric_subdivide(const Triangulation& t, const SubComplex& tracked = {});

struct BoundarySurface {
  struct Component {
    int euler = 0;
    bool orientable = true;
    int triangles = 0;
  };
  std::vector<std::array<int, 3>> triangles;  // vertex classes
  std::vector<std::pair<int, int>> source;    // (tet, face)
  std::vector<int> triangleComponent;
  std::vector<Component> components;
};
BoundarySurface boundary_surface(const Triangulation& t);

struct HomologyGroup {
  long rank = 0;
  std::vector<std::string> torsion;  // invariant factors > 1, in divisibility order
  bool operator==(const HomologyGroup&) const = default;
};
struct HomologyProfile {
  std::vector<HomologyGroup> groups;  // H0..H3
  std::string str() const;
  bool operator==(const HomologyProfile&) const = default;
};
HomologyProfile homology(const Triangulation& t, bool relBoundary = false);

// Invariant factors of an integer matrix (exposed for testing).
std::vector<std::string> smith_invariants(std::vector<std::vector<long>> dense);

struct SimplifyOptions {
  std::size_t budget = 50000000;  // attempted moves
  std::uint64_t seed = 1;
  bool boundaryCollapses = true;
  int randomWalkRounds = 20;
};
struct SimplifyStats {
  std::size_t attempted = 0;
  std::size_t performed = 0;
  bool budgetExhausted = false;
};
// Collapses, 3-2, 2-3 and 4-4 moves.  Tetrahedra marked locked are never
// touched; boundary collapses keep every juncture a simple closed curve.
Triangulation pachner_simplify(const Triangulation& t, const SimplifyOptions& opt = {}, SimplifyStats* stats = nullptr);
// Locks every tetrahedron meeting a simplex of `preserved`.
Triangulation lock_subcomplex(const Triangulation& t, const SubComplex& preserved);

struct TriIso {
  std::vector<int> tetMap;
  std::vector<Perm4> perms;  // vertices of source tet -> vertices of image tet
};
// Canonical breadth-first relabelling minimised over all starts with even
// vertex maps.  Boundary face labels pass through `labelClass` when given.
std::string iso_signature(const Triangulation& t, const std::vector<long>& labelClass = {});
std::optional<TriIso> find_isomorphism(const Triangulation& a, const Triangulation& b,
                                       const std::vector<long>& classA = {}, const std::vector<long>& classB = {});
bool check_isomorphism(const Triangulation& a, const Triangulation& b, const TriIso& iso,
                       const std::vector<long>& classA = {}, const std::vector<long>& classB = {});

std::string write_tri(const Triangulation& t);
Triangulation read_tri(const std::string& text);

// Glues tetrahedra given by vertex labels along matching triangles.
Triangulation from_simplices(const std::vector<std::array<int, 4>>& tets);

Triangulation two_tet_sphere();
Triangulation single_tet();

}  // namespace sgk
