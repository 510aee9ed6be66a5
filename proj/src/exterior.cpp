#include "sgk/exterior.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sgk/compile.hpp"

namespace sgk {

namespace {

using Tet = std::array<int, 4>;

struct GammaEdge {
  std::string edge;
  int index = 0;  // position along the path
};

// The sphere as a simplicial complex with the graph as a full subcomplex.
struct Complex {
  int nv = 0;
  std::vector<Tet> tets;  // positively oriented
  std::vector<char> alive;
  std::vector<std::vector<int>> byVertex;
  std::map<std::string, int> marked;
  std::map<std::string, std::vector<int>> paths;
  std::vector<int> role;  // -2 outside the graph, -1 marked vertex, else unused
  std::map<std::pair<int, int>, GammaEdge> gammaEdges;
  std::map<int, std::string> interiorOf;  // path-interior vertex -> edge id
  std::map<int, std::string> markedAt;

  void add(const Tet& t) {
    int a = static_cast<int>(tets.size());
    tets.push_back(t);
    alive.push_back(1);
    for (int x : t) byVertex[x].push_back(a);
  }
  void compact() {
    std::vector<Tet> keep;
    for (std::size_t a = 0; a < tets.size(); ++a)
      if (alive[a]) keep.push_back(tets[a]);
    tets.clear();
    alive.clear();
    byVertex.assign(nv, {});
    for (const Tet& t : keep) add(t);
  }
  bool inGamma(int x) const { return role[x] != -2; }
  static std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }
  bool isGammaEdge(int a, int b) const { return gammaEdges.count(key(a, b)) > 0; }
};

bool is_simplicial(const Skeleton& s, std::size_t n) {
  std::map<std::pair<int, int>, int> edges;
  std::map<std::array<int, 3>, int> tris;
  std::set<Tet> tets;
  for (std::size_t a = 0; a < n; ++a) {
    Tet v = s.tetVertex[a];
    Tet sorted = v;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    if (!tets.insert(sorted).second) return false;
    for (int e = 0; e < 6; ++e) {
      auto [x, y] = edge_vertices(e);
      auto k = Complex::key(v[x], v[y]);
      auto [it, fresh] = edges.emplace(k, s.tetEdge[a][e]);
      if (!fresh && it->second != s.tetEdge[a][e]) return false;
    }
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> k;
      int c = 0;
      for (int x = 0; x < 4; ++x)
        if (x != f) k[c++] = v[x];
      std::sort(k.begin(), k.end());
      auto [it, fresh] = tris.emplace(k, s.tetTriangle[a][f]);
      if (!fresh && it->second != s.tetTriangle[a][f]) return false;
    }
  }
  return true;
}

void index_gamma(Complex& c) {
  c.role.assign(c.nv, -2);
  c.gammaEdges.clear();
  c.interiorOf.clear();
  c.markedAt.clear();
  for (const auto& [id, x] : c.marked) {
    c.role[x] = -1;
    c.markedAt[x] = id;
  }
  for (const auto& [id, seq] : c.paths) {
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) {
      c.role[seq[i]] = 0;
      c.interiorOf[seq[i]] = id;
    }
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
      c.gammaEdges[Complex::key(seq[i], seq[i + 1])] = GammaEdge{id, static_cast<int>(i)};
  }
}

// Stellar subdivision of the simplex spanned by `verts`: every tetrahedron
// containing it is replaced by copies with one of those vertices moved to the
// new centre.  Orientation is kept because the centre lies inside the simplex.
int stellar(Complex& c, const std::vector<int>& verts) {
  int centre = c.nv++;
  c.role.push_back(-2);
  c.byVertex.emplace_back();
  std::vector<int> hit;
  for (int a : c.byVertex[verts[0]]) {
    if (!c.alive[a]) continue;
    const Tet& t = c.tets[a];
    if (std::all_of(verts.begin(), verts.end(), [&](int x) { return std::find(t.begin(), t.end(), x) != t.end(); }))
      hit.push_back(a);
  }
  std::sort(hit.begin(), hit.end());
  hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
  for (int a : hit) {
    c.alive[a] = 0;
    for (int x : verts) {
      Tet u = c.tets[a];
      *std::find(u.begin(), u.end(), x) = centre;
      c.add(u);
    }
  }
  return centre;
}

void make_full(Complex& c) {
  std::set<std::pair<int, int>> badEdges;
  for (std::size_t a = 0; a < c.tets.size(); ++a) {
    if (!c.alive[a]) continue;
    const Tet& t = c.tets[a];
    for (int e = 0; e < 6; ++e) {
      auto [x, y] = edge_vertices(e);
      if (c.inGamma(t[x]) && c.inGamma(t[y]) && !c.isGammaEdge(t[x], t[y])) badEdges.insert(Complex::key(t[x], t[y]));
    }
  }
  for (auto [x, y] : badEdges) stellar(c, {x, y});
  std::set<std::array<int, 3>> badTris;
  for (std::size_t a = 0; a < c.tets.size(); ++a) {
    if (!c.alive[a]) continue;
    const Tet& t = c.tets[a];
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> k;
      int n = 0;
      for (int x = 0; x < 4; ++x)
        if (x != f) k[n++] = t[x];
      if (std::all_of(k.begin(), k.end(), [&](int x) { return c.inGamma(x); })) {
        std::sort(k.begin(), k.end());
        badTris.insert(k);
      }
    }
  }
  for (const auto& k : badTris) stellar(c, {k[0], k[1], k[2]});
  c.compact();
  for (const Tet& t : c.tets)
    if (std::all_of(t.begin(), t.end(), [&](int x) { return c.inGamma(x); }))
      throw Error(ErrorCode::InvalidSubComplex, "graph contains a tetrahedron");
}

// Derived subdivision near the marked vertices of degree two or more: every
// simplex containing one is starred, tetrahedra first.  Afterwards the graph
// neighbours of such a vertex have disjoint closed stars in its link.
void derive_near_graph(Complex& c) {
  std::map<int, int> degree;
  for (const auto& [id, seq] : c.paths) {
    degree[seq.front()]++;
    degree[seq.back()]++;
  }
  auto centre = [&](int x) { return c.role[x] == -1 && degree[x] >= 2; };
  std::set<Tet> s3;
  std::set<std::array<int, 3>> s2;
  std::set<std::pair<int, int>> s1;
  for (const Tet& t : c.tets) {
    if (std::none_of(t.begin(), t.end(), centre)) continue;
    Tet k = t;
    std::sort(k.begin(), k.end());
    s3.insert(k);
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> tri;
      int n = 0;
      for (int x = 0; x < 4; ++x)
        if (x != f) tri[n++] = k[x];
      if (std::any_of(tri.begin(), tri.end(), centre)) s2.insert(tri);
    }
    for (int e = 0; e < 6; ++e) {
      auto [x, y] = edge_vertices(e);
      if (centre(k[x]) || centre(k[y])) s1.insert({k[x], k[y]});
    }
  }
  for (const Tet& k : s3) stellar(c, {k[0], k[1], k[2], k[3]});
  for (const auto& k : s2) stellar(c, {k[0], k[1], k[2]});
  for (auto [x, y] : s1) {
    bool graphEdge = c.isGammaEdge(x, y);
    int m = stellar(c, {x, y});
    if (!graphEdge) continue;
    const std::string& id = c.gammaEdges.at(Complex::key(x, y)).edge;
    auto& seq = c.paths.at(id);
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
      if (Complex::key(seq[i], seq[i + 1]) == Complex::key(x, y)) {
        seq.insert(seq.begin() + static_cast<long>(i) + 1, m);
        break;
      }
  }
  c.compact();
  index_gamma(c);
}

Complex to_complex(Triangulation t, SubComplex sub, int derivedSteps) {
  if (!is_oriented(t)) {
    std::vector<Perm4> relabel;
    t = validate_and_orient(t, &relabel);
    sub = relabel_subcomplex(sub, relabel);
  }
  Skeleton s = skeleton(t);
  for (int k = 0; k < 2 && !is_simplicial(s, t.size()); ++k) {
    Subdivision sd = barycentric_subdivide(t, sub);
    t = std::move(sd.tri);
    sub = std::move(sd.sub);
    s = skeleton(t);
  }
  Complex c;
  c.nv = s.nVertices;
  c.byVertex.resize(c.nv);
  for (const Tet& x : s.tetVertex) c.add(x);
  for (const auto& [id, at] : sub.vertices) c.marked[id] = s.tetVertex[at.first][at.second];
  for (const auto& [id, path] : sub.edgePaths) {
    std::vector<int> seq{s.tetVertex[path.front().tet][path.front().a]};
    for (const EdgeRef& r : path) seq.push_back(s.tetVertex[r.tet][r.b]);
    c.paths[id] = seq;
  }
  index_gamma(c);
  make_full(c);
  for (int k = 0; k < derivedSteps; ++k) derive_near_graph(c);
  return c;
}

long det3(const std::array<std::array<int, 4>, 4>& p) {
  long m[3][3];
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) m[r][k] = p[r + 1][k + 1] - p[0][k + 1];
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

struct CellInfo {
  int label = -1;
  bool headEdge = false;  // cell over the graph edge next to the head of a directed edge
};

}  // namespace

int MarkedExterior::region_of_vertex(const std::string& v) const {
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (regions[i].kind == Region::Kind::Vertex && regions[i].id == v) return static_cast<int>(i);
  return -1;
}

int MarkedExterior::region_of_edge(const std::string& e) const {
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (regions[i].kind == Region::Kind::Edge && regions[i].id == e) return static_cast<int>(i);
  return -1;
}

std::vector<Region> regions_of(const DecoratedGraph& g) {
  std::vector<Region> out;
  for (const auto& v : g.vertices) {
    Region r{Region::Kind::Vertex, v, std::nullopt};
    if (g.vertexColor) r.color = g.vertexColor->at(v);
    out.push_back(r);
  }
  for (const auto& e : g.edges) {
    Region r{Region::Kind::Edge, e.id, std::nullopt};
    if (g.edgeColor) r.color = g.edgeColor->at(e.id);
    out.push_back(r);
  }
  return out;
}

MarkedExterior build_exterior(const Triangulation& sphere, const SubComplex& graph, const DecoratedGraph& metadata,
                              const ExteriorOptions& opt) {
  validate_subcomplex(sphere, graph, metadata);
  MarkedExterior me;
  me.graph = metadata;
  me.graph.normalize();
  me.regions = regions_of(me.graph);
  if (me.graph.vertices.empty()) {
    me.manifold = is_oriented(sphere) ? sphere : validate_and_orient(sphere);
    return me;
  }

  Complex c = to_complex(sphere, graph, std::max(1, opt.depth - 1));

  // a path oriented towards the head of its edge ends at index len-1
  std::map<std::string, int> headIndex;
  for (const auto& [id, seq] : c.paths) {
    int len = static_cast<int>(seq.size()) - 1;
    int head = -1;
    if (me.graph.edgeDirection) {
      const auto& to = me.graph.edgeDirection->at(id).second;
      head = (c.marked.at(to) == seq.back()) ? len - 1 : 0;
    }
    headIndex[id] = head;
  }

  std::vector<int> newId(c.nv, -1);
  std::map<std::pair<int, int>, int> mid;
  int next = 0;
  auto idOf = [&](int x) {
    if (newId[x] < 0) newId[x] = next++;
    return newId[x];
  };
  auto midOf = [&](int a, int b) {
    auto [it, fresh] = mid.emplace(std::make_pair(a, b), next);
    if (fresh) ++next;
    return it->second;
  };

  std::vector<Tet> out;
  std::vector<CellInfo> info;
  for (const Tet& s : c.tets) {
    std::vector<int> A, B;
    for (int i = 0; i < 4; ++i) (c.inGamma(s[i]) ? A : B).push_back(i);
    if (A.empty()) {
      out.push_back({idOf(s[0]), idOf(s[1]), idOf(s[2]), idOf(s[3])});
      info.push_back({});
      continue;
    }
    CellInfo ci;
    if (A.size() == 1) {
      int a = s[A[0]];
      ci.label = c.role[a] == -1 ? me.region_of_vertex(c.markedAt.at(a)) : me.region_of_edge(c.interiorOf.at(a));
    } else {
      const GammaEdge& g = c.gammaEdges.at(Complex::key(s[A[0]], s[A[1]]));
      ci.label = me.region_of_edge(g.edge);
      ci.headEdge = g.index == headIndex.at(g.edge);
    }
    // local points: ids and doubled barycentric coordinates
    std::vector<int> pid;
    std::vector<std::array<int, 4>> pos;
    std::map<int, int> local;  // new id -> local index
    auto addPoint = [&](int id, std::array<int, 4> p) {
      auto [it, fresh] = local.emplace(id, static_cast<int>(pid.size()));
      if (fresh) {
        pid.push_back(id);
        pos.push_back(p);
      }
      return it->second;
    };
    auto vertexPoint = [&](int i) {
      std::array<int, 4> p{};
      p[i] = 2;
      return addPoint(idOf(s[i]), p);
    };
    auto midPoint = [&](int i, int j) {  // i in the graph, j outside
      std::array<int, 4> p{};
      p[i] = p[j] = 1;
      return addPoint(midOf(s[i], s[j]), p);
    };
    std::vector<std::vector<int>> facets;
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> tri;
      int n = 0;
      for (int x = 0; x < 4; ++x)
        if (x != f) tri[n++] = x;
      std::vector<int> poly;
      for (int k = 0; k < 3; ++k) {
        int x = tri[k], y = tri[(k + 1) % 3];
        bool gx = c.inGamma(s[x]), gy = c.inGamma(s[y]);
        if (!gx) poly.push_back(vertexPoint(x));
        if (gx != gy) poly.push_back(gx ? midPoint(x, y) : midPoint(y, x));
      }
      if (poly.size() >= 3) facets.push_back(poly);
    }
    std::vector<int> top;
    if (A.size() == 2 && B.size() == 2)
      top = {midPoint(A[0], B[0]), midPoint(A[0], B[1]), midPoint(A[1], B[1]), midPoint(A[1], B[0])};
    else
      for (int a : A)
        for (int b : B) top.push_back(midPoint(a, b));
    facets.push_back(top);
    // pulling triangulation from the smallest vertex
    int apex = static_cast<int>(std::min_element(pid.begin(), pid.end()) - pid.begin());
    for (const auto& poly : facets) {
      if (std::find(poly.begin(), poly.end(), apex) != poly.end()) continue;
      std::size_t m = poly.size();
      std::size_t w = 0;
      for (std::size_t k = 1; k < m; ++k)
        if (pid[poly[k]] < pid[poly[w]]) w = k;
      for (std::size_t k = 1; k + 1 < m; ++k) {
        std::array<int, 4> q{apex, poly[w], poly[(w + k) % m], poly[(w + k + 1) % m]};
        std::array<std::array<int, 4>, 4> p{pos[q[0]], pos[q[1]], pos[q[2]], pos[q[3]]};
        long d = det3(p);
        if (d == 0) throw Error(ErrorCode::InvalidTriangulation, "degenerate truncated cell");
        if (d < 0) std::swap(q[2], q[3]);
        out.push_back({pid[q[0]], pid[q[1]], pid[q[2]], pid[q[3]]});
        info.push_back(ci);
      }
    }
  }

  std::vector<Perm4> relabel;
  Triangulation x = validate_and_orient(from_simplices(out), &relabel);
  std::vector<Tet> corner(out.size());
  for (std::size_t a = 0; a < out.size(); ++a)
    for (int v = 0; v < 4; ++v) corner[a][relabel[a][v]] = out[a][v];

  struct Side {
    int tet, face;
  };
  std::map<std::pair<int, int>, std::vector<Side>> bedges;
  for (std::size_t a = 0; a < x.size(); ++a)
    for (int f = 0; f < 4; ++f) {
      if (!x.adj[a][f].boundary()) continue;
      if (info[a].label < 0) throw Error(ErrorCode::InvalidTriangulation, "unlabelled boundary face");
      for (int w = 0; w < 4; ++w) {
        if (w == f) continue;
        int p = -1, q = -1;
        for (int y = 0; y < 4; ++y)
          if (y != f && y != w) (p < 0 ? p : q) = y;
        bedges[Complex::key(corner[a][p], corner[a][q])].push_back({static_cast<int>(a), f});
      }
    }
  for (std::size_t a = 0; a < x.size(); ++a)
    for (int f = 0; f < 4; ++f) {
      if (!x.adj[a][f].boundary()) continue;
      FaceData& fd = x.face[a][f];
      fd.label = info[a].label;
      for (int w = 0; w < 4; ++w) {
        if (w == f) continue;
        int p = -1, q = -1;
        for (int y = 0; y < 4; ++y)
          if (y != f && y != w) (p < 0 ? p : q) = y;
        const auto& sides = bedges.at(Complex::key(corner[a][p], corner[a][q]));
        if (sides.size() != 2) throw Error(ErrorCode::InvalidTriangulation, "boundary edge not in two boundary faces");
        const Side& o = (sides[0].tet == static_cast<int>(a) && sides[0].face == f) ? sides[1] : sides[0];
        int other = info[o.tet].label;
        if (other == fd.label) continue;
        fd.juncture |= static_cast<std::uint8_t>(1u << w);
        int edgeSide = me.regions[fd.label].kind == Region::Kind::Edge ? static_cast<int>(a) : o.tet;
        int vertexLabel = me.regions[fd.label].kind == Region::Kind::Vertex ? fd.label : other;
        const Region& er = me.regions[info[edgeSide].label];
        if (me.graph.edgeDirection && info[edgeSide].headEdge &&
            vertexLabel == me.region_of_vertex(me.graph.edgeDirection->at(er.id).second))
          fd.positive |= static_cast<std::uint8_t>(1u << w);
      }
    }
  me.manifold = std::move(x);
  if (opt.simplify) me = simplify_exterior(me, opt.simplifyOptions);
  return me;
}

MarkedExterior simplify_exterior(const MarkedExterior& me, const SimplifyOptions& opt) {
  MarkedExterior out = me;
  SimplifyOptions o = opt;
  o.boundaryCollapses = true;
  out.manifold = pachner_simplify(me.manifold, o);
  return out;
}

namespace {

struct BoundaryIndex {
  Skeleton s;
  // per boundary edge class: the (tet, face) pairs of its two boundary faces
  std::map<int, std::vector<std::pair<int, int>>> faceAt;
  std::vector<std::pair<int, int>> faces;
};

BoundaryIndex boundary_index(const Triangulation& t) {
  BoundaryIndex b{skeleton(t), {}, {}};
  for (std::size_t a = 0; a < t.size(); ++a)
    for (int f = 0; f < 4; ++f) {
      if (!t.adj[a][f].boundary()) continue;
      b.faces.push_back({static_cast<int>(a), f});
      for (int e = 0; e < 6; ++e) {
        auto [x, y] = edge_vertices(e);
        if (x != f && y != f) b.faceAt[b.s.tetEdge[a][e]].push_back({static_cast<int>(a), f});
      }
    }
  return b;
}

}  // namespace

std::vector<Juncture> junctures(const MarkedExterior& me) {
  BoundaryIndex b = boundary_index(me.manifold);
  const Skeleton& s = b.s;
  std::map<int, std::vector<int>> at;  // vertex class -> incident juncture edges
  std::vector<int> jedges;
  for (int e = 0; e < s.nEdges; ++e)
    if (s.edgeBoundary[e] && s.edgeJuncture[e]) {
      jedges.push_back(e);
      at[s.edgeEnds[e][0]].push_back(e);
      at[s.edgeEnds[e][1]].push_back(e);
    }
  std::set<int> seen;
  std::vector<Juncture> out;
  for (int e0 : jedges) {
    if (seen.count(e0)) continue;
    Juncture j;
    j.edges.push_back(e0);
    seen.insert(e0);
    int prev = e0, x = s.edgeEnds[e0][1];
    while (true) {
      const auto& inc = at[x];
      int nxt = -1;
      for (int e : inc)
        if (e != prev) nxt = e;
      if (nxt < 0 || nxt == e0 || seen.count(nxt)) break;
      j.edges.push_back(nxt);
      seen.insert(nxt);
      x = s.edgeEnds[nxt][0] == x ? s.edgeEnds[nxt][1] : s.edgeEnds[nxt][0];
      prev = nxt;
    }
    for (const auto& [a, f] : b.faceAt[e0]) {
      int l = me.manifold.face[a][f].label;
      if (l < 0 || l >= static_cast<int>(me.regions.size())) continue;
      (me.regions[l].kind == Region::Kind::Vertex ? j.vertexRegion : j.edgeRegion) = l;
    }
    for (int e : j.edges)
      if (s.edgePositive[e]) j.positive = true;
    out.push_back(j);
  }
  return out;
}

std::vector<RegionStats> region_stats(const MarkedExterior& me) {
  std::vector<RegionStats> out(me.regions.size());
  if (me.regions.empty()) return out;
  BoundaryIndex b = boundary_index(me.manifold);
  BoundarySurface bs = boundary_surface(me.manifold);
  std::map<std::pair<int, int>, int> comp;
  for (std::size_t i = 0; i < bs.source.size(); ++i) comp[bs.source[i]] = bs.triangleComponent[i];
  std::vector<std::set<int>> verts(out.size()), edges(out.size());
  for (const auto& [a, f] : b.faces) {
    int l = me.manifold.face[a][f].label;
    if (l < 0 || l >= static_cast<int>(out.size())) continue;
    out[l].triangles++;
    out[l].component = comp[{a, f}];
    for (int v = 0; v < 4; ++v)
      if (v != f) verts[l].insert(b.s.tetVertex[a][v]);
    for (int e = 0; e < 6; ++e) {
      auto [x, y] = edge_vertices(e);
      if (x != f && y != f) edges[l].insert(b.s.tetEdge[a][e]);
    }
  }
  for (std::size_t l = 0; l < out.size(); ++l)
    out[l].euler = static_cast<int>(verts[l].size()) - static_cast<int>(edges[l].size()) + out[l].triangles;
  for (const Juncture& j : junctures(me)) {
    if (j.vertexRegion >= 0) out[j.vertexRegion].junctures++;
    if (j.edgeRegion >= 0) out[j.edgeRegion].junctures++;
  }
  return out;
}

std::vector<std::string> check_exterior(const MarkedExterior& me) {
  std::vector<std::string> problems;
  auto fail = [&](const std::string& m) { problems.push_back(m); };
  if (!is_oriented(me.manifold)) fail("manifold is not coherently oriented");
  Skeleton s;
  try {
    s = skeleton(me.manifold);
  } catch (const Error& e) {
    fail(e.what());
    return problems;
  }
  for (std::size_t a = 0; a < me.manifold.size(); ++a)
    for (int f = 0; f < 4; ++f)
      if (me.manifold.adj[a][f].boundary()) {
        int l = me.manifold.face[a][f].label;
        if (l < 0 || l >= static_cast<int>(me.regions.size())) fail("boundary face without a region");
      }
  std::vector<RegionStats> st = region_stats(me);
  for (std::size_t l = 0; l < me.regions.size(); ++l) {
    const Region& r = me.regions[l];
    int want = 0, wantJ = 2;
    if (r.kind == Region::Kind::Vertex) {
      int d = static_cast<int>(me.graph.degree(r.id));
      want = 2 - d;
      wantJ = d;
    }
    if (st[l].triangles == 0) fail("region " + r.id + " is empty");
    if (st[l].euler != want)
      fail("region " + r.id + " has euler characteristic " + std::to_string(st[l].euler) + ", expected " +
           std::to_string(want));
    if (st[l].junctures != wantJ)
      fail("region " + r.id + " meets " + std::to_string(st[l].junctures) + " junctures, expected " +
           std::to_string(wantJ));
  }
  std::map<int, int> positives;
  std::size_t total = 0;
  for (const Juncture& j : junctures(me)) {
    ++total;
    if (j.vertexRegion < 0 || j.edgeRegion < 0) {
      fail("juncture does not separate a vertex region from an edge region");
      continue;
    }
    const GraphEdge* e = me.graph.edge(me.regions[j.edgeRegion].id);
    const std::string& v = me.regions[j.vertexRegion].id;
    if (!e || (e->u != v && e->v != v)) fail("juncture between non-incident regions");
    if (j.positive) positives[j.edgeRegion]++;
  }
  if (total != 2 * me.graph.edges.size()) fail("juncture count differs from the degree sum");
  for (int e = 0; e < s.nEdges; ++e)
    if (s.edgeJuncture[e] && !s.edgeBoundary[e]) fail("interior juncture edge");
  std::map<int, int> jdeg;
  for (int e = 0; e < s.nEdges; ++e)
    if (s.edgeBoundary[e] && s.edgeJuncture[e]) {
      jdeg[s.edgeEnds[e][0]]++;
      jdeg[s.edgeEnds[e][1]]++;
    }
  for (auto [v, d] : jdeg)
    if (d != 2) fail("junctures are not disjoint simple curves");
  for (std::size_t l = 0; l < me.regions.size(); ++l) {
    if (me.regions[l].kind != Region::Kind::Edge) continue;
    int want = me.graph.edgeDirection ? 1 : 0;
    if (positives[static_cast<int>(l)] != want) fail("edge region " + me.regions[l].id + " has a wrong positive end");
  }
  return problems;
}

namespace {

std::string shape(int euler) {
  switch (euler) {
    case 2:
      return "sphere";
    case 1:
      return "disc";
    case 0:
      return "annulus";
    case -1:
      return "pants";
    default:
      return "planar(" + std::to_string(euler) + ")";
  }
}

std::string surface_name(int euler) {
  if (euler == 2) return "sphere";
  if (euler % 2 == 0 && euler < 2) return "genus-" + std::to_string((2 - euler) / 2);
  return "surface(" + std::to_string(euler) + ")";
}

}  // namespace

RegionSummary region_summary(const MarkedExterior& me) {
  RegionSummary out;
  if (me.regions.empty()) return out;
  std::vector<RegionStats> st = region_stats(me);
  BoundarySurface bs = boundary_surface(me.manifold);
  for (const auto& c : bs.components) out.componentEuler.push_back(c.euler);
  for (std::size_t l = 0; l < me.regions.size(); ++l)
    out.regions.push_back({me.regions[l], st[l].euler, st[l].junctures, st[l].component});
  DecoratedGraph rg;
  rg.vertexColor.emplace();
  rg.edgeColor.emplace();
  for (std::size_t l = 0; l < me.regions.size(); ++l) {
    std::string name = "r" + std::to_string(l);
    rg.vertices.push_back(name);
    const Region& r = me.regions[l];
    unsigned colorCode = r.color ? *r.color + 1 : 0;
    unsigned code = (r.kind == Region::Kind::Edge ? 1u : 0u) + 2u * (static_cast<unsigned>(st[l].euler + 1024) +
                                                                        4096u * colorCode);
    (*rg.vertexColor)[name] = code;
  }
  int k = 0;
  for (const Juncture& j : junctures(me)) {
    if (j.vertexRegion < 0 || j.edgeRegion < 0) continue;
    out.links.push_back({me.regions[j.vertexRegion].id, me.regions[j.edgeRegion].id, j.positive});
    std::string id = "j" + std::to_string(k++);
    rg.edges.push_back({id, "r" + std::to_string(j.vertexRegion), "r" + std::to_string(j.edgeRegion)});
    (*rg.edgeColor)[id] = j.positive ? 1 : 0;
  }
  rg.normalize();
  std::ostringstream os;
  std::vector<int> ce = out.componentEuler;
  std::sort(ce.begin(), ce.end());
  os << "components";
  for (int e : ce) os << ' ' << e;
  os << " | " << canonical_form(rg);
  out.canonical = os.str();
  return out;
}

std::string RegionSummary::describe() const {
  std::ostringstream os;
  std::map<std::string, std::vector<std::string>> nbr;  // "V:id" / "E:id"
  auto key = [](const Region& r) { return (r.kind == Region::Kind::Vertex ? "V:" : "E:") + r.id; };
  std::map<std::string, const Entry*> byKey;
  for (const Entry& e : regions) byKey[key(e.region)] = &e;
  for (const Link& l : links) {
    nbr["V:" + l.vertexRegion].push_back("E:" + l.edgeRegion);
    nbr["E:" + l.edgeRegion].push_back("V:" + l.vertexRegion);
  }
  std::set<std::string> seen;
  bool firstComp = true;
  for (std::size_t c = 0; c < componentEuler.size(); ++c) {
    std::vector<std::string> order;
    for (const Entry& e : regions)
      if (e.component == static_cast<int>(c) && !seen.count(key(e.region))) {
        std::function<void(const std::string&)> dfs = [&](const std::string& k) {
          if (!seen.insert(k).second) return;
          order.push_back(k);
          for (const auto& n : nbr[k]) dfs(n);
        };
        dfs(key(e.region));
      }
    if (!firstComp) os << "; ";
    firstComp = false;
    os << surface_name(componentEuler[c]) << ": ";
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Entry& e = *byKey[order[i]];
      if (i) os << " - ";
      os << shape(e.euler) << '(' << (e.region.kind == Region::Kind::Vertex ? 'V' : 'E') << ',' << e.region.id;
      if (e.region.color) os << ",c=" << *e.region.color;
      os << ')';
    }
  }
  return os.str();
}

namespace {

using nlohmann::json;

json graph_json(const DecoratedGraph& g) {
  json j;
  j["vertices"] = g.vertices;
  j["edges"] = json::array();
  for (const auto& e : g.edges) j["edges"].push_back({{"id", e.id}, {"u", e.u}, {"v", e.v}});
  if (g.vertexColor) j["vertexColor"] = *g.vertexColor;
  if (g.edgeColor) j["edgeColor"] = *g.edgeColor;
  if (g.edgeDirection) {
    json d = json::object();
    for (const auto& [id, p] : *g.edgeDirection) d[id] = {p.first, p.second};
    j["edgeDirection"] = d;
  }
  return j;
}

DecoratedGraph graph_from(const json& j) {
  DecoratedGraph g;
  g.vertices = j.at("vertices").get<std::vector<std::string>>();
  for (const auto& e : j.at("edges")) g.edges.push_back({e.at("id"), e.at("u"), e.at("v")});
  if (j.contains("vertexColor")) g.vertexColor = j["vertexColor"].get<std::map<std::string, unsigned>>();
  if (j.contains("edgeColor")) g.edgeColor = j["edgeColor"].get<std::map<std::string, unsigned>>();
  if (j.contains("edgeDirection")) {
    std::map<std::string, std::pair<std::string, std::string>> d;
    for (const auto& [id, p] : j["edgeDirection"].items()) d[id] = {p.at(0), p.at(1)};
    g.edgeDirection = d;
  }
  g.normalize();
  return g;
}

}  // namespace

std::string graph_to_json(const DecoratedGraph& g) { return graph_json(g).dump(); }

DecoratedGraph graph_from_json(const std::string& text) {
  try {
    return graph_from(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Syntax, std::string("graph json: ") + e.what());
  }
}

std::string exterior_to_json(const MarkedExterior& me) {
  json j;
  j["graph"] = graph_json(me.graph);
  j["regions"] = json::array();
  for (const Region& r : me.regions) {
    json x{{"kind", r.kind == Region::Kind::Vertex ? "vertex" : "edge"}, {"id", r.id}};
    if (r.color) x["color"] = *r.color;
    j["regions"].push_back(x);
  }
  j["triangulation"] = write_tri(me.manifold);
  return j.dump();
}

MarkedExterior exterior_from_json(const std::string& text) {
  MarkedExterior me;
  try {
    json j = json::parse(text);
    me.graph = graph_from(j.at("graph"));
    for (const auto& x : j.at("regions")) {
      Region r;
      r.kind = x.at("kind") == "vertex" ? Region::Kind::Vertex : Region::Kind::Edge;
      r.id = x.at("id");
      if (x.contains("color")) r.color = x["color"].get<unsigned>();
      me.regions.push_back(r);
    }
    me.manifold = read_tri(j.at("triangulation").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Syntax, std::string("exterior json: ") + e.what());
  }
  return me;
}

std::string summary_to_json(const RegionSummary& s) {
  json j;
  j["canonical"] = s.canonical;
  j["description"] = s.describe();
  j["componentEuler"] = s.componentEuler;
  j["regions"] = json::array();
  for (const auto& e : s.regions) {
    json x{{"kind", e.region.kind == Region::Kind::Vertex ? "vertex" : "edge"},
           {"id", e.region.id},
           {"euler", e.euler},
           {"junctures", e.junctures},
           {"component", e.component}};
    if (e.region.color) x["color"] = *e.region.color;
    j["regions"].push_back(x);
  }
  j["junctures"] = json::array();
  for (const auto& l : s.links)
    j["junctures"].push_back({{"vertexRegion", l.vertexRegion}, {"edgeRegion", l.edgeRegion}, {"positive", l.positive}});
  return j.dump();
}

}  // namespace sgk

namespace sgk {

Triangulation cone_boundary(const Triangulation& t) {
  Triangulation x = t;
  for (auto& f : x.face) f.fill(FaceData{});
  Skeleton s = skeleton(x);
  for (int k = 0; k < 2 && !is_simplicial(s, x.size()); ++k) {
    x = barycentric_subdivide(x).tri;
    s = skeleton(x);
  }
  BoundarySurface b = boundary_surface(x);
  std::vector<Tet> tets(s.tetVertex.begin(), s.tetVertex.end());
  for (std::size_t i = 0; i < b.triangles.size(); ++i) {
    const auto& tr = b.triangles[i];
    tets.push_back({tr[0], tr[1], tr[2], s.nVertices + b.triangleComponent[i]});
  }
  return validate_and_orient(from_simplices(tets));
}

bool certify_ball(const Triangulation& t) {
  BoundarySurface b = boundary_surface(t);
  if (b.components.size() != 1 || b.components[0].euler != 2) return false;
  if (homology(t).str() != "H0=Z H1=0 H2=0 H3=0") return false;
  return verify_sphere(cone_boundary(t)).status == "certified";
}

}  // namespace sgk
