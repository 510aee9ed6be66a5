#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "normal_cells.hpp"
#include "sgk/surfaces.hpp"

namespace sgk {

using cells::Cells;
using cells::Dsu;

namespace {

int third(int f, int x, int y) { return 6 - f - x - y; }

long euler_of(const Triangulation& t, const Skeleton& s, const NormalCoordinates& nc, const Cells& c) {
  long F = 0, E2 = 0, V = 0;
  for (auto x : nc.v) F += x;
  for (std::size_t a = 0; a < t.size(); ++a)
    for (int f = 0; f < 4; ++f) {
      long arcs = 0;
      for (int v = 0; v < 4; ++v)
        if (v != f) arcs += c.arcs(static_cast<int>(a), f, v);
      E2 += t.adj[a][f].boundary() ? 2 * arcs : arcs;
    }
  for (int e = 0; e < s.nEdges; ++e) {
    auto [a, k] = s.edgeEmb[e][0];
    auto [x, y] = edge_vertices(k);
    V += edge_weight(nc, a, x, y);
  }
  return V - E2 / 2 + F;
}

}  // namespace

SurfaceAnalysis analyze(const MarkedExterior& me, const NormalCoordinates& nc) {
  const Triangulation& t = me.manifold;
  SurfaceAnalysis out;
  Skeleton s = skeleton(t);
  Cells c(t, nc);
  out.eulerChar = euler_of(t, s, nc, c);
  const int n = static_cast<int>(t.size());

  // components: discs glued along arcs of interior faces
  Dsu discs(c.discs());
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = t.adj[a][f];
      if (g.boundary()) {
        for (int v = 0; v < 4; ++v)
          if (v != f && c.arcs(a, f, v) > 0) out.closed = false;
        continue;
      }
      for (int v = 0; v < 4; ++v) {
        if (v == f) continue;
        for (std::int64_t i = 0; i < c.arcs(a, f, v); ++i)
          discs.unite(c.arc_disc(a, f, v, i), c.arc_disc(g.tet, g.perm[f], g.perm[v], i));
      }
    }
  std::set<int> roots;
  for (int d = 0; d < c.discs(); ++d) roots.insert(discs.find(d));
  out.componentCount = static_cast<int>(roots.size());
  out.connected = out.componentCount == 1;

  // boundary curves: points on boundary edges joined by boundary arcs
  std::vector<int> pointBase(s.nEdges + 1, 0);
  std::vector<std::int64_t> weight(s.nEdges, 0);
  for (int e = 0; e < s.nEdges; ++e) {
    auto [a, k] = s.edgeEmb[e][0];
    auto [x, y] = edge_vertices(k);
    weight[e] = s.edgeBoundary[e] ? edge_weight(nc, a, x, y) : 0;
    pointBase[e + 1] = pointBase[e] + static_cast<int>(weight[e]);
  }
  // point at distance i from v along tetrahedron edge (v, w)
  auto point = [&](int a, int v, int w, std::int64_t i) {
    int k = edge_index(std::min(v, w), std::max(v, w));
    int e = s.tetEdge[a][k];
    std::int64_t fromMin = v < w ? i : weight[e] - 1 - i;
    std::int64_t pos = s.tetEdgeSign[a][k] > 0 ? fromMin : weight[e] - 1 - fromMin;
    return pointBase[e] + static_cast<int>(pos);
  };
  Dsu pts(pointBase.back());
  std::map<int, std::set<int>> curveRegions;
  std::map<int, int> curveArcs;
  std::vector<std::pair<int, int>> boundaryFaces;
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < 4; ++f)
      if (t.adj[a][f].boundary()) boundaryFaces.push_back({a, f});
  for (auto [a, f] : boundaryFaces)
    for (int v = 0; v < 4; ++v) {
      if (v == f) continue;
      int w = (v + 1) % 4 == f ? (v + 2) % 4 : (v + 1) % 4, x = third(f, v, w);
      for (std::int64_t i = 0; i < c.arcs(a, f, v); ++i) pts.unite(point(a, v, w, i), point(a, v, x, i));
    }
  for (auto [a, f] : boundaryFaces)
    for (int v = 0; v < 4; ++v) {
      if (v == f) continue;
      int w = (v + 1) % 4 == f ? (v + 2) % 4 : (v + 1) % 4;
      for (std::int64_t i = 0; i < c.arcs(a, f, v); ++i) {
        int r = pts.find(point(a, v, w, i));
        curveRegions[r].insert(t.face[a][f].label);
        curveArcs[r]++;
      }
    }
  std::map<int, int> curveIndex;
  for (auto& [r, regions] : curveRegions) {
    curveIndex[r] = static_cast<int>(out.boundaryCurves.size());
    SurfaceAnalysis::Curve cv;
    cv.regions = regions;
    cv.arcs = curveArcs[r];
    out.boundaryCurves.push_back(cv);
  }
  for (int e = 0; e < s.nEdges; ++e)
    if (s.edgeJuncture[e])
      for (int p = pointBase[e]; p < pointBase[e + 1]; ++p) out.boundaryCurves[curveIndex[pts.find(p)]].junctureCrossings++;

  BoundarySurface bs = boundary_surface(t);
  std::map<std::pair<int, int>, int> compOf;
  for (std::size_t i = 0; i < bs.source.size(); ++i) compOf[bs.source[i]] = bs.triangleComponent[i];

  // sides of a single boundary curve within its boundary component
  if (out.boundaryCurves.size() == 1) {
    // boundary face pieces: (face index, corner, i) or central
    std::map<std::pair<int, int>, int> faceIndex;
    for (std::size_t k = 0; k < boundaryFaces.size(); ++k) faceIndex[boundaryFaces[k]] = static_cast<int>(k);
    std::vector<int> pieceBase(boundaryFaces.size() + 1, 0);
    for (std::size_t k = 0; k < boundaryFaces.size(); ++k) {
      auto [a, f] = boundaryFaces[k];
      std::int64_t m = 1;
      for (int v = 0; v < 4; ++v)
        if (v != f) m += c.arcs(a, f, v);
      pieceBase[k + 1] = pieceBase[k] + static_cast<int>(m);
    }
    auto piece = [&](int k, int v, std::int64_t i) {
      auto [a, f] = boundaryFaces[k];
      if (v < 0) return pieceBase[k];
      std::int64_t off = 1;
      for (int u = 0; u < v; ++u)
        if (u != f) off += c.arcs(a, f, u);
      return pieceBase[k] + static_cast<int>(off + i);
    };
    // segment j along edge (x, y) of a face, counted from x
    auto segment = [&](int k, int x, int y, std::int64_t j) {
      auto [a, f] = boundaryFaces[k];
      std::int64_t ax = c.arcs(a, f, x), ay = c.arcs(a, f, y);
      if (j < ax) return piece(k, x, j);
      if (j == ax) return piece(k, -1, 0);
      return piece(k, y, ax + ay - j);
    };
    Dsu pieces(pieceBase.back());
    for (std::size_t k = 0; k < boundaryFaces.size(); ++k) {
      auto [a, f] = boundaryFaces[k];
      for (int x = 0; x < 4; ++x)
        for (int y = x + 1; y < 4; ++y) {
          if (x == f || y == f) continue;
          cells::EdgeStep o = cells::boundary_across(t, a, f, x, y);
          int k2 = faceIndex[{o.tet, o.face}];
          std::int64_t W = c.arcs(a, f, x) + c.arcs(a, f, y);
          for (std::int64_t j = 0; j <= W; ++j) pieces.unite(segment(static_cast<int>(k), x, y, j), segment(k2, o.x, o.y, j));
        }
    }
    // the component carrying the curve
    int comp = -1;
    for (std::size_t k = 0; k < boundaryFaces.size() && comp < 0; ++k) {
      auto [a, f] = boundaryFaces[k];
      for (int v = 0; v < 4; ++v)
        if (v != f && c.arcs(a, f, v) > 0) comp = compOf[{a, f}];
    }
    std::map<int, int> sideOf;
    std::map<int, std::set<int>> verts;
    std::map<int, std::set<std::pair<int, std::int64_t>>> segs;
    std::map<int, int> faces;
    std::map<int, bool> junct;
    for (std::size_t k = 0; k < boundaryFaces.size(); ++k) {
      auto [a, f] = boundaryFaces[k];
      if (compOf[{a, f}] != comp) continue;
      for (int p = pieceBase[k]; p < pieceBase[k + 1]; ++p) faces[pieces.find(p)]++;
      for (int v = 0; v < 4; ++v) {
        if (v == f) continue;
        int r = pieces.find(c.arcs(a, f, v) > 0 ? piece(static_cast<int>(k), v, 0) : piece(static_cast<int>(k), -1, 0));
        verts[r].insert(s.tetVertex[a][v]);
      }
      for (int x = 0; x < 4; ++x)
        for (int y = x + 1; y < 4; ++y) {
          if (x == f || y == f) continue;
          int e = s.tetEdge[a][edge_index(x, y)];
          std::int64_t W = c.arcs(a, f, x) + c.arcs(a, f, y);
          for (std::int64_t j = 0; j <= W; ++j) {
            int r = pieces.find(segment(static_cast<int>(k), x, y, j));
            std::int64_t fromMin = j;  // x < y
            std::int64_t pos = s.tetEdgeSign[a][edge_index(x, y)] > 0 ? fromMin : W - fromMin;
            segs[r].insert({e, pos});
            if (s.edgeJuncture[e]) junct[r] = true;
          }
        }
    }
    if (faces.size() == 2)
      for (auto& [r, nf] : faces) {
        SurfaceAnalysis::Side side;
        side.euler = static_cast<int>(verts[r].size()) - static_cast<int>(segs[r].size()) + nf;
        side.touchesJuncture = junct[r];
        out.curveSides.push_back(side);
      }
  }

  // sides of the cut manifold
  if (out.connected && c.discs() > 0) {
    Dsu ch(c.chambers());
    for (int a = 0; a < n; ++a)
      for (int f = 0; f < 4; ++f) {
        const Gluing& g = t.adj[a][f];
        if (g.boundary() || std::make_pair(g.tet, g.perm[f]) < std::make_pair(a, f)) continue;
        ch.unite(c.piece_chamber(a, f, -1, 0), c.piece_chamber(g.tet, g.perm[f], -1, 0));
        for (int v = 0; v < 4; ++v) {
          if (v == f) continue;
          for (std::int64_t i = 0; i < c.arcs(a, f, v); ++i)
            ch.unite(c.piece_chamber(a, f, v, i), c.piece_chamber(g.tet, g.perm[f], g.perm[v], i));
        }
      }
    std::vector<int> rootsCh;
    for (int x = 0; x < c.chambers(); ++x) rootsCh.push_back(ch.find(x));
    std::sort(rootsCh.begin(), rootsCh.end());
    rootsCh.erase(std::unique(rootsCh.begin(), rootsCh.end()), rootsCh.end());
    if (rootsCh.size() == 2) {
      out.sidePartition.assign(2, {});
      for (auto [a, f] : boundaryFaces) {
        int comp = compOf[{a, f}];
        auto add = [&](int chamber) {
          int r = ch.find(chamber);
          out.sidePartition[r == rootsCh[0] ? 0 : 1].insert(comp);
        };
        add(c.piece_chamber(a, f, -1, 0));
        for (int v = 0; v < 4; ++v)
          if (v != f)
            for (std::int64_t i = 0; i < c.arcs(a, f, v); ++i) add(c.piece_chamber(a, f, v, i));
      }
    }
  }
  return out;
}

namespace {

std::int64_t total(const NormalCoordinates& nc) {
  std::int64_t s = 0;
  for (auto x : nc.v) s += x;
  return s;
}

std::vector<NormalCoordinates> by_size(std::vector<NormalCoordinates> v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const NormalCoordinates& a, const NormalCoordinates& b) { return total(a) < total(b); });
  return v;
}

}  // namespace

SurfaceSearch find_reducing_sphere(const MarkedExterior& me, const EnumerationBudget& budget) {
  SurfaceSearch r;
  BoundarySurface bs = boundary_surface(me.manifold);
  if (bs.components.size() < 2) {
    r.reason = "fewer than two boundary components";
    return r;
  }
  Enumeration e = enumerate_vertex_surfaces(me.manifold, zero_on_boundary(me.manifold), budget);
  if (!e.complete) {
    r.status = SurfaceSearch::Status::Unknown;
    r.reason = e.reason;
    return r;
  }
  Skeleton s = skeleton(me.manifold);
  for (const auto& nc : by_size(e.surfaces)) {
    Cells c(me.manifold, nc);
    if (euler_of(me.manifold, s, nc, c) != 2) continue;
    SurfaceAnalysis a = analyze(me, nc);
    if (!a.connected || !a.closed || a.sidePartition.size() != 2) continue;
    if (a.sidePartition[0].empty() || a.sidePartition[1].empty()) continue;
    r.status = SurfaceSearch::Status::Found;
    r.surface = nc;
    return r;
  }
  r.reason = "no vertex sphere separates the boundary";
  return r;
}

SurfaceSearch find_clean_reducing_disc(const MarkedExterior& me, const EnumerationBudget& budget,
                                       const std::vector<int>& regions) {
  SurfaceSearch r;
  const Triangulation& t = me.manifold;
  Skeleton s = skeleton(t);
  std::vector<int> todo = regions;
  if (todo.empty())
    for (std::size_t l = 0; l < me.regions.size(); ++l) todo.push_back(static_cast<int>(l));
  std::vector<std::string> unknown;
  for (int R : todo) {
    // boundary edges off the interior of R carry no weight
    std::vector<char> edges(s.nEdges, 0);
    for (int e = 0; e < s.nEdges; ++e) edges[e] = s.edgeBoundary[e] && s.edgeJuncture[e];
    for (std::size_t a = 0; a < t.size(); ++a)
      for (int f = 0; f < 4; ++f) {
        if (!t.adj[a][f].boundary() || t.face[a][f].label == R) continue;
        for (int k = 0; k < 6; ++k) {
          auto [x, y] = edge_vertices(k);
          if (x != f && y != f) edges[s.tetEdge[a][k]] = 1;
        }
      }
    Enumeration e = enumerate_vertex_surfaces(t, zero_on_edges(t, edges), budget);
    if (!e.complete) {
      unknown.push_back("region " + std::to_string(R) + ": " + e.reason);
      continue;
    }
    for (const auto& nc : by_size(e.surfaces)) {
      Cells c(t, nc);
      if (euler_of(t, s, nc, c) != 1) continue;
      SurfaceAnalysis an = analyze(me, nc);
      if (!an.connected || an.boundaryCurves.size() != 1 || an.boundaryCurves[0].junctureCrossings) continue;
      if (an.curveSides.size() != 2 || an.sidePartition.size() != 2) continue;
      bool inessential = false;
      for (const auto& side : an.curveSides)
        if (side.euler == 1 && !side.touchesJuncture) inessential = true;
      if (inessential) continue;
      r.status = SurfaceSearch::Status::Found;
      r.surface = nc;
      r.region = R;
      return r;
    }
  }
  r.status = SurfaceSearch::Status::Unknown;
  r.reason = unknown.empty() ? "no-candidate: no clean essential disc among vertex solutions" : unknown.front();
  for (std::size_t i = 1; i < unknown.size(); ++i) r.reason += "; " + unknown[i];
  return r;
}

std::string coordinates_to_json(const NormalCoordinates& nc) {
  nlohmann::json j;
  j["tetrahedra"] = nc.tets();
  j["coordinates"] = nc.v;
  return j.dump();
}

std::string analysis_to_json(const SurfaceAnalysis& a) {
  nlohmann::json j;
  j["eulerChar"] = a.eulerChar;
  j["closed"] = a.closed;
  j["connected"] = a.connected;
  j["componentCount"] = a.componentCount;
  j["boundaryCurves"] = nlohmann::json::array();
  for (const auto& c : a.boundaryCurves)
    j["boundaryCurves"].push_back({{"regions", c.regions}, {"arcs", c.arcs}, {"junctureCrossings", c.junctureCrossings}});
  j["curveSides"] = nlohmann::json::array();
  for (const auto& s : a.curveSides) j["curveSides"].push_back({{"euler", s.euler}, {"touchesJuncture", s.touchesJuncture}});
  j["sidePartition"] = a.sidePartition;
  return j.dump();
}

}  // namespace sgk
