#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "sgk/exterior.hpp"

namespace sgk {

namespace {

using Edge = std::pair<int, int>;
Edge key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Oriented triangulated surface with per-triangle region labels.
struct Surface {
  std::vector<std::array<int, 3>> tris;
  std::vector<int> label;
  std::vector<char> alive;
  std::map<int, std::vector<int>> at;  // vertex -> triangles (may hold dead ones)
  int nextVertex = 0;

  void add(const std::array<int, 3>& t, int l) {
    int id = static_cast<int>(tris.size());
    tris.push_back(t);
    label.push_back(l);
    alive.push_back(1);
    for (int x : t) at[x].push_back(id);
    nextVertex = std::max(nextVertex, *std::max_element(t.begin(), t.end()) + 1);
  }
  int star(int t) {
    int c = nextVertex++;
    auto [a, b, d] = tris[t];
    alive[t] = 0;
    add({a, b, c}, label[t]);
    add({b, d, c}, label[t]);
    add({d, a, c}, label[t]);
    return c;
  }
  // a live triangle at x with label l, avoiding `skip`
  int find(int x, int l, int skip = -1) const {
    for (int t : at.at(x))
      if (alive[t] && label[t] == l && t != skip) return t;
    return -1;
  }
  int find_any(int x, int skip) const {
    for (int t : at.at(x))
      if (alive[t] && t != skip) return t;
    return -1;
  }
  // the triangle containing the directed edge x -> y
  int with_directed(int x, int y) const {
    for (int t : at.at(x)) {
      if (!alive[t]) continue;
      for (int i = 0; i < 3; ++i)
        if (tris[t][i] == x && tris[t][(i + 1) % 3] == y) return t;
    }
    return -1;
  }
};

}  // namespace

FlattenedPattern flatten_pattern(const MarkedExterior& me) {
  FlattenedPattern out;
  Triangulation t = me.manifold;
  bool anyBoundary = false;
  for (std::size_t a = 0; a < t.size() && !anyBoundary; ++a)
    for (int f = 0; f < 4; ++f) anyBoundary = anyBoundary || t.adj[a][f].boundary();
  if (!anyBoundary) return out;
  // two derived subdivisions make the boundary a simplicial surface
  for (int k = 0; k < 2; ++k) t = barycentric_subdivide(t).tri;
  Skeleton s = skeleton(t);
  Surface surf;
  std::set<Edge> juncture, positive;
  for (std::size_t a = 0; a < t.size(); ++a)
    for (int f = 0; f < 4; ++f) {
      if (!t.adj[a][f].boundary()) continue;
      std::array<int, 3> loc;
      int n = 0;
      for (int x = 0; x < 4; ++x)
        if (x != f) loc[n++] = x;
      if (f % 2) std::swap(loc[0], loc[1]);
      const FaceData& fd = t.face[a][f];
      surf.add({s.tetVertex[a][loc[0]], s.tetVertex[a][loc[1]], s.tetVertex[a][loc[2]]}, fd.label);
      for (int w = 0; w < 4; ++w) {
        if (w == f) continue;
        int p = -1, q = -1;
        for (int y = 0; y < 4; ++y)
          if (y != f && y != w) (p < 0 ? p : q) = y;
        Edge e = key(s.tetVertex[a][p], s.tetVertex[a][q]);
        if (fd.juncture >> w & 1) juncture.insert(e);
        if (fd.positive >> w & 1) positive.insert(e);
      }
    }
  std::set<Edge> pattern(juncture.begin(), juncture.end());

  auto vertexColor = [&](const std::string& v) { return me.graph.vertexColor ? me.graph.vertexColor->at(v) : 0u; };
  auto edgeColor = [&](const std::string& e) { return me.graph.edgeColor ? me.graph.edgeColor->at(e) : 0u; };
  auto arcs = [&](int p, int side, unsigned count, int skip) {
    for (unsigned k = 0; k < count; ++k) {
      int tri = side >= 0 ? surf.find(p, side, skip) : surf.find_any(p, skip);
      int c = surf.star(tri);
      pattern.insert(key(p, c));
    }
  };

  // walk each juncture with its vertex region on the left
  std::map<int, std::vector<int>> jnbr;
  for (auto [x, y] : juncture) {
    jnbr[x].push_back(y);
    jnbr[y].push_back(x);
  }
  std::set<int> done;
  for (auto [x0, y0] : juncture) {
    if (done.count(x0)) continue;
    std::vector<int> cyc{x0};
    int prev = x0, cur = y0;
    while (cur != x0) {
      cyc.push_back(cur);
      int nxt = jnbr[cur][0] == prev ? jnbr[cur][1] : jnbr[cur][0];
      prev = cur;
      cur = nxt;
    }
    for (int v : cyc) done.insert(v);
    int tri = surf.with_directed(cyc[0], cyc[1]);
    int other = surf.with_directed(cyc[1], cyc[0]);
    if (me.regions[surf.label[tri]].kind != Region::Kind::Vertex) {
      std::reverse(cyc.begin(), cyc.end());
      std::swap(tri, other);
    }
    int vr = surf.label[tri], er = surf.label[other];
    // positive flag of this juncture
    bool m = false;
    for (std::size_t i = 0; i < cyc.size(); ++i)
      if (positive.count(key(cyc[i], cyc[(i + 1) % cyc.size()]))) m = true;
    unsigned k = vertexColor(me.regions[vr].id), l = edgeColor(me.regions[er].id);
    arcs(cyc[0], vr, 1, -1);
    arcs(cyc[1], vr, 2, -1);
    arcs(cyc[1], er, m ? 1 : 0, -1);
    arcs(cyc[2], vr, k + 3, -1);
    arcs(cyc[2], er, l, -1);
  }

  // isolated vertices: a marked triangle with arcs leaving it
  std::map<int, int> trianglesOf;
  for (std::size_t i = 0; i < surf.tris.size(); ++i)
    if (surf.alive[i]) trianglesOf.emplace(surf.label[i], static_cast<int>(i));
  std::set<int> withJuncture;
  for (std::size_t i = 0; i < surf.tris.size(); ++i) {
    if (!surf.alive[i]) continue;
    const auto& tr = surf.tris[i];
    for (int j = 0; j < 3; ++j)
      if (juncture.count(key(tr[j], tr[(j + 1) % 3]))) withJuncture.insert(surf.label[i]);
  }
  for (auto [l, tri] : trianglesOf) {
    if (withJuncture.count(l) || me.regions[l].kind != Region::Kind::Vertex) continue;
    auto [a, b, c] = surf.tris[tri];
    pattern.insert(key(a, b));
    pattern.insert(key(b, c));
    pattern.insert(key(c, a));
    // outside on the left: a -> c -> b
    arcs(a, -1, 1, tri);
    arcs(c, -1, 2, tri);
    arcs(b, -1, vertexColor(me.regions[l].id) + 3, tri);
  }

  for (std::size_t i = 0; i < surf.tris.size(); ++i)
    if (surf.alive[i]) out.triangles.push_back(surf.tris[i]);
  for (auto [x, y] : pattern) out.edges.push_back({x, y});
  return out;
}

PatternReading read_pattern(const FlattenedPattern& p) {
  PatternReading r;
  std::map<int, std::vector<int>> nbr;
  for (auto [x, y] : p.edges) {
    nbr[x].push_back(y);
    nbr[y].push_back(x);
  }
  // ccw successor around each vertex: for (x, a, b) the fan turns from a to b
  std::map<int, std::map<int, int>> succ;
  std::map<int, std::set<int>> tnbr;
  for (const auto& t : p.triangles)
    for (int i = 0; i < 3; ++i) {
      succ[t[i]][t[(i + 1) % 3]] = t[(i + 2) % 3];
      tnbr[t[i]].insert(t[(i + 1) % 3]);
      tnbr[t[i]].insert(t[(i + 2) % 3]);
    }
  {
    std::map<int, int> parent;
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    for (const auto& t : p.triangles)
      for (int x : t) parent.emplace(x, x);
    for (const auto& t : p.triangles) {
      parent[root(t[1])] = root(t[0]);
      parent[root(t[2])] = root(t[0]);
    }
    std::set<int> roots;
    for (auto& [x, px] : parent) roots.insert(root(x));
    r.boundaryComponents = static_cast<int>(roots.size());
  }
  auto isArcEnd = [&](int x) { return nbr[x].size() == 1; };
  std::map<int, std::vector<int>> cnbr;
  for (auto [x, y] : p.edges)
    if (!isArcEnd(x) && !isArcEnd(y)) {
      cnbr[x].push_back(y);
      cnbr[y].push_back(x);
    }
  std::set<int> done;
  for (auto& [x0, list] : cnbr) {
    if (done.count(x0) || list.size() != 2) continue;
    std::vector<int> cyc{x0};
    int prev = x0, cur = list[0];
    bool ok = true;
    while (cur != x0) {
      if (cnbr[cur].size() != 2) {
        ok = false;
        break;
      }
      cyc.push_back(cur);
      int nxt = cnbr[cur][0] == prev ? cnbr[cur][1] : cnbr[cur][0];
      prev = cur;
      cur = nxt;
    }
    for (int v : cyc) done.insert(v);
    if (!ok) continue;
    std::size_t n = cyc.size();
    struct Point {
      std::size_t pos;
      int left = 0, right = 0;
    };
    std::vector<Point> pts;
    for (std::size_t i = 0; i < n; ++i) {
      int v = cyc[i], before = cyc[(i + n - 1) % n], after = cyc[(i + 1) % n];
      Point pt{i};
      // left of travel: ccw from `after` to `before`
      std::set<int> left;
      int w = after;
      for (std::size_t guard = 0; guard < tnbr[v].size() + 1; ++guard) {
        auto it = succ[v].find(w);
        if (it == succ[v].end()) break;
        w = it->second;
        if (w == before) break;
        left.insert(w);
      }
      for (int y : nbr[v])
        if (isArcEnd(y)) (left.count(y) ? pt.left : pt.right)++;
      if (pt.left + pt.right) pts.push_back(pt);
    }
    if (pts.size() != 3) continue;
    PatternReading::Mark mark;
    bool upLeft = std::all_of(pts.begin(), pts.end(), [](const Point& q) { return q.left > 0; });
    std::vector<std::pair<int, int>> ud;  // (up, down) in cycle order
    for (const auto& q : pts) ud.push_back(upLeft ? std::make_pair(q.left, q.right) : std::make_pair(q.right, q.left));
    // p1 has one arc up, p2 two, p3 the rest
    int i1 = -1, i2 = -1;
    for (int i = 0; i < 3; ++i) {
      if (ud[i].first == 1 && i1 < 0)
        i1 = i;
      else if (ud[i].first == 2 && i2 < 0)
        i2 = i;
    }
    if (i1 < 0 || i2 < 0) continue;
    int i3 = 3 - i1 - i2;
    mark.upArcs = {ud[i1].first, ud[i2].first, ud[i3].first};
    mark.downArcs = {ud[i1].second, ud[i2].second, ud[i3].second};
    // along the direction with the up side on the left, p1 p2 p3 come in order
    bool forward = (i2 == (i1 + 1) % 3) && (i3 == (i2 + 1) % 3);
    mark.orientationAgrees = upLeft ? forward : !forward;
    mark.closedTriangle = n == 3;
    r.marks.push_back(mark);
  }
  return r;
}

}  // namespace sgk
