#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "normal_cells.hpp"
#include "sgk/surfaces.hpp"

namespace sgk {

using cells::Cells;
using cells::Dsu;

namespace {

enum Kind { Corner, EdgePt, Chamber, Piece, Disc };

// A point of the cut complex, named inside one tetrahedron.
struct LP {
  int kind = 0;
  int tet = 0;
  int a = 0;
  int b = 0;
  std::int64_t k = 0;
  auto operator<=>(const LP&) const = default;
};

using Vec3 = std::array<double, 3>;

struct Polygon {
  LP center;
  std::vector<LP> cycle;
  std::vector<int> chambers;
  bool disc = false;
  int tet = 0;
  int face = -1;
};

struct Cut {
  Triangulation tri;
  std::vector<char> surface;  // face 0 of this tetrahedron is a copy of the surface
  std::vector<int> comp;
  int comps = 0;
};

double det(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
}

Cut cut_along(const Triangulation& t, const NormalCoordinates& nc) {
  Cells c(t, nc);
  const int n = static_cast<int>(t.size());
  auto W = [&](int a, int x, int y) { return edge_weight(nc, a, x, y); };
  auto ep = [&](int a, int v, int w, std::int64_t i) {
    int x = std::min(v, w), y = std::max(v, w);
    return LP{EdgePt, a, x, y, v < w ? i : W(a, x, y) - 1 - i};
  };
  auto corner = [](int a, int v) { return LP{Corner, a, v, 0, 0}; };

  // planar placement of the discs inside each tetrahedron, in barycentric coordinates
  auto place = [&](const LP& p) -> std::array<double, 4> {
    std::array<double, 4> l{0, 0, 0, 0};
    if (p.kind == Corner) {
      l[p.a] = 1;
      return l;
    }
    int a = p.tet, x = p.a, y = p.b;
    std::int64_t maxT = 0;
    for (int v = 0; v < 4; ++v) maxT = std::max(maxT, c.T(a, v));
    double delta = 1.0 / (4.0 * static_cast<double>(maxT + 1));
    std::int64_t k = p.k, Tx = c.T(a, x), w = W(a, x, y);
    std::int64_t q = c.quad[a] >= 0 && c.quad[a] != quad_type(x, y) ? c.Q[a] : 0;
    double lx;
    if (k < Tx) {
      lx = 1 - static_cast<double>(k + 1) * delta;
    } else if (k < Tx + q) {
      std::int64_t m = k - Tx;
      std::int64_t j = cells::pair_a(c.quad[a], x) ? m : q - 1 - m;
      double cj = 0.75 - 0.5 * static_cast<double>(j + 1) / static_cast<double>(q + 1);
      lx = cells::pair_a(c.quad[a], x) ? cj : 1 - cj;
    } else {
      lx = static_cast<double>(w - k) * delta;
    }
    l[x] = lx;
    l[y] = 1 - lx;
    return l;
  };

  std::vector<Polygon> polys;
  for (int a = 0; a < n; ++a) {
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> cyc;
      int m = 0;
      for (int v = 0; v < 4; ++v)
        if (v != f) cyc[m++] = v;
      for (int j = 0; j < 3; ++j) {
        int v = cyc[j], w = cyc[(j + 1) % 3], x = cyc[(j + 2) % 3];
        for (std::int64_t i = 0; i < c.arcs(a, f, v); ++i) {
          Polygon p;
          p.center = LP{Piece, a, f, v, i};
          if (i == 0)
            p.cycle = {corner(a, v), ep(a, v, w, 0), ep(a, v, x, 0)};
          else
            p.cycle = {ep(a, v, w, i - 1), ep(a, v, w, i), ep(a, v, x, i), ep(a, v, x, i - 1)};
          p.chambers = {c.piece_chamber(a, f, v, i)};
          p.tet = a;
          p.face = f;
          polys.push_back(p);
        }
      }
      Polygon p;
      p.center = LP{Piece, a, f, -1, 0};
      for (int j = 0; j < 3; ++j) {
        int v = cyc[j], prev = cyc[(j + 2) % 3], next = cyc[(j + 1) % 3];
        std::int64_t av = c.arcs(a, f, v);
        if (av == 0) {
          p.cycle.push_back(corner(a, v));
        } else {
          p.cycle.push_back(ep(a, v, prev, av - 1));
          p.cycle.push_back(ep(a, v, next, av - 1));
        }
      }
      p.chambers = {c.piece_chamber(a, f, -1, 0)};
      p.tet = a;
      p.face = f;
      polys.push_back(p);
    }
    for (int v = 0; v < 4; ++v)
      for (std::int64_t i = 0; i < c.T(a, v); ++i) {
        Polygon p;
        p.center = LP{Disc, a, 0, 0, c.tri_disc(a, v, i)};
        for (int w = 0; w < 4; ++w)
          if (w != v) p.cycle.push_back(ep(a, v, w, i));
        auto s = c.tri_sides(a, v, i);
        p.chambers = {s[0], s[1]};
        p.disc = true;
        p.tet = a;
        polys.push_back(p);
      }
    if (c.Q[a] > 0) {
      int q = c.quad[a], pv = q + 1, r = -1, s = -1;
      for (int u = 1; u < 4; ++u)
        if (u != pv) (r < 0 ? r : s) = u;
      for (std::int64_t j = 0; j < c.Q[a]; ++j) {
        Polygon p;
        p.center = LP{Disc, a, 0, 0, c.quad_disc(a, j)};
        p.cycle = {ep(a, 0, r, c.T(a, 0) + j), ep(a, pv, r, c.T(a, pv) + j), ep(a, pv, s, c.T(a, pv) + j),
                   ep(a, 0, s, c.T(a, 0) + j)};
        auto sd = c.quad_sides(a, j);
        p.chambers = {sd[0], sd[1]};
        p.disc = true;
        p.tet = a;
        polys.push_back(p);
      }
    }
  }

  // positions: corners and edge points directly, centres as averages
  auto pos3 = [&](const std::array<double, 4>& l) { return Vec3{l[1], l[2], l[3]}; };
  std::map<int, std::pair<Vec3, int>> chamberSum;
  std::vector<Vec3> centre(polys.size());
  for (std::size_t i = 0; i < polys.size(); ++i) {
    Vec3 sum{0, 0, 0};
    for (const LP& p : polys[i].cycle) {
      Vec3 x = pos3(place(p));
      for (int d = 0; d < 3; ++d) sum[d] += x[d];
    }
    for (int d = 0; d < 3; ++d) centre[i][d] = sum[d] / static_cast<double>(polys[i].cycle.size());
    for (int X : polys[i].chambers) {
      auto& cs = chamberSum[X];
      for (const LP& p : polys[i].cycle) {
        Vec3 x = pos3(place(p));
        for (int d = 0; d < 3; ++d) cs.first[d] += x[d];
        cs.second++;
      }
    }
  }

  struct NewTet {
    std::array<LP, 4> v;
    int poly;
  };
  std::vector<NewTet> tets;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    const Polygon& p = polys[i];
    for (int X : p.chambers) {
      const auto& cs = chamberSum[X];
      Vec3 xc{cs.first[0] / cs.second, cs.first[1] / cs.second, cs.first[2] / cs.second};
      std::size_t m = p.cycle.size();
      for (std::size_t j = 0; j < m; ++j) {
        NewTet nt{{LP{Chamber, p.tet, 0, 0, X}, p.center, p.cycle[j], p.cycle[(j + 1) % m]}, static_cast<int>(i)};
        Vec3 a = pos3(place(p.cycle[j])), b = pos3(place(p.cycle[(j + 1) % m]));
        Vec3 u, v, w;
        for (int d = 0; d < 3; ++d) {
          u[d] = centre[i][d] - xc[d];
          v[d] = a[d] - xc[d];
          w[d] = b[d] - xc[d];
        }
        if (det(u, v, w) < 0) std::swap(nt.v[2], nt.v[3]);
        tets.push_back(nt);
      }
    }
  }

  Cut out;
  for (std::size_t i = 0; i < tets.size(); ++i) out.tri.add_tet();
  out.surface.assign(tets.size(), 0);
  using Key = std::array<LP, 3>;
  auto key_of = [](std::array<LP, 3> k) {
    std::sort(k.begin(), k.end());
    return k;
  };
  auto face_key = [&](const NewTet& nt, int j) {
    Key k;
    int m = 0;
    for (int i = 0; i < 4; ++i)
      if (i != j) k[m++] = nt.v[i];
    return key_of(k);
  };
  std::map<Key, std::vector<std::pair<int, int>>> faces;
  for (std::size_t i = 0; i < tets.size(); ++i)
    for (int j = 0; j < 4; ++j) {
      const Polygon& p = polys[tets[i].poly];
      if (j == 0 && p.disc) {
        out.surface[i] = 1;
        continue;
      }
      faces[face_key(tets[i], j)].push_back({static_cast<int>(i), j});
    }
  auto translate = [&](const LP& p, int a, int f) {
    const Gluing& g = t.adj[a][f];
    LP q = p;
    q.tet = g.tet;
    if (p.kind == Corner) {
      q.a = g.perm[p.a];
    } else if (p.kind == EdgePt) {
      int x = g.perm[p.a], y = g.perm[p.b];
      if (x < y) {
        q.a = x;
        q.b = y;
      } else {
        q.a = y;
        q.b = x;
        q.k = W(a, p.a, p.b) - 1 - p.k;
      }
    } else if (p.kind == Piece) {
      q.a = g.perm[p.a];
      q.b = p.b < 0 ? -1 : g.perm[p.b];
    }
    return q;
  };
  auto glue = [&](int T, int j, int T2, int j2, auto&& tr) {
    std::array<int, 4> img{};
    for (int m = 0; m < 4; ++m) {
      if (m == j) {
        img[m] = j2;
        continue;
      }
      LP x = tr(tets[T].v[m]);
      for (int m2 = 0; m2 < 4; ++m2)
        if (m2 != j2 && tets[T2].v[m2] == x) img[m] = m2;
    }
    out.tri.join(T, j, T2, Perm4(img[0], img[1], img[2], img[3]));
  };
  auto same = [](const LP& p) { return p; };
  for (auto& [k, list] : faces) {
    if (list.size() == 2) {
      glue(list[0].first, list[0].second, list[1].first, list[1].second, same);
      continue;
    }
    auto [T, j] = list[0];
    const Polygon& p = polys[tets[T].poly];
    if (j != 0 || list.size() != 1) throw Error(ErrorCode::InvalidTriangulation, "cut complex is malformed");
    int a = p.tet, f = p.face;
    if (t.adj[a][f].boundary()) {
      const FaceData& fd = t.face[a][f];
      FaceData nd;
      nd.label = fd.label;
      // the outer edge of this triangle may run along an edge of the old face
      auto ends = [](const LP& x) {
        std::set<int> s;
        if (x.kind == Corner) s.insert(x.a);
        if (x.kind == EdgePt) s.insert({x.a, x.b});
        return s;
      };
      std::set<int> u = ends(tets[T].v[2]);
      std::set<int> u2 = ends(tets[T].v[3]);
      if (!u.empty() && !u2.empty()) {
        u.insert(u2.begin(), u2.end());
        if (u.size() == 2) {
          int w = 6 - f - *u.begin() - *u.rbegin();
          if (fd.juncture >> w & 1) nd.juncture |= 2;
          if (fd.positive >> w & 1) nd.positive |= 2;
        }
      }
      out.tri.face[T][0] = nd;
      continue;
    }
    if (!out.tri.adj[T][0].boundary()) continue;
    std::array<LP, 3> other{};
    for (int m = 1; m < 4; ++m) other[m - 1] = translate(tets[T].v[m], a, f);
    auto it = faces.find(key_of(other));
    if (it == faces.end() || it->second.size() != 1) throw Error(ErrorCode::InvalidTriangulation, "cut pieces do not match");
    glue(T, 0, it->second[0].first, it->second[0].second, [&](const LP& x) { return translate(x, a, f); });
  }

  Dsu d(tets.size());
  for (std::size_t i = 0; i < tets.size(); ++i)
    for (int j = 0; j < 4; ++j)
      if (!out.tri.adj[i][j].boundary()) d.unite(static_cast<int>(i), out.tri.adj[i][j].tet);
  std::map<int, int> ids;
  out.comp.resize(tets.size());
  for (std::size_t i = 0; i < tets.size(); ++i) {
    int r = d.find(static_cast<int>(i));
    if (!ids.count(r)) ids[r] = static_cast<int>(ids.size());
    out.comp[i] = ids[r];
  }
  out.comps = static_cast<int>(ids.size());
  return out;
}

Triangulation extract(const Triangulation& t, const std::vector<int>& comp, int which) {
  std::vector<int> idx(t.size(), -1);
  int m = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (comp[i] == which) idx[i] = m++;
  Triangulation o;
  for (int i = 0; i < m; ++i) o.add_tet();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (idx[i] < 0) continue;
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = t.adj[i][f];
      if (g.boundary())
        o.face[idx[i]][f] = t.face[i][f];
      else
        o.adj[idx[i]][f] = {idx[g.tet], g.perm};
    }
  }
  return o;
}

// Relabels boundary faces through `remap` and builds the exterior of the
// sub-graph whose regions survive, plus any `extra` vertices.
MarkedExterior side_exterior(const MarkedExterior& me, Triangulation tri, const std::set<std::string>& extra) {
  std::set<int> present;
  for (std::size_t a = 0; a < tri.size(); ++a)
    for (int f = 0; f < 4; ++f)
      if (tri.adj[a][f].boundary()) present.insert(tri.face[a][f].label);
  std::set<std::string> vs = extra, es;
  for (int l : present) {
    const Region& r = me.regions.at(l);
    (r.kind == Region::Kind::Vertex ? vs : es).insert(r.id);
  }
  MarkedExterior out;
  out.graph = induced_subgraph(me.graph, vs, es);
  out.regions = regions_of(out.graph);
  std::map<int, int> remap;
  for (int l : present) {
    const Region& r = me.regions[l];
    remap[l] = r.kind == Region::Kind::Vertex ? out.region_of_vertex(r.id) : out.region_of_edge(r.id);
  }
  for (std::size_t a = 0; a < tri.size(); ++a)
    for (int f = 0; f < 4; ++f)
      if (tri.adj[a][f].boundary()) tri.face[a][f].label = remap[tri.face[a][f].label];
  out.manifold = is_oriented(tri) ? tri : validate_and_orient(tri);
  return simplify_exterior(out);
}

int smallest_label(const Triangulation& t, const std::vector<int>& comp, int which, int skip) {
  int best = 1 << 30;
  for (std::size_t a = 0; a < t.size(); ++a)
    if (comp[a] == which)
      for (int f = 0; f < 4; ++f)
        if (t.adj[a][f].boundary() && t.face[a][f].label != skip) best = std::min(best, t.face[a][f].label);
  return best;
}

Triangulation oriented(const Triangulation& t) { return is_oriented(t) ? t : validate_and_orient(t); }

}  // namespace

std::pair<MarkedExterior, MarkedExterior> split_along_sphere(const MarkedExterior& me, const NormalCoordinates& s) {
  Triangulation base = oriented(me.manifold);
  MarkedExterior m = me;
  m.manifold = base;
  if (!satisfies_matching(base, s) || !is_admissible(s))
    throw Error(ErrorCode::NotReducing, "coordinates are not an admissible normal surface");
  SurfaceAnalysis an = analyze(m, s);
  if (!an.closed) throw Error(ErrorCode::NotReducing, "sphere meets the boundary");
  if (!an.connected || an.eulerChar != 2) throw Error(ErrorCode::NotReducing, "surface is not a connected sphere");
  if (an.sidePartition.size() != 2 || an.sidePartition[0].empty() || an.sidePartition[1].empty())
    throw Error(ErrorCode::NotReducing, "a side of the sphere holds no boundary component");
  Cut cut = cut_along(base, s);
  if (cut.comps != 2) throw Error(ErrorCode::NotReducing, "sphere does not separate");
  // cone off each copy of the sphere
  const int n = static_cast<int>(cut.tri.size());
  struct Across {
    int z, tet, x, y;
  };
  std::vector<std::vector<Across>> across(n);
  for (int T = 0; T < n; ++T) {
    if (!cut.surface[T]) continue;
    for (int z = 1; z < 4; ++z) {
      int x = z == 1 ? 2 : 1, y = z == 3 ? 2 : 3;
      cells::EdgeStep o = cells::boundary_across(cut.tri, T, 0, x, y);
      if (o.tet < 0 || o.face != 0 || !cut.surface[o.tet]) throw Error(ErrorCode::InvalidTriangulation, "sphere copy is not closed");
      across[T].push_back({z, o.tet, o.x, o.y});
    }
  }
  std::vector<int> cone(n, -1);
  for (int T = 0; T < n; ++T)
    if (cut.surface[T]) {
      cone[T] = cut.tri.add_tet();
      cut.tri.join(T, 0, cone[T], Perm4());
      cut.comp.push_back(cut.comp[T]);
    }
  for (int T = 0; T < n; ++T)
    for (const Across& o : across[T]) {
      if (!cut.tri.adj[cone[T]][o.z].boundary()) continue;
      int x = o.z == 1 ? 2 : 1, y = o.z == 3 ? 2 : 3;
      std::array<int, 4> img{};
      img[0] = 0;
      img[x] = o.x;
      img[y] = o.y;
      img[o.z] = 6 - o.x - o.y;
      cut.tri.join(cone[T], o.z, cone[o.tet], Perm4(img[0], img[1], img[2], img[3]));
    }
  int first = smallest_label(cut.tri, cut.comp, 0, -1) <= smallest_label(cut.tri, cut.comp, 1, -1) ? 0 : 1;
  return {side_exterior(me, extract(cut.tri, cut.comp, first), {}),
          side_exterior(me, extract(cut.tri, cut.comp, 1 - first), {})};
}

DiscSplit split_along_disc(const MarkedExterior& me, const NormalCoordinates& d) {
  Triangulation base = oriented(me.manifold);
  MarkedExterior m = me;
  m.manifold = base;
  if (!satisfies_matching(base, d) || !is_admissible(d))
    throw Error(ErrorCode::NotReducing, "coordinates are not an admissible normal surface");
  SurfaceAnalysis an = analyze(m, d);
  if (!an.connected || an.eulerChar != 1 || an.boundaryCurves.size() != 1)
    throw Error(ErrorCode::NotReducing, "surface is not a properly embedded disc");
  if (an.boundaryCurves[0].junctureCrossings || an.boundaryCurves[0].regions.size() != 1)
    throw Error(ErrorCode::NotClean, "disc boundary meets the pattern");
  if (an.curveSides.size() != 2) throw Error(ErrorCode::NotReducing, "disc boundary does not separate its boundary component");
  for (const auto& side : an.curveSides)
    if (side.euler == 1 && !side.touchesJuncture) throw Error(ErrorCode::NotReducing, "disc boundary bounds a clean disc");
  if (an.sidePartition.size() != 2) throw Error(ErrorCode::NotReducing, "disc does not separate");
  const int R = *an.boundaryCurves[0].regions.begin();
  Cut cut = cut_along(base, d);
  if (cut.comps != 2) throw Error(ErrorCode::NotReducing, "disc does not separate");
  Triangulation& x = cut.tri;
  const int n = static_cast<int>(x.size());
  auto sideHas = [&](int side, int label) {
    for (int T = 0; T < n; ++T)
      if (cut.comp[T] == side && x.adj[T][0].boundary() && !cut.surface[T] && x.face[T][0].label == label) return true;
    return false;
  };

  std::string v;
  int Rv = R;
  int near = -1;  // side whose part of the edge region joins the vertex region
  bool newPositive = false;
  if (me.regions[R].kind == Region::Kind::Vertex) {
    v = me.regions[R].id;
  } else {
    const GraphEdge* e = me.graph.edge(me.regions[R].id);
    if (e->isLoop()) throw Error(ErrorCode::NotReducing, "disc boundary lies on a loop edge");
    for (const std::string& cand : {e->u, e->v}) {
      int rv = me.region_of_vertex(cand);
      int s = sideHas(0, rv) ? 0 : 1;
      bool otherEdge = false;
      for (std::size_t l = 0; l < me.regions.size(); ++l)
        if (me.regions[l].kind == Region::Kind::Edge && static_cast<int>(l) != R && sideHas(s, static_cast<int>(l)))
          otherEdge = true;
      if (otherEdge) {
        v = cand;
        Rv = rv;
        near = s;
        break;
      }
    }
    if (v.empty()) throw Error(ErrorCode::NotReducing, "no vertex summand on either side of the disc");
    for (const Juncture& j : junctures(me))
      if (j.vertexRegion == Rv && j.edgeRegion == R) newPositive = newPositive || j.positive;
  }
  for (int T = 0; T < n; ++T) {
    if (!x.adj[T][0].boundary()) continue;
    if (cut.surface[T] || (cut.comp[T] == near && x.face[T][0].label == R)) x.face[T][0].label = Rv;
  }
  // junctures follow the labels
  std::vector<FaceData> fresh(n);
  for (int T = 0; T < n; ++T) {
    if (!x.adj[T][0].boundary()) continue;
    FaceData fd = x.face[T][0];
    fd.juncture = fd.positive = 0;
    for (int z = 1; z < 4; ++z) {
      int a = z == 1 ? 2 : 1, b = z == 3 ? 2 : 3;
      cells::EdgeStep o = cells::boundary_across(x, T, 0, a, b);
      if (x.face[o.tet][o.face].label == fd.label) continue;
      fd.juncture |= static_cast<std::uint8_t>(1u << z);
      if (cut.surface[T] != cut.surface[o.tet]) {
        if (newPositive) fd.positive |= static_cast<std::uint8_t>(1u << z);
      } else if (x.face[T][0].positive >> z & 1) {
        fd.positive |= static_cast<std::uint8_t>(1u << z);
      }
    }
    fresh[T] = fd;
  }
  for (int T = 0; T < n; ++T)
    if (x.adj[T][0].boundary()) x.face[T][0] = fresh[T];
  int first = smallest_label(x, cut.comp, 0, Rv) <= smallest_label(x, cut.comp, 1, Rv) ? 0 : 1;
  DiscSplit out;
  out.vertex = v;
  out.first = side_exterior(me, extract(x, cut.comp, first), {v});
  out.second = side_exterior(me, extract(x, cut.comp, 1 - first), {v});
  return out;
}

}  // namespace sgk
