#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "sgk/tri.hpp"

namespace sgk {

namespace {

struct DSU {
  std::vector<int> p;
  explicit DSU(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[b] = a;
    return true;
  }
};

std::uint8_t remap_mask(std::uint8_t mask, const Perm4& oldToNew) {
  std::uint8_t out = 0;
  for (int c = 0; c < 4; ++c)
    if (mask >> c & 1) out |= static_cast<std::uint8_t>(1u << oldToNew[c]);
  return out;
}

FaceData remap_face(const FaceData& fd, const Perm4& oldToNew) {
  return {fd.label, remap_mask(fd.juncture, oldToNew), remap_mask(fd.positive, oldToNew)};
}

using Labels = std::array<int, 4>;

struct Simplifier {
  Triangulation t;
  std::vector<char> dead;
  std::vector<char> dirty;
  Skeleton s;
  std::vector<std::vector<int>> vertexTets;
  const SimplifyOptions& opt;
  SimplifyStats& stats;
  std::mt19937_64 rng;

  Simplifier(const Triangulation& in, const SimplifyOptions& o, SimplifyStats& st) : t(in), opt(o), stats(st), rng(o.seed) {}

  bool budget_left() {
    if (stats.attempted >= opt.budget) {
      stats.budgetExhausted = true;
      return false;
    }
    return true;
  }

  void compact() {
    std::vector<int> nid(t.size(), -1);
    Triangulation o;
    for (std::size_t a = 0; a < t.size(); ++a)
      if (!dead.size() || !dead[a]) nid[a] = o.add_tet();
    for (std::size_t a = 0; a < t.size(); ++a) {
      if (nid[a] < 0) continue;
      int na = nid[a];
      o.locked[na] = t.locked[a];
      for (int f = 0; f < 4; ++f) {
        const Gluing& g = t.adj[a][f];
        o.adj[na][f] = g.boundary() ? Gluing{} : Gluing{nid[g.tet], g.perm};
        o.face[na][f] = t.face[a][f];
      }
    }
    t = std::move(o);
    dead.assign(t.size(), 0);
    dirty.assign(t.size(), 0);
  }

  void refresh() {
    compact();
    s = skeleton(t);
    vertexTets.assign(s.nVertices, {});
    for (std::size_t a = 0; a < t.size(); ++a) {
      std::set<int> vs(s.tetVertex[a].begin(), s.tetVertex[a].end());
      for (int v : vs) vertexTets[v].push_back(static_cast<int>(a));
    }
  }

  bool usable(int a) const { return !dead[a] && !dirty[a] && !t.locked[a]; }

  int new_tet() {
    int k = t.add_tet();
    dead.push_back(0);
    dirty.push_back(1);
    return k;
  }

  // Replaces the old tetrahedra (with local vertex labels) by fresh ones built
  // on the same labels.  Fails without side effects if the shapes disagree.
  bool replace_local(const std::vector<std::pair<int, Labels>>& old, const std::vector<Labels>& fresh) {
    std::map<int, int> pos;
    for (std::size_t i = 0; i < old.size(); ++i) {
      if (pos.count(old[i].first)) return false;
      pos[old[i].first] = static_cast<int>(i);
    }
    auto key = [](const Labels& l, int f) {
      std::array<int, 3> k;
      int j = 0;
      for (int v = 0; v < 4; ++v)
        if (v != f) k[j++] = l[v];
      std::sort(k.begin(), k.end());
      return k;
    };
    std::map<std::array<int, 3>, std::pair<int, int>> external;  // key -> (old index, face)
    for (std::size_t i = 0; i < old.size(); ++i) {
      const auto& [tet, lab] = old[i];
      for (int f = 0; f < 4; ++f) {
        const Gluing& g = t.adj[tet][f];
        bool internal = false;
        if (!g.boundary() && pos.count(g.tet)) {
          const Labels& l2 = old[pos[g.tet]].second;
          internal = true;
          for (int v = 0; v < 4; ++v)
            if (v != f && lab[v] != l2[g.perm[v]]) internal = false;
          if (lab[f] == l2[g.perm[f]]) internal = false;
        }
        if (internal) continue;
        auto k = key(lab, f);
        if (external.count(k)) return false;
        external[k] = {static_cast<int>(i), f};
      }
    }
    std::map<std::array<int, 3>, std::vector<std::pair<int, int>>> freshFaces;
    for (std::size_t k = 0; k < fresh.size(); ++k)
      for (int f = 0; f < 4; ++f) freshFaces[key(fresh[k], f)].push_back({static_cast<int>(k), f});
    std::size_t usedExternal = 0;
    for (const auto& [k, v] : freshFaces) {
      if (v.size() == 2) {
        if (external.count(k)) return false;
      } else if (v.size() == 1) {
        if (!external.count(k)) return false;
        ++usedExternal;
      } else {
        return false;
      }
    }
    if (usedExternal != external.size()) return false;
    // orient each fresh tet from one of its external faces
    std::vector<Labels> order(fresh.size());
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      int extFace = -1;
      for (int f = 0; f < 4 && extFace < 0; ++f)
        if (freshFaces[key(fresh[k], f)].size() == 1) extFace = f;
      if (extFace < 0) return false;
      auto fk = key(fresh[k], extFace);
      auto [oi, of] = external[fk];
      const Labels& ol = old[oi].second;
      // parity of old tet's order relative to (sorted face labels, apex)
      Labels target{fk[0], fk[1], fk[2], ol[of]};
      Perm4 p;  // position in target -> position in old order
      for (int i = 0; i < 4; ++i)
        for (int v = 0; v < 4; ++v)
          if (ol[v] == target[i]) p.m[i] = static_cast<std::uint8_t>(v);
      Labels mine{fk[0], fk[1], fk[2], fresh[k][extFace]};
      if (p.sign() < 0) std::swap(mine[0], mine[1]);
      order[k] = mine;
    }
    auto vertexOf = [](const Labels& l, int label) {
      for (int v = 0; v < 4; ++v)
        if (l[v] == label) return v;
      return -1;
    };
    // assemble gluings before committing
    struct G {
      int kind;  // 0 fresh, 1 outside, 2 boundary
      int tet;
      Perm4 perm;
      FaceData fd;
    };
    std::vector<std::array<G, 4>> plan(fresh.size());
    std::map<std::pair<int, int>, std::pair<int, int>> replacement;  // old (index, face) -> fresh (k, face)
    for (std::size_t k = 0; k < fresh.size(); ++k)
      for (int f = 0; f < 4; ++f) {
        auto fk = key(order[k], f);
        if (freshFaces[fk].size() == 1) replacement[external[fk]] = {static_cast<int>(k), f};
      }
    auto newToOld = [&](int k, int f, int oi, int of) {
      Perm4 mu;
      const Labels& ol = old[oi].second;
      for (int v = 0; v < 4; ++v) mu.m[v] = static_cast<std::uint8_t>(v == f ? of : vertexOf(ol, order[k][v]));
      return mu;
    };
    for (std::size_t k = 0; k < fresh.size(); ++k)
      for (int f = 0; f < 4; ++f) {
        auto fk = key(order[k], f);
        const auto& users = freshFaces[fk];
        if (users.size() == 2) {
          int other = users[0].first == static_cast<int>(k) ? users[1].first : users[0].first;
          Perm4 p;
          for (int v = 0; v < 4; ++v) {
            if (v == f) continue;
            p.m[v] = static_cast<std::uint8_t>(vertexOf(order[other], order[k][v]));
          }
          int missing = 6 - p.m[(f + 1) % 4] - p.m[(f + 2) % 4] - p.m[(f + 3) % 4];
          p.m[f] = static_cast<std::uint8_t>(missing);
          if (p.sign() != -1) return false;
          plan[k][f] = {0, other, p, {}};
          continue;
        }
        auto [oi, of] = external[fk];
        Perm4 mu = newToOld(static_cast<int>(k), f, oi, of);
        if (mu.m[f] != of) return false;
        int oldTet = old[oi].first;
        const Gluing& g = t.adj[oldTet][of];
        if (g.boundary()) {
          plan[k][f] = {2, -1, Perm4(), remap_face(t.face[oldTet][of], mu.inverse())};
          continue;
        }
        if (pos.count(g.tet)) {
          auto other = replacement.at({pos[g.tet], g.perm[of]});
          Perm4 mu2 = newToOld(other.first, other.second, pos[g.tet], g.perm[of]);
          Perm4 p = mu2.inverse() * g.perm * mu;
          if (p.sign() != -1) return false;
          plan[k][f] = {0, other.first, p, {}};
        } else {
          Perm4 p = g.perm * mu;
          if (p.sign() != -1) return false;
          plan[k][f] = {1, g.tet, p, {}};
        }
      }
    // commit
    std::vector<int> ids;
    for (std::size_t k = 0; k < fresh.size(); ++k) ids.push_back(new_tet());
    for (const auto& [tet, lab] : old) {
      for (int f = 0; f < 4; ++f) {
        const Gluing& g = t.adj[tet][f];
        if (!g.boundary() && !pos.count(g.tet)) dirty[g.tet] = 1;
      }
    }
    for (std::size_t k = 0; k < fresh.size(); ++k)
      for (int f = 0; f < 4; ++f) {
        const G& g = plan[k][f];
        int me = ids[k];
        if (g.kind == 2) {
          t.adj[me][f] = {};
          t.face[me][f] = g.fd;
        } else if (g.kind == 0) {
          t.adj[me][f] = {ids[g.tet], g.perm};
        } else {
          t.adj[me][f] = {g.tet, g.perm};
          t.adj[g.tet][g.perm[f]] = {me, g.perm.inverse()};
        }
      }
    for (const auto& [tet, lab] : old) {
      dead[tet] = 1;
      dirty[tet] = 1;
      t.adj[tet] = {};
    }
    return true;
  }

  // Tetrahedra around an internal edge with local labels 0,1 on the edge and
  // the link vertices labelled 2,3,4,... in cyclic order (the last closes on 3).
  bool walk_edge(int edgeClass, std::vector<std::pair<int, Labels>>& out) {
    out.clear();
    int k = s.edgeDegree[edgeClass];
    auto [t0, e0] = s.edgeEmb[edgeClass][0];
    auto [a, b] = edge_vertices(e0);
    int c = -1, d = -1;
    for (int v = 0; v < 4; ++v)
      if (v != a && v != b) (c < 0 ? c : d) = v;
    Labels l0{};
    l0[a] = 0;
    l0[b] = 1;
    l0[c] = 2;
    l0[d] = 3;
    out.push_back({t0, l0});
    int cur = t0;
    Labels lab = l0;
    int exitLabel = 3, keepLabel = 2;
    for (int step = 1; step < k; ++step) {
      int exitV = -1;
      for (int v = 0; v < 4; ++v)
        if (lab[v] == exitLabel) exitV = v;
      const Gluing& g = t.adj[cur][exitV];
      if (g.boundary()) return false;
      Labels nl{-1, -1, -1, -1};
      for (int v = 0; v < 4; ++v)
        if (v != exitV) nl[g.perm[v]] = lab[v];
      int fresh = step == k - 1 ? 3 : 3 + step;
      nl[g.perm[exitV]] = fresh;
      cur = g.tet;
      lab = nl;
      out.push_back({cur, lab});
      exitLabel = keepLabel;
      keepLabel = fresh;
    }
    std::set<int> tets;
    for (const auto& [tt, l] : out) tets.insert(tt);
    return static_cast<int>(tets.size()) == k;
  }

  bool edge_clean(int edgeClass) {
    for (auto [a, e] : s.edgeEmb[edgeClass])
      if (!usable(a)) return false;
    return true;
  }

  bool try_32(int e) {
    if (s.edgeBoundary[e] || s.edgeDegree[e] != 3 || !edge_clean(e)) return false;
    std::vector<std::pair<int, Labels>> old;
    if (!walk_edge(e, old)) return false;
    // link cycle 2,4,3
    return replace_local(old, {Labels{2, 3, 4, 0}, Labels{2, 3, 4, 1}});
  }

  bool try_44(int e, bool flip) {
    if (s.edgeBoundary[e] || s.edgeDegree[e] != 4 || !edge_clean(e)) return false;
    std::vector<std::pair<int, Labels>> old;
    if (!walk_edge(e, old)) return false;
    // link cycle q0=2, q1=4, q2=5, q3=3
    int q[4] = {2, 4, 5, 3};
    int r = flip ? 1 : 0;
    int x = q[r], y = q[r + 2], p1 = q[(r + 1) % 4], p3 = q[(r + 3) % 4];
    return replace_local(old, {Labels{x, y, 0, p1}, Labels{x, y, p1, 1}, Labels{x, y, 1, p3}, Labels{x, y, p3, 0}});
  }

  bool try_23(int a, int f) {
    const Gluing& g = t.adj[a][f];
    if (g.boundary() || g.tet == a || !usable(a) || !usable(g.tet)) return false;
    Labels la{}, lb{};
    for (int v = 0; v < 4; ++v) la[v] = v == f ? 4 : v;
    for (int v = 0; v < 4; ++v)
      if (v != f) lb[g.perm[v]] = v;
    lb[g.perm[f]] = 5;
    std::vector<int> fv;
    for (int v = 0; v < 4; ++v)
      if (v != f) fv.push_back(v);
    return replace_local({{a, la}, {g.tet, lb}},
                         {Labels{4, 5, fv[0], fv[1]}, Labels{4, 5, fv[1], fv[2]}, Labels{4, 5, fv[0], fv[2]}});
  }

  bool try_20(int e) {
    if (s.edgeBoundary[e] || s.edgeDegree[e] != 2 || !edge_clean(e)) return false;
    std::vector<std::pair<int, Labels>> pil;
    if (!walk_edge(e, pil)) return false;
    int T0 = pil[0].first, T1 = pil[1].first;
    const Labels& l0 = pil[0].second;
    const Labels& l1 = pil[1].second;
    // both tets carry labels 0,1 (edge) and 2,3 (link)
    auto vof = [](const Labels& l, int x) {
      for (int v = 0; v < 4; ++v)
        if (l[v] == x) return v;
      return -1;
    };
    Perm4 tau;  // T0 vertex -> T1 vertex
    for (int v = 0; v < 4; ++v) tau.m[v] = static_cast<std::uint8_t>(vof(l1, l0[v]));
    // the two pillow faces must glue T0 to T1 by tau
    for (int x : {2, 3}) {
      const Gluing& g = t.adj[T0][vof(l0, x)];
      if (g.boundary() || g.tet != T1 || !(g.perm == tau)) return false;
    }
    if (s.tetEdge[T0][edge_index(vof(l0, 2), vof(l0, 3))] == s.tetEdge[T1][edge_index(vof(l1, 2), vof(l1, 3))])
      return false;
    if (s.edgeBoundary[s.tetEdge[T0][edge_index(vof(l0, 2), vof(l0, 3))]] &&
        s.edgeBoundary[s.tetEdge[T1][edge_index(vof(l1, 2), vof(l1, 3))]])
      return false;
    std::array<std::pair<int, Perm4>, 2> outer0, outer1;
    for (int j = 0; j < 2; ++j) {
      const Gluing& g0 = t.adj[T0][vof(l0, j)];
      const Gluing& g1 = t.adj[T1][vof(l1, j)];
      if (g0.boundary() || g1.boundary()) return false;
      if (g0.tet == T0 || g0.tet == T1 || g1.tet == T0 || g1.tet == T1) return false;
      if (!usable(g0.tet) || !usable(g1.tet)) return false;
      outer0[j] = {g0.tet, g0.perm};
      outer1[j] = {g1.tet, g1.perm};
    }
    for (int j = 0; j < 2; ++j) {
      auto [A, pa] = outer0[j];
      auto [B, pb] = outer1[j];
      Perm4 p = pb * tau * pa.inverse();
      int fa = pa[vof(l0, j)];
      int fb = pb[vof(l1, j)];
      if (A == B && fa == fb) return false;
      if (p.sign() != -1) return false;
    }
    for (int j = 0; j < 2; ++j) {
      auto [A, pa] = outer0[j];
      auto [B, pb] = outer1[j];
      Perm4 p = pb * tau * pa.inverse();
      int fa = pa[vof(l0, j)];
      t.adj[A][fa] = {B, p};
      t.adj[B][p[fa]] = {A, p.inverse()};
      dirty[A] = dirty[B] = 1;
    }
    for (int x : {T0, T1}) {
      dead[x] = dirty[x] = 1;
      t.adj[x] = {};
    }
    return true;
  }

  bool try_collapse(int e) {
    int u = s.edgeEnds[e][0], w = s.edgeEnds[e][1];
    if (u == w) return false;
    bool bdry = s.edgeBoundary[e];
    if (!bdry && s.vertexBoundary[u] && s.vertexBoundary[w]) return false;
    if (bdry && !opt.boundaryCollapses) return false;
    if (bdry && s.vertexJuncture[u] && s.vertexJuncture[w] && !s.edgeJuncture[e]) return false;
    for (int v : {u, w})
      for (int a : vertexTets[v])
        if (!usable(a)) return false;
    std::set<int> tets;
    for (auto [a, ei] : s.edgeEmb[e]) {
      if (!tets.insert(a).second) return false;
      auto [x, y] = edge_vertices(ei);
      if (t.adj[a][x].tet == a || t.adj[a][y].tet == a) return false;
    }
    // edges of the triangles through e get identified in pairs; for interior
    // triangles every boundary edge counts as one node
    DSU ed(s.nEdges), inner(s.nEdges + 1);
    auto node = [&](int x) { return s.edgeBoundary[x] ? s.nEdges : x; };
    std::set<int> tris;
    for (auto [a, ei] : s.edgeEmb[e]) {
      auto [x, y] = edge_vertices(ei);
      for (int f = 0; f < 4; ++f) {
        if (f == x || f == y) continue;
        int tri = s.tetTriangle[a][f];
        if (!tris.insert(tri).second) continue;
        int z = 6 - x - y - f;
        int e1 = s.tetEdge[a][edge_index(x, z)], e2 = s.tetEdge[a][edge_index(y, z)];
        if (e1 == e || e2 == e) return false;
        if (s.triangleBoundary[tri] && (s.edgeJuncture[e1] || s.edgeJuncture[e2])) return false;
        if (!ed.unite(e1, e2)) return false;
        if (!s.triangleBoundary[tri] && !inner.unite(node(e1), node(e2))) return false;
      }
    }
    DSU fd(s.nTriangles + 1);
    for (auto [a, ei] : s.edgeEmb[e]) {
      auto [x, y] = edge_vertices(ei);
      int f1 = s.tetTriangle[a][x], f2 = s.tetTriangle[a][y];
      int id1 = s.triangleBoundary[f1] ? s.nTriangles : f1;
      int id2 = s.triangleBoundary[f2] ? s.nTriangles : f2;
      if (!fd.unite(id1, id2)) return false;
    }
    // perform
    for (auto [a, ei] : s.edgeEmb[e]) {
      auto [x, y] = edge_vertices(ei);
      Gluing top = t.adj[a][x], bot = t.adj[a][y];
      FaceData topData = t.face[a][x], botData = t.face[a][y];
      for (int f = 0; f < 4; ++f) t.unjoin(a, f);
      Perm4 sw = Perm4::transposition(x, y);
      if (!top.boundary() && !bot.boundary()) {
        t.join(top.tet, top.perm[x], bot.tet, bot.perm * sw * top.perm.inverse());
      } else if (!top.boundary()) {
        // top's face inherits the boundary triangle that was opposite y
        t.face[top.tet][top.perm[x]] = remap_face(botData, top.perm * sw);
      } else if (!bot.boundary()) {
        t.face[bot.tet][bot.perm[y]] = remap_face(topData, bot.perm * sw);
      }
      dead[a] = 1;
    }
    for (int v : {u, w})
      for (int a : vertexTets[v]) dirty[a] = 1;
    return true;
  }

  template <class F>
  std::size_t sweep(std::vector<int> cands, F&& fn) {
    std::shuffle(cands.begin(), cands.end(), rng);
    std::size_t done = 0;
    for (int c : cands) {
      if (!budget_left()) break;
      ++stats.attempted;
      if (fn(c)) {
        ++done;
        ++stats.performed;
      }
    }
    return done;
  }

  std::vector<int> all_edges() const {
    std::vector<int> v(s.nEdges);
    std::iota(v.begin(), v.end(), 0);
    return v;
  }

  void greedy() {
    for (;;) {
      refresh();
      std::size_t done = 0;
      done += sweep(all_edges(), [&](int e) { return try_collapse(e); });
      done += sweep(all_edges(), [&](int e) { return try_32(e); });
      done += sweep(all_edges(), [&](int e) { return try_20(e); });
      if (!done || !budget_left()) break;
    }
    refresh();
  }

  bool random_move() {
    refresh();
    std::vector<int> deg4;
    for (int e = 0; e < s.nEdges; ++e)
      if (!s.edgeBoundary[e] && s.edgeDegree[e] == 4) deg4.push_back(e);
    std::shuffle(deg4.begin(), deg4.end(), rng);
    auto flip44 = [&] {
      for (int e : deg4) {
        if (!budget_left()) return false;
        ++stats.attempted;
        if (try_44(e, rng() & 1)) {
          ++stats.performed;
          return true;
        }
      }
      return false;
    };
    auto flip23 = [&] {
      std::vector<int> faces;
      for (std::size_t a = 0; a < t.size(); ++a)
        for (int f = 0; f < 4; ++f) faces.push_back(static_cast<int>(4 * a + f));
      std::shuffle(faces.begin(), faces.end(), rng);
      for (int x : faces) {
        if (!budget_left()) return false;
        ++stats.attempted;
        if (try_23(x / 4, x % 4)) {
          ++stats.performed;
          return true;
        }
      }
      return false;
    };
    if (rng() % 3 == 0) return flip23() || flip44();
    return flip44() || flip23();
  }
};

}  // namespace

Triangulation pachner_simplify(const Triangulation& in, const SimplifyOptions& opt, SimplifyStats* statsOut) {
  SimplifyStats local;
  SimplifyStats& stats = statsOut ? *statsOut : local;
  Simplifier sim(in, opt, stats);
  sim.dead.assign(in.size(), 0);
  sim.greedy();
  Triangulation best = sim.t;
  int stall = 0;
  while (stall < opt.randomWalkRounds && sim.budget_left()) {
    // longer excursions as the walk stalls
    int moves = 1 + static_cast<int>(sim.rng() % static_cast<unsigned>(4 + stall / 4));
    bool moved = false;
    for (int k = 0; k < moves; ++k) moved |= sim.random_move();
    if (!moved) break;
    sim.greedy();
    if (sim.t.size() < best.size()) {
      best = sim.t;
      stall = 0;
    } else {
      ++stall;
      if (sim.t.size() > best.size() + 8 + static_cast<std::size_t>(stall / 2)) {
        sim.t = best;
        sim.dead.assign(best.size(), 0);
      }
    }
  }
  return best;
}

Triangulation lock_subcomplex(const Triangulation& t, const SubComplex& preserved) {
  Skeleton s = skeleton(t);
  std::set<int> vs, es;
  for (const auto& [name, v] : preserved.vertices) vs.insert(s.tetVertex[v.first][v.second]);
  for (const auto& [name, path] : preserved.edgePaths)
    for (const auto& e : path) {
      es.insert(s.tetEdge[e.tet][edge_index(e.a, e.b)]);
      vs.insert(s.tetVertex[e.tet][e.a]);
      vs.insert(s.tetVertex[e.tet][e.b]);
    }
  Triangulation o = t;
  for (std::size_t a = 0; a < t.size(); ++a) {
    for (int v = 0; v < 4; ++v)
      if (vs.count(s.tetVertex[a][v])) o.locked[a] = 1;
    for (int e = 0; e < 6; ++e)
      if (es.count(s.tetEdge[a][e])) o.locked[a] = 1;
  }
  return o;
}

}  // namespace sgk
