#include <algorithm>
#include <set>
#include <functional>
#include <numeric>
#include <sstream>

#include "sgk/tri.hpp"

namespace sgk {

Perm4 Perm4::inverse() const {
  Perm4 r;
  for (int i = 0; i < 4; ++i) r.m[m[i]] = static_cast<std::uint8_t>(i);
  return r;
}

Perm4 Perm4::operator*(const Perm4& o) const {
  Perm4 r;
  for (int i = 0; i < 4; ++i) r.m[i] = m[o.m[i]];
  return r;
}

int Perm4::sign() const {
  int inv = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) inv += m[i] > m[j];
  return inv % 2 ? -1 : 1;
}

int Perm4::index() const {
  static const int fact[4] = {6, 2, 1, 1};
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < 4; ++j) smaller += m[j] < m[i];
    k += smaller * fact[i];
  }
  return k;
}

Perm4 Perm4::from_index(int k) {
  static const std::array<Perm4, 24> all = [] {
    std::array<Perm4, 24> a;
    std::array<std::uint8_t, 4> p{0, 1, 2, 3};
    int i = 0;
    do {
      a[i++].m = p;
    } while (std::next_permutation(p.begin(), p.end()));
    return a;
  }();
  return all[k];
}

Perm4 Perm4::transposition(int a, int b) {
  Perm4 p;
  std::swap(p.m[a], p.m[b]);
  return p;
}

std::string Perm4::str() const {
  std::string s;
  for (int i = 0; i < 4; ++i) s += static_cast<char>('0' + m[i]);
  return s;
}

int Triangulation::add_tet() {
  adj.push_back({});
  face.push_back({});
  locked.push_back(0);
  return static_cast<int>(adj.size()) - 1;
}

void Triangulation::join(int t, int f, int n, const Perm4& p) {
  adj[t][f] = {n, p};
  adj[n][p[f]] = {t, p.inverse()};
  face[t][f] = {};
  face[n][p[f]] = {};
}

void Triangulation::unjoin(int t, int f) {
  Gluing g = adj[t][f];
  if (g.boundary()) return;
  adj[g.tet][g.perm[f]] = {};
  adj[t][f] = {};
}

int edge_index(int a, int b) {
  static const int table[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  return table[a][b];
}

std::array<int, 2> edge_vertices(int e) {
  static const std::array<std::array<int, 2>, 6> v = {{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  return v[e];
}

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
    if (a > b) std::swap(a, b);
    p[b] = a;
    return true;
  }
};

// union-find carrying a parity to the parent
struct ParityDSU {
  std::vector<int> p, par;
  explicit ParityDSU(std::size_t n) : p(n), par(n, 0) { std::iota(p.begin(), p.end(), 0); }
  std::pair<int, int> find(int x) {
    int acc = 0;
    int r = x;
    while (p[r] != r) {
      acc ^= par[r];
      r = p[r];
    }
    // compress
    int cur = x, curPar = acc;
    while (p[cur] != cur) {
      int nxt = p[cur], np = curPar ^ par[cur];
      p[cur] = r;
      par[cur] = curPar;
      cur = nxt;
      curPar = np;
    }
    return {r, acc};
  }
  // returns false on a parity conflict
  bool unite(int a, int b, int parity) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return (pa ^ pb) == parity;
    if (ra > rb) {
      std::swap(ra, rb);
      std::swap(pa, pb);
    }
    p[rb] = ra;
    par[rb] = pa ^ pb ^ parity;
    return true;
  }
};

void check_gluings(const Triangulation& t) {
  int n = static_cast<int>(t.size());
  if (t.face.size() != t.size() || t.locked.size() != t.size())
    throw Error(ErrorCode::InvalidTriangulation, "face data out of step with gluings");
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = t.adj[a][f];
      if (g.boundary()) continue;
      std::array<std::uint8_t, 4> s = g.perm.m;
      std::sort(s.begin(), s.end());
      if (g.tet >= n || s != std::array<std::uint8_t, 4>{0, 1, 2, 3})
        throw Error(ErrorCode::InvalidTriangulation, "malformed gluing at tet " + std::to_string(a));
      if (g.tet == a && g.perm[f] == f)
        throw Error(ErrorCode::InvalidTriangulation, "face glued to itself at tet " + std::to_string(a));
      const Gluing& back = t.adj[g.tet][g.perm[f]];
      if (back.tet != a || !(back.perm == g.perm.inverse()))
        throw Error(ErrorCode::InvalidTriangulation, "gluing not involutive at tet " + std::to_string(a));
    }
}

}  // namespace

Skeleton skeleton(const Triangulation& t) {
  check_gluings(t);
  int n = static_cast<int>(t.size());
  Skeleton s;
  s.tetVertex.resize(n);
  s.tetEdge.resize(n);
  s.tetEdgeSign.resize(n);
  s.tetTriangle.resize(n);
  s.tetTriangleSign.resize(n);
  DSU vd(4 * n);
  ParityDSU ed(6 * n);
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = t.adj[a][f];
      if (g.boundary()) continue;
      for (int v = 0; v < 4; ++v)
        if (v != f) vd.unite(4 * a + v, 4 * g.tet + g.perm[v]);
      for (int e = 0; e < 6; ++e) {
        auto [x, y] = edge_vertices(e);
        if (x == f || y == f) continue;
        int px = g.perm[x], py = g.perm[y];
        if (!ed.unite(6 * a + e, 6 * g.tet + edge_index(px, py), px > py ? 1 : 0))
          throw Error(ErrorCode::InvalidTriangulation, "edge identified with itself in reverse");
      }
    }
  std::vector<int> vid(4 * n, -1), eid(6 * n, -1);
  for (int a = 0; a < n; ++a)
    for (int v = 0; v < 4; ++v) {
      int r = vd.find(4 * a + v);
      if (vid[r] < 0) vid[r] = s.nVertices++;
      s.tetVertex[a][v] = vid[r];
    }
  for (int a = 0; a < n; ++a)
    for (int e = 0; e < 6; ++e) {
      auto [r, par] = ed.find(6 * a + e);
      if (eid[r] < 0) {
        eid[r] = s.nEdges++;
        int rt = r / 6, re = r % 6;
        auto [x, y] = edge_vertices(re);
        s.edgeEnds.push_back({s.tetVertex[rt][x], s.tetVertex[rt][y]});
        s.edgeDegree.push_back(0);
        s.edgeEmb.push_back({});
      }
      int c = eid[r];
      s.tetEdge[a][e] = c;
      s.tetEdgeSign[a][e] = par ? -1 : 1;
      s.edgeDegree[c]++;
      s.edgeEmb[c].push_back({a, e});
    }
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < 4; ++f) s.tetTriangle[a][f] = -1;
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < 4; ++f) {
      if (s.tetTriangle[a][f] >= 0) continue;
      int c = s.nTriangles++;
      s.tetTriangle[a][f] = c;
      s.tetTriangleSign[a][f] = 1;
      s.triangleEmb.push_back({{a, f}});
      const Gluing& g = t.adj[a][f];
      if (g.boundary()) continue;
      int b = g.tet, h = g.perm[f];
      s.tetTriangle[b][h] = c;
      std::array<int, 3> img;
      int k = 0;
      for (int v = 0; v < 4; ++v)
        if (v != f) img[k++] = g.perm[v];
      int inv = (img[0] > img[1]) + (img[0] > img[2]) + (img[1] > img[2]);
      s.tetTriangleSign[b][h] = inv % 2 ? -1 : 1;
      s.triangleEmb[c].push_back({b, h});
    }
  s.vertexBoundary.assign(s.nVertices, 0);
  s.edgeBoundary.assign(s.nEdges, 0);
  s.triangleBoundary.assign(s.nTriangles, 0);
  s.edgeJuncture.assign(s.nEdges, 0);
  s.edgePositive.assign(s.nEdges, 0);
  s.vertexJuncture.assign(s.nVertices, 0);
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < 4; ++f) {
      if (!t.adj[a][f].boundary()) continue;
      s.triangleBoundary[s.tetTriangle[a][f]] = 1;
      for (int v = 0; v < 4; ++v)
        if (v != f) s.vertexBoundary[s.tetVertex[a][v]] = 1;
      const FaceData& fd = t.face[a][f];
      for (int c = 0; c < 4; ++c) {
        if (c == f) continue;
        int x = -1, y = -1;
        for (int v = 0; v < 4; ++v)
          if (v != f && v != c) (x < 0 ? x : y) = v;
        int e = s.tetEdge[a][edge_index(x, y)];
        s.edgeBoundary[e] = 1;
        if (fd.juncture >> c & 1) {
          s.edgeJuncture[e] = 1;
          s.vertexJuncture[s.tetVertex[a][x]] = 1;
          s.vertexJuncture[s.tetVertex[a][y]] = 1;
        }
        if (fd.positive >> c & 1) s.edgePositive[e] = 1;
      }
    }
  // vertex links
  DSU ld(16 * n);
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = t.adj[a][f];
      if (g.boundary()) continue;
      for (int v = 0; v < 4; ++v) {
        if (v == f) continue;
        for (int x = 0; x < 4; ++x)
          if (x != v && x != f) ld.unite(16 * a + 4 * v + x, 16 * g.tet + 4 * g.perm[v] + g.perm[x]);
      }
    }
  std::vector<long> F(s.nVertices, 0), Ei(s.nVertices, 0), Eb(s.nVertices, 0), V(s.nVertices, 0);
  std::vector<char> seenLinkVertex(16 * n, 0);
  for (int a = 0; a < n; ++a)
    for (int v = 0; v < 4; ++v) {
      int c = s.tetVertex[a][v];
      F[c]++;
      for (int f = 0; f < 4; ++f) {
        if (f == v) continue;
        (t.adj[a][f].boundary() ? Eb : Ei)[c]++;
      }
      for (int x = 0; x < 4; ++x) {
        if (x == v) continue;
        int r = ld.find(16 * a + 4 * v + x);
        if (!seenLinkVertex[r]) {
          seenLinkVertex[r] = 1;
          V[c]++;
        }
      }
    }
  s.vertexLinkEuler.resize(s.nVertices);
  for (int c = 0; c < s.nVertices; ++c) {
    long chi = V[c] - (Ei[c] / 2 + Eb[c]) + F[c];
    s.vertexLinkEuler[c] = static_cast<int>(chi);
    long want = Eb[c] ? 1 : 2;
    if (chi != want)
      throw Error(ErrorCode::InvalidTriangulation,
                  "vertex link is not a sphere or disc (Euler characteristic " + std::to_string(chi) + ")");
  }
  return s;
}

bool is_oriented(const Triangulation& t) {
  for (const auto& a : t.adj)
    for (const auto& g : a)
      if (!g.boundary() && g.perm.sign() != -1) return false;
  return true;
}

namespace {

std::uint8_t permute_mask(std::uint8_t mask, const Perm4& r) {
  std::uint8_t out = 0;
  for (int c = 0; c < 4; ++c)
    if (mask >> c & 1) out |= static_cast<std::uint8_t>(1u << r[c]);
  return out;
}

Triangulation apply_relabel(const Triangulation& t, const std::vector<Perm4>& r) {
  Triangulation o = t;
  for (std::size_t a = 0; a < t.size(); ++a)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = t.adj[a][f];
      int nf = r[a][f];
      if (g.boundary()) {
        o.adj[a][nf] = {};
      } else {
        o.adj[a][nf] = {g.tet, r[g.tet] * g.perm * r[a].inverse()};
      }
      const FaceData& fd = t.face[a][f];
      o.face[a][nf] = {fd.label, permute_mask(fd.juncture, r[a]), permute_mask(fd.positive, r[a])};
    }
  return o;
}

}  // namespace

Triangulation validate_and_orient(const Triangulation& t, std::vector<Perm4>* relabel) {
  skeleton(t);
  int n = static_cast<int>(t.size());
  std::vector<int> sign(n, 0);
  for (int root = 0; root < n; ++root) {
    if (sign[root]) continue;
    sign[root] = 1;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int f = 0; f < 4; ++f) {
        const Gluing& g = t.adj[a][f];
        if (g.boundary()) continue;
        int want = -g.perm.sign() * sign[a];
        if (!sign[g.tet]) {
          sign[g.tet] = want;
          stack.push_back(g.tet);
        } else if (sign[g.tet] != want) {
          throw Error(ErrorCode::Nonorientable, "triangulation is not orientable");
        }
      }
    }
  }
  std::vector<Perm4> r(n);
  for (int a = 0; a < n; ++a)
    if (sign[a] < 0) r[a] = Perm4::transposition(2, 3);
  Triangulation o = apply_relabel(t, r);
  if (relabel) *relabel = r;
  return o;
}

SubComplex relabel_subcomplex(const SubComplex& s, const std::vector<Perm4>& r) {
  SubComplex o;
  for (const auto& [k, v] : s.vertices) o.vertices[k] = {v.first, r[v.first][v.second]};
  for (const auto& [k, path] : s.edgePaths) {
    auto& out = o.edgePaths[k];
    for (const auto& e : path) out.push_back({e.tet, r[e.tet][e.a], r[e.tet][e.b]});
  }
  return o;
}

Subdivision barycentric_subdivide(const Triangulation& t, const SubComplex& tracked) {
  skeleton(t);
  int n = static_cast<int>(t.size());
  Triangulation b;
  for (int i = 0; i < 24 * n; ++i) b.add_tet();
  auto sub = [](int tet, const Perm4& s) { return 24 * tet + s.index(); };
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < 24; ++k) {
      Perm4 s = Perm4::from_index(k);
      int me = 24 * a + k;
      b.locked[me] = t.locked[a];
      b.adj[me][0] = {sub(a, s * Perm4::transposition(0, 1)), Perm4()};
      b.adj[me][1] = {sub(a, s * Perm4::transposition(1, 2)), Perm4()};
      b.adj[me][2] = {sub(a, s * Perm4::transposition(2, 3)), Perm4()};
      const Gluing& g = t.adj[a][s[3]];
      if (g.boundary()) {
        const FaceData& fd = t.face[a][s[3]];
        b.face[me][3] = {fd.label, static_cast<std::uint8_t>((fd.juncture >> s[2] & 1) << 2),
                         static_cast<std::uint8_t>((fd.positive >> s[2] & 1) << 2)};
      } else {
        b.adj[me][3] = {sub(g.tet, g.perm * s), Perm4()};
      }
    }
  SubComplex raw;
  auto firstWith = [](int v0, int v1) {
    for (int k = 0; k < 24; ++k) {
      Perm4 s = Perm4::from_index(k);
      if (s[0] == v0 && (v1 < 0 || s[1] == v1)) return k;
    }
    return 0;
  };
  for (const auto& [name, v] : tracked.vertices) raw.vertices[name] = {24 * v.first + firstWith(v.second, -1), 0};
  for (const auto& [name, path] : tracked.edgePaths) {
    auto& out = raw.edgePaths[name];
    for (const auto& e : path) {
      out.push_back({24 * e.tet + firstWith(e.a, e.b), 0, 1});
      out.push_back({24 * e.tet + firstWith(e.b, e.a), 1, 0});
    }
  }
  std::vector<Perm4> r;
  Subdivision out;
  out.tri = validate_and_orient(b, &r);
  out.sub = relabel_subcomplex(raw, r);
  return out;
}

BoundarySurface boundary_surface(const Triangulation& t) {
  Skeleton s = skeleton(t);
  BoundarySurface out;
  std::map<int, std::vector<int>> byEdge;
  std::vector<std::array<std::pair<int, int>, 3>> directed;  // (edge class, +1/-1 along class)
  for (std::size_t a = 0; a < t.size(); ++a)
    for (int f = 0; f < 4; ++f) {
      if (!t.adj[a][f].boundary()) continue;
      std::array<int, 3> v;
      int k = 0;
      for (int x = 0; x < 4; ++x)
        if (x != f) v[k++] = x;
      if (f % 2) std::swap(v[0], v[1]);
      out.triangles.push_back({s.tetVertex[a][v[0]], s.tetVertex[a][v[1]], s.tetVertex[a][v[2]]});
      out.source.push_back({static_cast<int>(a), f});
      std::array<std::pair<int, int>, 3> d;
      for (int i = 0; i < 3; ++i) {
        int x = v[i], y = v[(i + 1) % 3];
        int e = edge_index(x, y);
        int dir = (x < y ? 1 : -1) * s.tetEdgeSign[a][e];
        d[i] = {s.tetEdge[a][e], dir};
        byEdge[s.tetEdge[a][e]].push_back(static_cast<int>(out.triangles.size()) - 1);
      }
      directed.push_back(d);
    }
  std::size_t m = out.triangles.size();
  DSU dsu(m);
  for (const auto& [e, tris] : byEdge)
    for (std::size_t i = 1; i < tris.size(); ++i) dsu.unite(tris[0], tris[i]);
  std::map<int, int> comp;
  out.triangleComponent.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    int r = dsu.find(static_cast<int>(i));
    if (!comp.count(r)) {
      comp[r] = static_cast<int>(out.components.size());
      out.components.push_back({});
    }
    out.triangleComponent[i] = comp[r];
  }
  std::vector<std::set<int>> cv(out.components.size()), ce(out.components.size());
  for (std::size_t i = 0; i < m; ++i) {
    int c = out.triangleComponent[i];
    out.components[c].triangles++;
    for (int x : out.triangles[i]) cv[c].insert(x);
    for (const auto& d : directed[i]) ce[c].insert(d.first);
  }
  for (std::size_t c = 0; c < out.components.size(); ++c)
    out.components[c].euler = static_cast<int>(cv[c].size()) - static_cast<int>(ce[c].size()) + out.components[c].triangles;
  std::map<int, int> dirSum;
  for (const auto& d : directed)
    for (const auto& [e, dir] : d) dirSum[e] += dir;
  for (const auto& [e, tris] : byEdge)
    if (dirSum[e] != 0) out.components[out.triangleComponent[tris[0]]].orientable = false;
  return out;
}

std::string write_tri(const Triangulation& t) {
  std::ostringstream os;
  for (std::size_t a = 0; a < t.size(); ++a) {
    os << "tet " << a << ":";
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = t.adj[a][f];
      if (g.boundary())
        os << " bdry";
      else
        os << ' ' << g.tet << '(' << g.perm.str() << ')';
    }
    os << '\n';
  }
  for (std::size_t a = 0; a < t.size(); ++a)
    for (int f = 0; f < 4; ++f) {
      const FaceData& fd = t.face[a][f];
      if (t.adj[a][f].boundary() && !(fd == FaceData{}))
        os << "face " << a << ' ' << f << ' ' << fd.label << ' ' << int(fd.juncture) << ' ' << int(fd.positive) << '\n';
    }
  for (std::size_t a = 0; a < t.size(); ++a)
    if (t.locked[a]) os << "lock " << a << '\n';
  return os.str();
}

Triangulation read_tri(const std::string& text) {
  Triangulation t;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  struct Pending {
    int a, f;
    std::string tok;
    int line;
  };
  std::vector<Pending> glue;
  auto bad = [&](const std::string& m) { return Error(ErrorCode::Syntax, m, ln, 1); };
  while (std::getline(in, line)) {
    ++ln;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "tet") {
      std::string idx;
      ls >> idx;
      if (idx.empty() || idx.back() != ':') throw bad("expected 'tet <k>:'");
      int k = std::stoi(idx.substr(0, idx.size() - 1));
      if (k != static_cast<int>(t.size())) throw bad("tetrahedra must be listed in order");
      t.add_tet();
      for (int f = 0; f < 4; ++f) {
        std::string tok;
        if (!(ls >> tok)) throw bad("expected four face entries");
        glue.push_back({k, f, tok, ln});
      }
      std::string extra;
      if (ls >> extra) throw bad("trailing text");
    } else if (kw == "face") {
      int a, f, label, j, p;
      if (!(ls >> a >> f >> label >> j >> p)) throw bad("expected 'face <tet> <face> <label> <juncture> <positive>'");
      if (a < 0 || a >= static_cast<int>(t.size()) || f < 0 || f > 3) throw bad("face out of range");
      t.face[a][f] = {label, static_cast<std::uint8_t>(j), static_cast<std::uint8_t>(p)};
    } else if (kw == "lock") {
      int a;
      if (!(ls >> a) || a < 0 || a >= static_cast<int>(t.size())) throw bad("bad lock line");
      t.locked[a] = 1;
    } else {
      throw bad("unknown keyword '" + kw + "'");
    }
  }
  for (const auto& g : glue) {
    ln = g.line;
    if (g.tok == "bdry") continue;
    auto open = g.tok.find('(');
    if (open == std::string::npos || g.tok.size() != open + 6 || g.tok.back() != ')') throw bad("bad gluing '" + g.tok + "'");
    int n = std::stoi(g.tok.substr(0, open));
    std::string ps = g.tok.substr(open + 1, 4);
    Perm4 p;
    for (int i = 0; i < 4; ++i) {
      if (ps[i] < '0' || ps[i] > '3') throw bad("bad permutation");
      p.m[i] = static_cast<std::uint8_t>(ps[i] - '0');
    }
    if (n < 0 || n >= static_cast<int>(t.size())) throw bad("gluing to unknown tetrahedron");
    t.adj[g.a][g.f] = {n, p};
  }
  skeleton(t);
  return t;
}

Triangulation two_tet_sphere() {
  Triangulation t;
  t.add_tet();
  t.add_tet();
  Perm4 p = Perm4::transposition(0, 1);
  for (int f = 0; f < 4; ++f) t.adj[0][f] = {1, p};
  for (int f = 0; f < 4; ++f) t.adj[1][f] = {0, p};
  return t;
}

Triangulation single_tet() {
  Triangulation t;
  t.add_tet();
  return t;
}

Triangulation from_simplices(const std::vector<std::array<int, 4>>& tets) {
  Triangulation t;
  for (std::size_t i = 0; i < tets.size(); ++i) t.add_tet();
  std::map<std::array<int, 3>, std::pair<int, int>> open;
  for (std::size_t a = 0; a < tets.size(); ++a)
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> key;
      int k = 0;
      for (int v = 0; v < 4; ++v)
        if (v != f) key[k++] = tets[a][v];
      std::sort(key.begin(), key.end());
      auto it = open.find(key);
      if (it == open.end()) {
        open[key] = {static_cast<int>(a), f};
        continue;
      }
      auto [b, g] = it->second;
      open.erase(it);
      Perm4 p;
      for (int v = 0; v < 4; ++v) {
        if (v == f) continue;
        for (int w = 0; w < 4; ++w)
          if (tets[b][w] == tets[a][v]) p.m[v] = static_cast<std::uint8_t>(w);
      }
      p.m[f] = static_cast<std::uint8_t>(g);
      t.join(static_cast<int>(a), f, b, p);
    }
  return t;
}

}  // namespace sgk
