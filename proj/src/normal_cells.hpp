#pragma once
// Cell structure of a normal surface inside each tetrahedron: normal arcs on
// the faces, the pieces they cut the faces into, and the chambers they cut the
// tetrahedra into.
#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sgk/surfaces.hpp"

namespace sgk::cells {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(std::size_t n = 0) : p(n) { std::iota(p.begin(), p.end(), 0); }
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

inline bool pair_a(int q, int v) { return v == 0 || v == q + 1; }

class Cells {
 public:
  Cells(const Triangulation& t, const NormalCoordinates& nc) : t_(t), nc_(nc) {
    std::size_t n = t.size();
    quad.assign(n, -1);
    Q.assign(n, 0);
    discBase.assign(n + 1, 0);
    chamberBase.assign(n + 1, 0);
    for (std::size_t a = 0; a < n; ++a) {
      for (int k = 0; k < 3; ++k)
        if (nc.quad(a, k) > 0) {
          quad[a] = k;
          Q[a] = nc.quad(a, k);
        }
      std::int64_t tris = 0;
      for (int v = 0; v < 4; ++v) tris += nc.tri(a, v);
      discBase[a + 1] = discBase[a] + static_cast<int>(tris + Q[a]);
      chamberBase[a + 1] = chamberBase[a] + static_cast<int>(tris + Q[a] + 1);
    }
  }

  int discs() const { return discBase.back(); }
  int chambers() const { return chamberBase.back(); }
  std::int64_t T(int a, int v) const { return nc_.tri(a, v); }

  // arcs of face f cutting off corner v
  std::int64_t arcs(int a, int f, int v) const { return T(a, v) + (quad[a] == quad_type(v, f) ? Q[a] : 0); }

  int tri_disc(int a, int v, std::int64_t i) const {
    std::int64_t off = 0;
    for (int u = 0; u < v; ++u) off += T(a, u);
    return discBase[a] + static_cast<int>(off + i);
  }
  int quad_disc(int a, std::int64_t j) const {
    std::int64_t off = 0;
    for (int u = 0; u < 4; ++u) off += T(a, u);
    return discBase[a] + static_cast<int>(off + j);
  }
  // disc owning arc i (counted from the corner) at corner v of face f
  int arc_disc(int a, int /*f*/, int v, std::int64_t i) const {
    if (i < T(a, v)) return tri_disc(a, v, i);
    std::int64_t m = i - T(a, v);
    return quad_disc(a, pair_a(quad[a], v) ? m : Q[a] - 1 - m);
  }

  // chamber between triangle copies i-1 and i at v (0 <= i < T)
  int corner_chamber(int a, int v, std::int64_t i) const {
    std::int64_t off = 0;
    for (int u = 0; u < v; ++u) off += T(a, u);
    return chamberBase[a] + static_cast<int>(off + i);
  }
  // central chambers: 0 on the side of the pair holding vertex 0, Q on the other
  int central_chamber(int a, std::int64_t j) const {
    std::int64_t off = 0;
    for (int u = 0; u < 4; ++u) off += T(a, u);
    return chamberBase[a] + static_cast<int>(off + j);
  }
  int beyond(int a, int v) const { return central_chamber(a, Q[a] == 0 || pair_a(quad[a], v) ? 0 : Q[a]); }

  // piece i at corner v of face f (between arcs i-1 and i); v < 0 is the central piece
  int piece_chamber(int a, int f, int v, std::int64_t i) const {
    if (v < 0) {
      if (Q[a] == 0) return central_chamber(a, 0);
      int p = -1;
      for (int u = 0; u < 4; ++u)
        if (u != f && quad_type(u, f) == quad[a]) p = u;
      return central_chamber(a, pair_a(quad[a], p) ? Q[a] : 0);
    }
    if (i < T(a, v)) return corner_chamber(a, v, i);
    if (i == T(a, v)) return beyond(a, v);
    std::int64_t m = i - T(a, v);
    return central_chamber(a, pair_a(quad[a], v) ? m : Q[a] - m);
  }

  // chambers on the two sides of a disc
  std::array<int, 2> tri_sides(int a, int v, std::int64_t i) const {
    return {corner_chamber(a, v, i), i + 1 < T(a, v) ? corner_chamber(a, v, i + 1) : beyond(a, v)};
  }
  std::array<int, 2> quad_sides(int a, std::int64_t j) const {
    return {central_chamber(a, j), central_chamber(a, j + 1)};
  }

  std::vector<int> quad;
  std::vector<std::int64_t> Q;
  std::vector<int> discBase, chamberBase;

 private:
  const Triangulation& t_;
  const NormalCoordinates& nc_;
};

struct EdgeStep {
  int tet;
  int face;
  int x;
  int y;
};

// The other boundary face containing edge (x, y) of boundary face (a, f).
inline EdgeStep boundary_across(const Triangulation& t, int a, int f, int x, int y) {
  int h = 6 - x - y - f;
  for (std::size_t guard = 0; guard <= 4 * t.size() + 4; ++guard) {
    const Gluing& g = t.adj[a][h];
    if (g.boundary()) return {a, h, x, y};
    int came = g.perm[h];
    a = g.tet;
    x = g.perm[x];
    y = g.perm[y];
    h = 6 - x - y - came;
  }
  return {-1, -1, -1, -1};
}

}  // namespace sgk::cells
