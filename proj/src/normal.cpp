#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>

#include "sgk/surfaces.hpp"

namespace sgk {

int quad_type(int a, int b) {
  if (a == 0) return b - 1;
  if (b == 0) return a - 1;
  return 6 - a - b - 1;
}

MatchingSystem matching_system(const Triangulation& t) {
  MatchingSystem m;
  m.unknowns = 7 * t.size();
  for (std::size_t a = 0; a < t.size(); ++a)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = t.adj[a][f];
      if (g.boundary()) continue;
      int b = g.tet, h = g.perm[f];
      if (std::make_pair(b, h) < std::make_pair(static_cast<int>(a), f)) continue;
      for (int v = 0; v < 4; ++v) {
        if (v == f) continue;
        int w = g.perm[v];
        std::map<int, int> row;
        row[static_cast<int>(7 * a) + v] += 1;
        row[static_cast<int>(7 * a) + 4 + quad_type(v, f)] += 1;
        row[7 * b + w] -= 1;
        row[7 * b + 4 + quad_type(w, h)] -= 1;
        std::vector<std::pair<int, int>> eq;
        for (auto [c, k] : row)
          if (k) eq.push_back({c, k});
        m.equations.push_back(std::move(eq));
      }
    }
  return m;
}

MatchingSystem matching_system(const MarkedExterior& me) { return matching_system(me.manifold); }

bool satisfies_matching(const Triangulation& t, const NormalCoordinates& nc) {
  if (nc.v.size() != 7 * t.size()) return false;
  for (auto x : nc.v)
    if (x < 0) return false;
  for (const auto& eq : matching_system(t).equations) {
    std::int64_t s = 0;
    for (auto [c, k] : eq) s += k * nc.v[c];
    if (s != 0) return false;
  }
  return true;
}

bool is_admissible(const NormalCoordinates& nc) {
  for (std::size_t a = 0; a < nc.tets(); ++a) {
    int q = 0;
    for (int k = 0; k < 3; ++k) q += nc.quad(a, k) != 0;
    if (q > 1) return false;
  }
  return true;
}

std::int64_t edge_weight(const NormalCoordinates& nc, std::size_t tet, int a, int b) {
  std::int64_t w = nc.tri(tet, a) + nc.tri(tet, b);
  for (int k = 0; k < 3; ++k)
    if (k != quad_type(a, b)) w += nc.quad(tet, k);
  return w;
}

std::vector<char> zero_on_edges(const Triangulation& t, const std::vector<char>& edgeClasses) {
  Skeleton s = skeleton(t);
  std::vector<char> z(7 * t.size(), 0);
  for (std::size_t a = 0; a < t.size(); ++a)
    for (int e = 0; e < 6; ++e) {
      if (!edgeClasses[s.tetEdge[a][e]]) continue;
      auto [x, y] = edge_vertices(e);
      z[7 * a + x] = z[7 * a + y] = 1;
      for (int k = 0; k < 3; ++k)
        if (k != quad_type(x, y)) z[7 * a + 4 + k] = 1;
    }
  return z;
}

std::vector<char> zero_on_boundary(const Triangulation& t) {
  Skeleton s = skeleton(t);
  std::vector<char> edges(s.nEdges);
  for (int e = 0; e < s.nEdges; ++e) edges[e] = s.edgeBoundary[e];
  return zero_on_edges(t, edges);
}

namespace {

using Bits = std::vector<std::uint64_t>;

struct Ray {
  std::vector<std::int64_t> x;
  Bits s;
  int pop = 0;
};

bool subset(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

int popcount(const Bits& a) {
  int n = 0;
  for (auto w : a) n += __builtin_popcountll(w);
  return n;
}

bool set(const Bits& a, int i) { return a[i >> 6] >> (i & 63) & 1; }

class Budget {
 public:
  explicit Budget(const EnumerationBudget& b) : b_(b), start_(std::chrono::steady_clock::now()) {}
  bool pair() {
    if (++pairs_ > b_.maxPairs) return fail("candidate pair budget exhausted");
    if ((pairs_ & 1023) == 0 && elapsed() > b_.wallSeconds) return fail("wall-clock budget exhausted");
    return true;
  }
  bool rays(std::size_t n) { return n <= b_.maxRays || fail("vertex ray budget exhausted"); }
  bool fail(const std::string& r) {
    reason = r;
    return false;
  }
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  std::string reason;

 private:
  EnumerationBudget b_;
  std::chrono::steady_clock::time_point start_;
  std::size_t pairs_ = 0;
};

}  // namespace

Enumeration enumerate_vertex_surfaces(const Triangulation& t, const std::vector<char>& forcedZero,
                                      const EnumerationBudget& budget) {
  Enumeration out;
  const std::size_t N = 7 * t.size();
  std::vector<char> zero(N, 0);
  for (std::size_t i = 0; i < std::min(N, forcedZero.size()); ++i) zero[i] = forcedZero[i];
  auto eqs = matching_system(t).equations;
  // an equation whose live terms share one sign forces them all to zero
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& eq : eqs) {
      int pos = 0, neg = 0;
      for (auto [c, k] : eq)
        if (!zero[c]) (k > 0 ? pos : neg)++;
      if ((pos == 0) != (neg == 0))
        for (auto [c, k] : eq)
          if (!zero[c]) {
            zero[c] = 1;
            changed = true;
          }
    }
  }
  std::vector<int> col(N, -1), live;
  for (std::size_t i = 0; i < N; ++i)
    if (!zero[i]) {
      col[i] = static_cast<int>(live.size());
      live.push_back(static_cast<int>(i));
    }
  const int M = static_cast<int>(live.size());
  const std::size_t W = (M + 63) / 64;
  std::vector<std::vector<std::pair<int, std::int64_t>>> rows;
  for (const auto& eq : eqs) {
    std::vector<std::pair<int, std::int64_t>> r;
    for (auto [c, k] : eq)
      if (col[c] >= 0) r.push_back({col[c], k});
    if (!r.empty()) rows.push_back(std::move(r));
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::vector<std::pair<int, int>> conflicts;  // live quads sharing a tetrahedron
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j)
      if (live[i] / 7 == live[j] / 7 && live[i] % 7 >= 4 && live[j] % 7 >= 4) conflicts.push_back({i, j});
  auto admissible = [&](const Bits& s) {
    for (auto [i, j] : conflicts)
      if (set(s, i) && set(s, j)) return false;
    return true;
  };

  std::vector<Ray> rays;
  for (int i = 0; i < M; ++i) {
    Ray r;
    r.x.assign(M, 0);
    r.x[i] = 1;
    r.s.assign(W, 0);
    r.s[i >> 6] |= 1ull << (i & 63);
    r.pop = 1;
    rays.push_back(std::move(r));
  }
  Budget guard(budget);
  auto dot = [](const std::vector<std::pair<int, std::int64_t>>& h, const Ray& r) {
    __int128 s = 0;
    for (auto [c, k] : h) s += static_cast<__int128>(k) * r.x[c];
    return s;
  };
  int rank = 0;
  std::vector<char> done(rows.size(), 0);
  bool ok = guard.rays(rays.size());
  for (std::size_t step = 0; ok && step < rows.size(); ++step) {
    // next hyperplane: fewest candidate pairs
    std::size_t best = rows.size();
    std::size_t bestCost = 0;
    for (std::size_t h = 0; h < rows.size(); ++h) {
      if (done[h]) continue;
      std::size_t p = 0, n = 0;
      for (const Ray& r : rays) {
        auto d = dot(rows[h], r);
        if (d > 0) ++p;
        if (d < 0) ++n;
      }
      if (best == rows.size() || p * n < bestCost) {
        best = h;
        bestCost = p * n;
      }
    }
    done[best] = 1;
    const auto& h = rows[best];
    std::vector<int> pos, neg;
    std::vector<__int128> val(rays.size());
    std::vector<Ray> next;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      val[i] = dot(h, rays[i]);
      if (val[i] > 0)
        pos.push_back(static_cast<int>(i));
      else if (val[i] < 0)
        neg.push_back(static_cast<int>(i));
      else
        next.push_back(rays[i]);
    }
    if (pos.empty() && neg.empty()) continue;
    ++rank;
    for (int p : pos) {
      if (!ok) break;
      for (int n : neg) {
        if (!(ok = guard.pair())) break;
        Bits u(W);
        for (std::size_t w = 0; w < W; ++w) u[w] = rays[p].s[w] | rays[n].s[w];
        int pu = popcount(u);
        if (pu > rank + 1) continue;
        if (!admissible(u)) continue;
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (static_cast<int>(r) == p || static_cast<int>(r) == n || rays[r].pop > pu) continue;
          if (subset(rays[r].s, u)) adjacent = false;
        }
        if (!adjacent) continue;
        Ray c;
        c.x.assign(M, 0);
        __int128 a = val[p], b = -val[n];
        std::vector<__int128> big(M);
        __int128 g = 0;
        for (int i = 0; i < M; ++i) {
          big[i] = a * rays[n].x[i] + b * rays[p].x[i];
          __int128 x = big[i], y = g;
          while (y) {
            __int128 tmp = x % y;
            x = y;
            y = tmp;
          }
          g = x;
        }
        for (int i = 0; i < M; ++i) {
          __int128 q = big[i] / g;
          if (q > INT64_MAX) {
            ok = guard.fail("coordinate overflow");
            break;
          }
          c.x[i] = static_cast<std::int64_t>(q);
        }
        if (!ok) break;
        c.s = u;
        c.pop = pu;
        next.push_back(std::move(c));
        if (!(ok = guard.rays(next.size()))) break;
      }
    }
    rays = std::move(next);
    out.peakRays = std::max(out.peakRays, rays.size());
  }
  if (!ok) {
    out.complete = false;
    out.reason = guard.reason;
    return out;
  }
  for (const Ray& r : rays) {
    NormalCoordinates nc;
    nc.v.assign(N, 0);
    for (int i = 0; i < M; ++i) nc.v[live[i]] = r.x[i];
    out.surfaces.push_back(std::move(nc));
  }
  std::sort(out.surfaces.begin(), out.surfaces.end());
  return out;
}

Enumeration vertex_normal_surfaces(const MarkedExterior& me, bool cleanOnly, const EnumerationBudget& budget) {
  std::vector<char> z;
  if (cleanOnly) {
    Skeleton s = skeleton(me.manifold);
    std::vector<char> edges(s.nEdges);
    for (int e = 0; e < s.nEdges; ++e) edges[e] = s.edgeBoundary[e] && s.edgeJuncture[e];
    z = zero_on_edges(me.manifold, edges);
  }
  return enumerate_vertex_surfaces(me.manifold, z, budget);
}

}  // namespace sgk
