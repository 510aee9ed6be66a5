#pragma once
// Plain double description over exact integers: no zero propagation, no
// support-size filter, algebraic adjacency test, admissibility applied only
// to the final rays.
#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <random>
#include <vector>

#include "sgk/surfaces.hpp"

namespace oracle {

using boost::multiprecision::cpp_int;
using Row = std::vector<cpp_int>;

inline int rank_of(std::vector<Row> m) {
  if (m.empty()) return 0;
  const std::size_t cols = m[0].size();
  int r = 0;
  for (std::size_t c = 0; c < cols && r < static_cast<int>(m.size()); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = r + 1; i < m.size(); ++i) {
      if (m[i][c] == 0) continue;
      cpp_int a = m[r][c], b = m[i][c];
      cpp_int g = 0;
      for (std::size_t k = 0; k < cols; ++k) {
        m[i][k] = m[i][k] * a - m[r][k] * b;
        g = gcd(g, abs(m[i][k]));
      }
      if (g > 1)
        for (auto& x : m[i]) x /= g;
    }
    ++r;
  }
  return r;
}

inline std::vector<sgk::NormalCoordinates> vertex_surfaces(const sgk::Triangulation& t,
                                                           const std::vector<char>& forcedZero = {}) {
  const std::size_t n = 7 * t.size();
  std::vector<Row> hyper;
  for (const auto& eq : sgk::matching_system(t).equations) {
    Row r(n, 0);
    for (auto [c, k] : eq) r[c] += k;
    hyper.push_back(r);
  }
  for (std::size_t i = 0; i < forcedZero.size(); ++i)
    if (forcedZero[i]) {
      Row r(n, 0);
      r[i] = 1;
      hyper.push_back(r);
    }
  std::vector<Row> rays;
  for (std::size_t i = 0; i < n; ++i) {
    Row r(n, 0);
    r[i] = 1;
    rays.push_back(r);
  }
  std::vector<Row> active;
  for (const Row& h : hyper) {
    std::vector<cpp_int> val;
    for (const Row& r : rays) {
      cpp_int s = 0;
      for (std::size_t i = 0; i < n; ++i) s += h[i] * r[i];
      val.push_back(s);
    }
    std::vector<Row> next;
    for (std::size_t i = 0; i < rays.size(); ++i)
      if (val[i] == 0) next.push_back(rays[i]);
    const int full = static_cast<int>(n) - 2;
    for (std::size_t p = 0; p < rays.size(); ++p) {
      if (val[p] <= 0) continue;
      for (std::size_t q = 0; q < rays.size(); ++q) {
        if (val[q] >= 0) continue;
        std::vector<Row> m = active;
        for (std::size_t i = 0; i < n; ++i)
          if (rays[p][i] == 0 && rays[q][i] == 0) {
            Row e(n, 0);
            e[i] = 1;
            m.push_back(e);
          }
        if (static_cast<int>(m.size()) < full || rank_of(m) != full) continue;
        Row c(n);
        cpp_int g = 0;
        for (std::size_t i = 0; i < n; ++i) {
          c[i] = val[p] * rays[q][i] - val[q] * rays[p][i];
          g = gcd(g, c[i]);
        }
        for (auto& x : c) x /= g;
        next.push_back(c);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    rays = std::move(next);
    active.push_back(h);
  }
  std::vector<sgk::NormalCoordinates> out;
  for (const Row& r : rays) {
    sgk::NormalCoordinates nc;
    for (const auto& x : r) nc.v.push_back(static_cast<std::int64_t>(x));
    if (sgk::is_admissible(nc)) out.push_back(nc);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Random face pairing of `tets` tetrahedra, connected, some faces left free.
inline sgk::Triangulation random_gluing_once(std::mt19937& rng, int tets, double freeShare) {
  sgk::Triangulation t;
  for (int i = 0; i < tets; ++i) t.add_tet();
  std::vector<std::pair<int, int>> open;
  for (int a = 0; a < tets; ++a)
    for (int f = 0; f < 4; ++f) open.push_back({a, f});
  std::shuffle(open.begin(), open.end(), rng);
  auto perm_for = [&](int f, int h) {
    std::array<int, 4> img{};
    std::array<int, 3> rest{};
    int m = 0;
    for (int v = 0; v < 4; ++v)
      if (v != h) rest[m++] = v;
    std::shuffle(rest.begin(), rest.end(), rng);
    m = 0;
    for (int v = 0; v < 4; ++v) img[v] = v == f ? h : rest[m++];
    return sgk::Perm4(img[0], img[1], img[2], img[3]);
  };
  // a spanning chain first keeps the result connected
  for (int a = 1; a < tets; ++a) {
    int b = static_cast<int>(rng() % a);
    int f = -1, h = -1;
    for (int k = 0; k < 4 && f < 0; ++k)
      if (t.adj[a][k].boundary()) f = k;
    for (int k = 0; k < 4 && h < 0; ++k)
      if (t.adj[b][k].boundary()) h = k;
    if (f < 0 || h < 0) continue;
    t.join(a, f, b, perm_for(f, h));
  }
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t i = 0; i < open.size(); ++i) {
    auto [a, f] = open[i];
    if (!t.adj[a][f].boundary() || u(rng) < freeShare) continue;
    for (std::size_t j = i + 1; j < open.size(); ++j) {
      auto [b, h] = open[j];
      if (!t.adj[b][h].boundary() || (a == b && f == h)) continue;
      t.join(a, f, b, perm_for(f, h));
      break;
    }
  }
  return t;
}

// Retries until the edge identifications are consistent.
inline sgk::Triangulation random_gluing(std::mt19937& rng, int tets, double freeShare = 0.25) {
  for (;;) {
    sgk::Triangulation t = random_gluing_once(rng, tets, freeShare);
    try {
      sgk::skeleton(t);
      return t;
    } catch (const sgk::Error&) {
    }
  }
}

}  // namespace oracle
