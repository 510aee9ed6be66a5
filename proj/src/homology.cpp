#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <set>
#include <sstream>

#include "sgk/tri.hpp"

namespace sgk {

namespace {

using Big = boost::multiprecision::cpp_int;

struct Overflow {};

inline long checked_mul(long a, long b) {
  long r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline long checked_sub(long a, long b) {
  long r;
  if (__builtin_sub_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline Big checked_mul(const Big& a, const Big& b) { return a * b; }
inline Big checked_sub(const Big& a, const Big& b) { return a - b; }

template <class T>
bool is_unit(const T& x) {
  return x == 1 || x == -1;
}

// Invariant factors of a dense matrix.
std::vector<Big> dense_snf(std::vector<std::vector<Big>> a) {
  std::vector<Big> diag;
  std::size_t m = a.size(), n = m ? a[0].size() : 0;
  std::size_t k = 0;
  while (k < m && k < n) {
    // smallest nonzero entry in the trailing block
    std::size_t pr = m, pc = n;
    for (std::size_t i = k; i < m; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (a[i][j] != 0 && (pr == m || abs(a[i][j]) < abs(a[pr][pc]))) {
          pr = i;
          pc = j;
        }
    if (pr == m) break;
    std::swap(a[k], a[pr]);
    for (auto& row : a) std::swap(row[k], row[pc]);
    bool clean = false;
    while (!clean) {
      clean = true;
      for (std::size_t i = k + 1; i < m; ++i) {
        if (a[i][k] == 0) continue;
        Big q = a[i][k] / a[k][k];
        for (std::size_t j = k; j < n; ++j) a[i][j] -= q * a[k][j];
        if (a[i][k] != 0) {
          std::swap(a[k], a[i]);
          clean = false;
        }
      }
      for (std::size_t j = k + 1; j < n; ++j) {
        if (a[k][j] == 0) continue;
        Big q = a[k][j] / a[k][k];
        for (std::size_t i = k; i < m; ++i) a[i][j] -= q * a[i][k];
        if (a[k][j] != 0) {
          for (auto& row : a) std::swap(row[k], row[j]);
          clean = false;
        }
      }
      if (clean) {
        for (std::size_t i = k + 1; i < m && clean; ++i)
          for (std::size_t j = k + 1; j < n; ++j)
            if (a[i][j] % a[k][k] != 0) {
              for (std::size_t c = k; c < n; ++c) a[k][c] += a[i][c];
              clean = false;
              break;
            }
      }
    }
    diag.push_back(abs(a[k][k]));
    ++k;
  }
  return diag;
}

struct SparseResult {
  long rank = 0;
  std::vector<Big> invariants;  // > 1
};

// Columns are sparse vectors of (row, value).  Unit pivots are eliminated
// sparsely; whatever remains is handed to the dense routine.
template <class T>
SparseResult sparse_snf(const std::vector<std::map<int, long>>& input, int nRows) {
  std::vector<std::map<int, T>> cols(input.size());
  std::vector<std::set<int>> rowCols(nRows);
  for (std::size_t c = 0; c < input.size(); ++c)
    for (const auto& [r, v] : input[c])
      if (v != 0) {
        cols[c][r] = T(v);
        rowCols[r].insert(static_cast<int>(c));
      }
  std::vector<char> colAlive(cols.size(), 1), rowAlive(nRows, 1);
  SparseResult res;
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<int> order;
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (colAlive[c] && !cols[c].empty()) order.push_back(static_cast<int>(c));
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return cols[x].size() < cols[y].size(); });
    for (int c : order) {
      if (!colAlive[c] || cols[c].empty()) continue;
      int pr = -1;
      std::size_t best = 0;
      for (const auto& [r, v] : cols[c])
        if (is_unit(v) && (pr < 0 || rowCols[r].size() < best)) {
          pr = r;
          best = rowCols[r].size();
        }
      if (pr < 0) continue;
      T pv = cols[c][pr];
      std::vector<int> others(rowCols[pr].begin(), rowCols[pr].end());
      for (int c2 : others) {
        if (c2 == c) continue;
        T factor = checked_mul(cols[c2][pr], pv);  // pv = +-1, so a/pv = a*pv
        for (const auto& [r, v] : cols[c]) {
          T nv = checked_sub(cols[c2][r], checked_mul(factor, v));
          if (nv == 0) {
            cols[c2].erase(r);
            rowCols[r].erase(c2);
          } else {
            cols[c2][r] = nv;
            rowCols[r].insert(c2);
          }
        }
      }
      for (const auto& [r, v] : cols[c]) rowCols[r].erase(c);
      cols[c].clear();
      colAlive[c] = 0;
      rowAlive[pr] = 0;
      res.rank++;
      progress = true;
    }
  }
  std::vector<int> restCols, restRows;
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (colAlive[c] && !cols[c].empty()) restCols.push_back(static_cast<int>(c));
  std::set<int> rows;
  for (int c : restCols)
    for (const auto& [r, v] : cols[c]) rows.insert(r);
  restRows.assign(rows.begin(), rows.end());
  std::map<int, std::size_t> rowIx;
  for (std::size_t i = 0; i < restRows.size(); ++i) rowIx[restRows[i]] = i;
  std::vector<std::vector<Big>> dense(restRows.size(), std::vector<Big>(restCols.size(), 0));
  for (std::size_t j = 0; j < restCols.size(); ++j)
    for (const auto& [r, v] : cols[restCols[j]]) dense[rowIx[r]][j] = Big(v);
  for (const Big& d : dense_snf(dense)) {
    res.rank++;
    if (d > 1) res.invariants.push_back(d);
  }
  return res;
}

SparseResult snf(const std::vector<std::map<int, long>>& cols, int nRows) {
  try {
    return sparse_snf<long>(cols, nRows);
  } catch (const Overflow&) {
    return sparse_snf<Big>(cols, nRows);
  }
}

}  // namespace

std::vector<std::string> smith_invariants(std::vector<std::vector<long>> dense) {
  std::vector<std::vector<Big>> a;
  for (const auto& r : dense) {
    a.push_back({});
    for (long v : r) a.back().push_back(Big(v));
  }
  std::vector<std::string> out;
  for (const Big& d : dense_snf(a)) out.push_back(d.str());
  return out;
}

std::string HomologyProfile::str() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (k) os << ' ';
    os << 'H' << k << '=';
    bool any = false;
    if (groups[k].rank) {
      os << 'Z';
      if (groups[k].rank > 1) os << '^' << groups[k].rank;
      any = true;
    }
    for (const auto& t : groups[k].torsion) {
      os << (any ? "+" : "") << "Z" << t;
      any = true;
    }
    if (!any) os << '0';
  }
  return os.str();
}

HomologyProfile homology(const Triangulation& t, bool rel) {
  Skeleton s = skeleton(t);
  int n = static_cast<int>(t.size());
  // cell numbering, dropping boundary cells for the relative version
  auto number = [&](int count, const std::vector<char>& bdry) {
    std::vector<int> id(count, -1);
    int k = 0;
    for (int i = 0; i < count; ++i)
      if (!rel || !bdry[i]) id[i] = k++;
    return std::make_pair(id, k);
  };
  auto [vid, nv] = number(s.nVertices, s.vertexBoundary);
  auto [eid, ne] = number(s.nEdges, s.edgeBoundary);
  auto [fid, nf] = number(s.nTriangles, s.triangleBoundary);
  int nt = n;
  std::vector<std::map<int, long>> d1(ne), d2(nf), d3(nt);
  for (int c = 0; c < s.nEdges; ++c) {
    if (eid[c] < 0) continue;
    auto [a, b] = s.edgeEnds[c];
    if (vid[b] >= 0) d1[eid[c]][vid[b]] += 1;
    if (vid[a] >= 0) d1[eid[c]][vid[a]] -= 1;
  }
  for (int c = 0; c < s.nTriangles; ++c) {
    if (fid[c] < 0) continue;
    auto [a, f] = s.triangleEmb[c][0];
    std::array<int, 3> v;
    int k = 0;
    for (int x = 0; x < 4; ++x)
      if (x != f) v[k++] = x;
    // boundary of [v0 v1 v2] = [v1 v2] - [v0 v2] + [v0 v1]
    const int pairs[3][2] = {{1, 2}, {0, 2}, {0, 1}};
    for (int i = 0; i < 3; ++i) {
      int e = edge_index(v[pairs[i][0]], v[pairs[i][1]]);
      int cls = s.tetEdge[a][e];
      if (eid[cls] < 0) continue;
      long sg = (i == 1 ? -1 : 1) * s.tetEdgeSign[a][e];
      d2[fid[c]][eid[cls]] += sg;
    }
  }
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < 4; ++f) {
      int cls = s.tetTriangle[a][f];
      if (fid[cls] < 0) continue;
      long sg = (f % 2 ? -1 : 1) * s.tetTriangleSign[a][f];
      d3[a][fid[cls]] += sg;
    }
  for (auto* d : {&d1, &d2, &d3})
    for (auto& col : *d)
      for (auto it = col.begin(); it != col.end();)
        it = it->second == 0 ? col.erase(it) : std::next(it);
  SparseResult r1 = snf(d1, nv), r2 = snf(d2, ne), r3 = snf(d3, nf);
  HomologyProfile h;
  long sizes[4] = {nv, ne, nf, nt};
  long ranks[5] = {0, r1.rank, r2.rank, r3.rank, 0};
  const SparseResult* next[4] = {&r1, &r2, &r3, nullptr};
  for (int k = 0; k < 4; ++k) {
    HomologyGroup g;
    g.rank = sizes[k] - ranks[k] - ranks[k + 1];
    if (next[k])
      for (const auto& d : next[k]->invariants) g.torsion.push_back(d.str());
    h.groups.push_back(g);
  }
  return h;
}

}  // namespace sgk
