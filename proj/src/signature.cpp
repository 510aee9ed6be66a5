#include <algorithm>
#include <sstream>

#include "sgk/tri.hpp"

namespace sgk {

namespace {

struct Start {
  int tet = -1;
  Perm4 rho;
};

long label_of(const FaceData& fd, const std::vector<long>& cls) {
  if (cls.empty() || fd.label < 0) return fd.label;
  return fd.label < static_cast<int>(cls.size()) ? cls[fd.label] : fd.label;
}

std::uint8_t mask_to_new(std::uint8_t mask, const Perm4& rho) {
  std::uint8_t out = 0;
  for (int i = 0; i < 4; ++i)
    if (mask >> rho[i] & 1) out |= static_cast<std::uint8_t>(1u << i);
  return out;
}

// Breadth-first code from a start.  Returns false as soon as the code exceeds
// `bound` (when given); `order`/`maps` receive the visit order.
bool bfs_code(const Triangulation& t, const std::vector<long>& cls, const Start& s, std::vector<long>& code,
              const std::vector<long>* bound, std::vector<int>* order, std::vector<Perm4>* maps) {
  code.clear();
  std::vector<int> idx(t.size(), -1);
  std::vector<int> ord{s.tet};
  std::vector<Perm4> rho{s.rho};
  idx[s.tet] = 0;
  bool tight = bound != nullptr;  // code equals bound so far
  auto push = [&](long v) {
    if (tight) {
      std::size_t k = code.size();
      if (k < bound->size()) {
        if (v > (*bound)[k]) return false;
        if (v < (*bound)[k]) tight = false;
      }
    }
    code.push_back(v);
    return true;
  };
  for (std::size_t h = 0; h < ord.size(); ++h) {
    int T = ord[h];
    const Perm4 r = rho[h];
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = t.adj[T][r[f]];
      if (g.boundary()) {
        const FaceData& fd = t.face[T][r[f]];
        if (!push(-1) || !push(label_of(fd, cls)) || !push(mask_to_new(fd.juncture, r)) ||
            !push(mask_to_new(fd.positive, r)))
          return false;
        continue;
      }
      if (idx[g.tet] < 0) {
        idx[g.tet] = static_cast<int>(ord.size());
        ord.push_back(g.tet);
        rho.push_back(g.perm * r);
      }
      Perm4 q = rho[idx[g.tet]].inverse() * g.perm * r;
      if (!push(idx[g.tet]) || !push(q.index())) return false;
    }
  }
  if (order) *order = ord;
  if (maps) *maps = rho;
  return true;
}

std::vector<std::vector<int>> tet_components(const Triangulation& t) {
  std::vector<int> comp(t.size(), -1);
  std::vector<std::vector<int>> out;
  for (std::size_t a = 0; a < t.size(); ++a) {
    if (comp[a] >= 0) continue;
    out.push_back({});
    std::vector<int> st{static_cast<int>(a)};
    comp[a] = static_cast<int>(out.size()) - 1;
    while (!st.empty()) {
      int x = st.back();
      st.pop_back();
      out.back().push_back(x);
      for (const auto& g : t.adj[x])
        if (!g.boundary() && comp[g.tet] < 0) {
          comp[g.tet] = comp[a];
          st.push_back(g.tet);
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

std::pair<std::vector<long>, Start> best_start(const Triangulation& t, const std::vector<long>& cls,
                                               const std::vector<int>& tets) {
  std::vector<long> best, cur;
  Start bs;
  for (int a : tets)
    for (int k = 0; k < 24; ++k) {
      Perm4 rho = Perm4::from_index(k);
      if (rho.sign() != 1) continue;
      Start s{a, rho};
      if (bfs_code(t, cls, s, cur, bs.tet < 0 ? nullptr : &best, nullptr, nullptr)) {
        if (bs.tet < 0 || cur < best) {
          best = cur;
          bs = s;
        }
      }
    }
  return {best, bs};
}

std::string encode(const std::vector<long>& code) {
  std::ostringstream os;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (i) os << ',';
    os << code[i];
  }
  return os.str();
}

}  // namespace

std::string iso_signature(const Triangulation& t, const std::vector<long>& cls) {
  std::vector<std::string> parts;
  for (const auto& comp : tet_components(t)) parts.push_back(std::to_string(comp.size()) + ":" + encode(best_start(t, cls, comp).first));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) out += "[" + p + "]";
  return out;
}

std::optional<TriIso> find_isomorphism(const Triangulation& a, const Triangulation& b, const std::vector<long>& ca,
                                       const std::vector<long>& cb) {
  if (a.size() != b.size()) return std::nullopt;
  struct C {
    std::vector<long> code;
    Start s;
  };
  auto collect = [](const Triangulation& t, const std::vector<long>& cls) {
    std::vector<C> out;
    for (const auto& comp : tet_components(t)) {
      auto [code, s] = best_start(t, cls, comp);
      code.insert(code.begin(), static_cast<long>(comp.size()));
      out.push_back({code, s});
    }
    std::sort(out.begin(), out.end(), [](const C& x, const C& y) { return x.code < y.code; });
    return out;
  };
  auto A = collect(a, ca), B = collect(b, cb);
  if (A.size() != B.size()) return std::nullopt;
  TriIso iso;
  iso.tetMap.assign(a.size(), -1);
  iso.perms.assign(a.size(), Perm4());
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A[i].code != B[i].code) return std::nullopt;
    std::vector<long> tmp;
    std::vector<int> oa, ob;
    std::vector<Perm4> ra, rb;
    bfs_code(a, ca, A[i].s, tmp, nullptr, &oa, &ra);
    bfs_code(b, cb, B[i].s, tmp, nullptr, &ob, &rb);
    for (std::size_t k = 0; k < oa.size(); ++k) {
      iso.tetMap[oa[k]] = ob[k];
      iso.perms[oa[k]] = rb[k] * ra[k].inverse();
    }
  }
  if (!check_isomorphism(a, b, iso, ca, cb)) return std::nullopt;
  return iso;
}

bool check_isomorphism(const Triangulation& a, const Triangulation& b, const TriIso& iso, const std::vector<long>& ca,
                       const std::vector<long>& cb) {
  if (a.size() != b.size() || iso.tetMap.size() != a.size() || iso.perms.size() != a.size()) return false;
  std::vector<char> hit(b.size(), 0);
  for (int x : iso.tetMap) {
    if (x < 0 || x >= static_cast<int>(b.size()) || hit[x]) return false;
    hit[x] = 1;
  }
  for (std::size_t t = 0; t < a.size(); ++t) {
    const Perm4& P = iso.perms[t];
    if (P.sign() != 1) return false;
    int bt = iso.tetMap[t];
    for (int f = 0; f < 4; ++f) {
      const Gluing& ga = a.adj[t][f];
      const Gluing& gb = b.adj[bt][P[f]];
      if (ga.boundary() != gb.boundary()) return false;
      if (ga.boundary()) {
        const FaceData& fa = a.face[t][f];
        const FaceData& fb = b.face[bt][P[f]];
        if (label_of(fa, ca) != label_of(fb, cb)) return false;
        for (int c = 0; c < 4; ++c) {
          if ((fa.juncture >> c & 1) != (fb.juncture >> P[c] & 1)) return false;
          if ((fa.positive >> c & 1) != (fb.positive >> P[c] & 1)) return false;
        }
        continue;
      }
      if (gb.tet != iso.tetMap[ga.tet]) return false;
      if (!(gb.perm == iso.perms[ga.tet] * ga.perm * P.inverse())) return false;
    }
  }
  return true;
}

}  // namespace sgk
