#include "sgk/compile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sgk {

namespace {

// Simple planar map on the sphere: CCW neighbour lists.
struct PlanarMap {
  std::vector<std::vector<int>> rot;
  int add() {
    rot.push_back({});
    return static_cast<int>(rot.size()) - 1;
  }
  int slotOf(int w, int u) const {
    const auto& r = rot[w];
    return static_cast<int>(std::find(r.begin(), r.end(), u) - r.begin());
  }
};

// The diagram drawn as a simplicial 2-sphere.  Every arc becomes a path of
// three segments, components hang off an auxiliary vertex, and each face is
// filled by a ring of corner vertices around a centre.
struct FilledSphere {
  DiagramInfo info;
  PlanarMap map;
  int nodeCount = 0;  // diagram nodes occupy 0..nodeCount-1
  std::map<std::string, std::pair<int, int>> arcPoints;  // arc -> (near arcEnds[0], near arcEnds[1])
  int vertexCount = 0;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
};

FilledSphere fill(const Diagram& d) {
  FilledSphere fs;
  fs.info = validate(d);
  const DiagramInfo& info = fs.info;
  PlanarMap& M = fs.map;
  fs.nodeCount = static_cast<int>(info.rotation.size());
  for (int n = 0; n < fs.nodeCount; ++n) {
    M.add();
    M.rot[n].assign(info.rotation[n].size(), -1);
  }
  for (const auto& [arc, ends] : info.arcEnds) {
    int p = M.add(), q = M.add();
    M.rot[ends[0].node][ends[0].pos] = p;
    M.rot[ends[1].node][ends[1].pos] = q;
    M.rot[p] = {ends[0].node, q};
    M.rot[q] = {p, ends[1].node};
    fs.arcPoints[arc] = {p, q};
  }
  int z = M.add();
  std::vector<int> anchor(info.componentCount, -1);
  for (int n = fs.nodeCount - 1; n >= 0; --n) anchor[info.nodeComponent[n]] = n;
  auto hang = [&](int n) {
    int s1 = M.add(), s2 = M.add();
    M.rot[z].push_back(s1);
    M.rot[s1] = {z, s2};
    M.rot[s2] = {s1, n};
    M.rot[n].insert(M.rot[n].begin(), s2);
  };
  for (int n : anchor) hang(n);
  if (anchor.empty()) hang(M.add());

  // faces, darts (u, k) with the face on the left
  std::vector<std::vector<char>> seen(M.rot.size());
  for (std::size_t u = 0; u < M.rot.size(); ++u) seen[u].assign(M.rot[u].size(), 0);
  std::vector<std::vector<std::pair<int, int>>> faces;
  for (std::size_t u = 0; u < M.rot.size(); ++u)
    for (std::size_t k = 0; k < M.rot[u].size(); ++k) {
      if (seen[u][k]) continue;
      faces.push_back({});
      int a = static_cast<int>(u), b = static_cast<int>(k);
      while (!seen[a][b]) {
        seen[a][b] = 1;
        faces.back().push_back({a, b});
        int w = M.rot[a][b];
        int deg = static_cast<int>(M.rot[w].size());
        int j = M.slotOf(w, a);
        a = w;
        b = (j - 1 + deg) % deg;
      }
    }
  int next = static_cast<int>(M.rot.size());
  for (const auto& face : faces) {
    int L = static_cast<int>(face.size());
    std::vector<int> ring(L);
    for (int i = 0; i < L; ++i) ring[i] = next++;
    int centre = next++;
    for (int i = 0; i < L; ++i) {
      int ni = face[i].first, nj = M.rot[ni][face[i].second];
      int ri = ring[i], rj = ring[(i + 1) % L];
      fs.triangles.push_back({ni, nj, ri});
      fs.triangles.push_back({nj, rj, ri});
      fs.triangles.push_back({ri, rj, centre});
    }
  }
  fs.vertexCount = next;
  return fs;
}

// Conjugate gradients for the Tutte system; L is symmetric positive definite.
std::vector<double> solve_cg(const std::vector<std::vector<std::pair<int, double>>>& L, const std::vector<double>& rhs) {
  std::size_t n = rhs.size();
  std::vector<double> x(n, 0.0), r = rhs, p = rhs, Ap(n);
  double rr = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
  double target = 1e-26 * std::max(1.0, rr);
  for (std::size_t it = 0; it < 20 * n + 100 && rr > target; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (auto [j, w] : L[i]) s += w * p[j];
      Ap[i] = s;
    }
    double alpha = rr / std::inner_product(p.begin(), p.end(), Ap.begin(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    double rr2 = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + rr2 / rr * p[i];
    rr = rr2;
  }
  return x;
}

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool same_point(const Point2& a, const Point2& b) { return std::abs(a.x - b.x) < 1e-12 && std::abs(a.y - b.y) < 1e-12; }

bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  int shared = same_point(a, c) + same_point(a, d) + same_point(b, c) + same_point(b, d);
  double d1 = cross(a, b, c), d2 = cross(a, b, d), d3 = cross(c, d, a), d4 = cross(c, d, b);
  const double eps = 1e-14;
  if (shared) {
    // touching at a common endpoint is fine unless the segments overlap
    if (std::abs(d1) < eps && std::abs(d2) < eps) {
      Point2 s = same_point(a, c) || same_point(a, d) ? a : b;
      Point2 u = same_point(s, a) ? b : a, v = same_point(s, c) ? d : c;
      return (u.x - s.x) * (v.x - s.x) + (u.y - s.y) * (v.y - s.y) > 0;
    }
    return false;
  }
  return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

Error sub_error(const std::string& msg) { return Error(ErrorCode::InvalidSubComplex, msg); }

}  // namespace

PlanarLayout planar_layout(const Diagram& d) {
  FilledSphere fs = fill(d);
  int n = fs.vertexCount;
  std::vector<std::set<int>> nbr(n);
  for (const auto& tr : fs.triangles)
    for (int i = 0; i < 3; ++i) {
      nbr[tr[i]].insert(tr[(i + 1) % 3]);
      nbr[tr[(i + 1) % 3]].insert(tr[i]);
    }
  // outer triangle pinned clockwise so the interior keeps its orientation
  const auto& outer = fs.triangles.front();
  std::vector<Point2> pos(n);
  std::vector<int> idx(n, -1);
  const double pi = std::acos(-1.0);
  double angles[3] = {pi / 2, pi / 2 - 2 * pi / 3, pi / 2 - 4 * pi / 3};
  for (int i = 0; i < 3; ++i) pos[outer[i]] = {std::cos(angles[i]), std::sin(angles[i])};
  int m = 0;
  for (int v = 0; v < n; ++v)
    if (v != outer[0] && v != outer[1] && v != outer[2]) idx[v] = m++;
  std::vector<std::vector<std::pair<int, double>>> L(m);
  std::vector<double> bx(m, 0.0), by(m, 0.0);
  for (int v = 0; v < n; ++v) {
    if (idx[v] < 0) continue;
    L[idx[v]].push_back({idx[v], static_cast<double>(nbr[v].size())});
    for (int w : nbr[v]) {
      if (idx[w] >= 0) {
        L[idx[v]].push_back({idx[w], -1.0});
      } else {
        bx[idx[v]] += pos[w].x;
        by[idx[v]] += pos[w].y;
      }
    }
  }
  std::vector<double> xs = solve_cg(L, bx), ys = solve_cg(L, by);
  for (int v = 0; v < n; ++v)
    if (idx[v] >= 0) pos[v] = {xs[idx[v]], ys[idx[v]]};
  PlanarLayout out;
  const DiagramInfo& info = fs.info;
  for (int k = 0; k < fs.nodeCount; ++k) {
    bool isV = info.isVertex(k);
    const std::string& id = isV ? d.vertices[k].id : d.crossings[k - info.vertexCount].id;
    out.nodes[id] = pos[k];
    if (!isV) out.crossings.insert(id);
  }
  for (const auto& [arc, ends] : info.arcEnds) {
    auto [p, q] = fs.arcPoints.at(arc);
    out.arcs[arc] = {pos[ends[0].node], pos[p], pos[q], pos[ends[1].node]};
  }
  return out;
}

bool layout_realizes(const Diagram& d, const PlanarLayout& layout) {
  DiagramInfo info = validate(d);
  auto nodeId = [&](int k) { return info.isVertex(k) ? d.vertices[k].id : d.crossings[k - info.vertexCount].id; };
  for (const auto& [arc, ends] : info.arcEnds) {
    auto it = layout.arcs.find(arc);
    if (it == layout.arcs.end() || it->second.size() < 2) return false;
    if (!same_point(it->second.front(), layout.nodes.at(nodeId(ends[0].node)))) return false;
    if (!same_point(it->second.back(), layout.nodes.at(nodeId(ends[1].node)))) return false;
  }
  for (std::size_t k = 0; k < info.rotation.size(); ++k) {
    std::size_t deg = info.rotation[k].size();
    if (deg < 3) continue;
    std::vector<std::pair<double, std::size_t>> ang;
    Point2 o = layout.nodes.at(nodeId(static_cast<int>(k)));
    for (std::size_t s = 0; s < deg; ++s) {
      const std::string& arc = info.rotation[k][s];
      const auto& ends = info.arcEnds.at(arc);
      const auto& pts = layout.arcs.at(arc);
      DiagramInfo::Slot me{static_cast<int>(k), static_cast<int>(s)};
      Point2 nb = ends[0] == me ? pts[1] : pts[pts.size() - 2];
      ang.push_back({std::atan2(nb.y - o.y, nb.x - o.x), s});
    }
    std::sort(ang.begin(), ang.end());
    std::size_t start = 0;
    while (ang[start].second != 0) ++start;
    for (std::size_t i = 0; i < deg; ++i)
      if (ang[(start + i) % deg].second != i) return false;
  }
  std::vector<std::pair<Point2, Point2>> segs;
  for (const auto& [arc, pts] : layout.arcs)
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) segs.push_back({pts[i], pts[i + 1]});
  for (std::size_t i = 0; i < segs.size(); ++i)
    for (std::size_t j = i + 1; j < segs.size(); ++j)
      if (segments_cross(segs[i].first, segs[i].second, segs[j].first, segs[j].second)) return false;
  return true;
}

CompiledGraph compile_to_sphere(const Diagram& d) {
  FilledSphere fs = fill(d);
  const DiagramInfo& info = fs.info;
  int V = fs.vertexCount;
  auto low = [&](int x) { return V + x; };
  int top = 2 * V, bottom = 2 * V + 1;
  std::vector<std::array<int, 4>> tets;
  const auto& ref = fs.triangles.front();
  tets.push_back({ref[0], ref[1], ref[2], top});
  for (std::size_t i = 0; i < fs.triangles.size(); ++i) {
    std::array<int, 3> s = fs.triangles[i];
    std::sort(s.begin(), s.end());
    auto [a, b, c] = s;
    if (i) tets.push_back({a, b, c, top});
    tets.push_back({low(a), low(b), low(c), bottom});
    tets.push_back({a, b, c, low(c)});
    tets.push_back({a, b, low(b), low(c)});
    tets.push_back({a, low(a), low(b), low(c)});
  }
  std::vector<Perm4> relabel;
  CompiledGraph out;
  out.sphere = validate_and_orient(from_simplices(tets), &relabel);
  std::vector<std::pair<int, int>> vertexAt(2 * V + 2, {-1, -1});
  std::map<std::pair<int, int>, EdgeRef> edgeAt;
  for (std::size_t a = 0; a < tets.size(); ++a) {
    std::array<int, 4> corner;
    for (int v = 0; v < 4; ++v) corner[relabel[a][v]] = tets[a][v];
    for (int v = 0; v < 4; ++v) {
      if (vertexAt[corner[v]].first < 0) vertexAt[corner[v]] = {static_cast<int>(a), v};
      for (int w = 0; w < 4; ++w)
        if (v != w) edgeAt.emplace(std::make_pair(corner[v], corner[w]), EdgeRef{static_cast<int>(a), v, w});
    }
  }
  for (int k = 0; k < info.vertexCount; ++k) out.graph.vertices[d.vertices[k].id] = vertexAt[k];
  for (const auto& e : d.edges) {
    const auto& steps = info.edgeSteps.at(e.id);
    std::vector<int> seq{steps.front().from.node};
    bool under = false;
    for (const auto& st : steps) {
      auto [p, q] = fs.arcPoints.at(st.arc);
      if (!(info.arcEnds.at(st.arc)[0] == st.from)) std::swap(p, q);
      if (under) seq.push_back(low(p));
      seq.push_back(p);
      seq.push_back(q);
      under = false;
      int node = st.to.node;
      if (info.isVertex(node)) {
        seq.push_back(node);
      } else if (st.to.pos % 2 == 0) {
        seq.push_back(low(q));
        seq.push_back(low(node));
        under = true;
      } else {
        seq.push_back(node);
      }
    }
    auto& path = out.graph.edgePaths[e.id];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) path.push_back(edgeAt.at({seq[i], seq[i + 1]}));
  }
  out.metadata = underlying_graph(d);
  return out;
}

void validate_subcomplex(const Triangulation& t, const SubComplex& sub, const DecoratedGraph& metadata) {
  Skeleton s = skeleton(t);
  auto vclass = [&](int tet, int v) {
    if (tet < 0 || tet >= static_cast<int>(t.size()) || v < 0 || v > 3) throw sub_error("corner out of range");
    return s.tetVertex[tet][v];
  };
  std::map<int, std::string> marked;
  std::map<std::string, int> classOf;
  for (const auto& v : metadata.vertices)
    if (!sub.vertices.count(v)) throw sub_error("vertex '" + v + "' is not marked");
  for (const auto& [name, c] : sub.vertices) {
    if (!metadata.hasVertex(name)) throw sub_error("marked vertex '" + name + "' is not a graph vertex");
    int k = vclass(c.first, c.second);
    if (marked.count(k)) throw sub_error("vertices '" + name + "' and '" + marked[k] + "' coincide");
    marked[k] = name;
    classOf[name] = k;
  }
  std::set<int> usedEdges, usedInterior;
  for (const auto& e : metadata.edges)
    if (!sub.edgePaths.count(e.id)) throw sub_error("edge '" + e.id + "' has no path");
  for (const auto& [name, path] : sub.edgePaths) {
    const GraphEdge* ge = metadata.edge(name);
    if (!ge) throw sub_error("path '" + name + "' is not a graph edge");
    if (path.empty()) throw sub_error("path '" + name + "' is empty");
    std::vector<int> verts;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const EdgeRef& r = path[i];
      if (r.a == r.b || r.b < 0 || r.b > 3) throw sub_error("degenerate edge in path '" + name + "'");
      int tail = vclass(r.tet, r.a), head = vclass(r.tet, r.b);
      if (i && verts.back() != tail) throw sub_error("path '" + name + "' is not connected");
      if (!i) verts.push_back(tail);
      verts.push_back(head);
      int ec = s.tetEdge[r.tet][edge_index(r.a, r.b)];
      if (!usedEdges.insert(ec).second) throw sub_error("edge reused by path '" + name + "'");
    }
    std::string from = ge->u, to = ge->v;
    if (metadata.edgeDirection && metadata.edgeDirection->count(name)) std::tie(from, to) = metadata.edgeDirection->at(name);
    bool fwd = verts.front() == classOf[from] && verts.back() == classOf[to];
    bool bwd = verts.front() == classOf[to] && verts.back() == classOf[from];
    bool directed = metadata.edgeDirection && metadata.edgeDirection->count(name);
    if (!(fwd || (!directed && bwd))) throw sub_error("path '" + name + "' does not join its endpoints");
    for (std::size_t i = 1; i + 1 < verts.size(); ++i) {
      if (marked.count(verts[i])) throw sub_error("path '" + name + "' passes through a graph vertex");
      if (!usedInterior.insert(verts[i]).second) throw sub_error("path '" + name + "' meets another path");
    }
  }
}

DecoratedGraph graph_from_subcomplex(const Triangulation& t, const SubComplex& sub, const DecoratedGraph& metadata) {
  Skeleton s = skeleton(t);
  std::map<int, std::string> nameOf;
  DecoratedGraph g;
  for (const auto& [name, c] : sub.vertices) {
    nameOf[s.tetVertex[c.first][c.second]] = name;
    g.vertices.push_back(name);
  }
  for (const auto& [name, path] : sub.edgePaths) {
    int a = s.tetVertex[path.front().tet][path.front().a];
    int b = s.tetVertex[path.back().tet][path.back().b];
    if (!nameOf.count(a) || !nameOf.count(b)) throw sub_error("path '" + name + "' ends off the graph");
    g.edges.push_back({name, nameOf[a], nameOf[b]});
  }
  g.vertexColor = metadata.vertexColor;
  g.edgeColor = metadata.edgeColor;
  g.edgeDirection = metadata.edgeDirection;
  g.normalize();
  return g;
}

SphereReport verify_sphere(const Triangulation& t, const SimplifyOptions& opt) {
  SphereReport r;
  r.status = "failed";
  Skeleton s;
  try {
    s = skeleton(t);
  } catch (const Error& e) {
    r.problems.push_back(e.what());
    return r;
  }
  r.closed = std::none_of(s.triangleBoundary.begin(), s.triangleBoundary.end(), [](char c) { return c != 0; });
  if (!r.closed) r.problems.push_back("boundary is nonempty");
  try {
    validate_and_orient(t);
    r.orientable = true;
  } catch (const Error& e) {
    r.problems.push_back(e.what());
  }
  r.homology = homology(t);
  HomologyProfile sphere;
  sphere.groups = {{1, {}}, {0, {}}, {0, {}}, {1, {}}};
  r.homologyConsistent = r.homology == sphere;
  if (!r.homologyConsistent) r.problems.push_back("homology " + r.homology.str());
  if (!r.closed || !r.orientable || !r.homologyConsistent || t.size() == 0) return r;
  Triangulation small = pachner_simplify(t, opt);
  // restarts from the smallest triangulation so far, with fresh seeds and longer walks
  for (int k = 1; k <= 12 && small.size() > 2; ++k) {
    SimplifyOptions again = opt;
    again.seed = opt.seed + static_cast<std::uint64_t>(k);
    again.randomWalkRounds = opt.randomWalkRounds * (1 + k);
    Triangulation next = pachner_simplify(small, again);
    if (next.size() <= small.size()) small = std::move(next);
  }
  r.simplifiedSize = small.size();
  // every closed 3-manifold triangulated by at most two tetrahedra with the
  // homology of the 3-sphere is the 3-sphere
  r.status = small.size() <= 2 ? "certified" : "homology-consistent";
  return r;
}

std::string write_sub(const SubComplex& sub, const DecoratedGraph& g) {
  std::ostringstream os;
  DecorationType ty = g.type();
  os << "decorations";
  if (ty.vertexColors) os << " vertex-colors";
  if (ty.edgeColors) os << " edge-colors";
  if (ty.directions) os << " directions";
  os << "\n";
  for (const auto& [name, c] : sub.vertices) {
    os << "vertex " << name << ' ' << c.first << ' ' << c.second;
    if (g.vertexColor) os << " color=" << g.vertexColor->at(name);
    os << "\n";
  }
  for (const auto& [name, path] : sub.edgePaths) {
    const GraphEdge* e = g.edge(name);
    os << "edge " << name << ' ' << (e ? e->u : "?") << ' ' << (e ? e->v : "?");
    if (g.edgeColor) os << " color=" << g.edgeColor->at(name);
    if (g.edgeDirection && g.edgeDirection->count(name)) os << " from=" << g.edgeDirection->at(name).first;
    os << " :";
    for (const auto& r : path) os << ' ' << r.tet << ':' << r.a << r.b;
    os << "\n";
  }
  return os.str();
}

std::pair<SubComplex, DecoratedGraph> read_sub(const std::string& text) {
  SubComplex sub;
  DecoratedGraph g;
  DecorationType ty;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  auto bad = [&](const std::string& msg) { return Error(ErrorCode::Syntax, msg, lineNo, 1); };
  std::map<std::string, unsigned> vc, ec;
  std::map<std::string, std::pair<std::string, std::string>> dir;
  auto number = [&](const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw bad("expected a number, got '" + s + "'");
    return static_cast<unsigned>(std::stoul(s));
  };
  while (std::getline(in, line)) {
    ++lineNo;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "decorations") {
      std::string f;
      while (ls >> f) {
        if (f == "vertex-colors") ty.vertexColors = true;
        else if (f == "edge-colors") ty.edgeColors = true;
        else if (f == "directions") ty.directions = true;
        else throw bad("unknown decoration '" + f + "'");
      }
    } else if (kw == "vertex") {
      std::string name, tet, corner, opt;
      if (!(ls >> name >> tet >> corner)) throw bad("expected 'vertex <id> <tet> <corner>'");
      sub.vertices[name] = {static_cast<int>(number(tet)), static_cast<int>(number(corner))};
      g.vertices.push_back(name);
      while (ls >> opt) {
        if (opt.rfind("color=", 0) != 0) throw bad("unknown option '" + opt + "'");
        vc[name] = number(opt.substr(6));
      }
    } else if (kw == "edge") {
      std::string name, u, v, tok;
      if (!(ls >> name >> u >> v)) throw bad("expected 'edge <id> <u> <v> ... : <path>'");
      bool path = false;
      auto& refs = sub.edgePaths[name];
      while (ls >> tok) {
        if (!path) {
          if (tok == ":") path = true;
          else if (tok.rfind("color=", 0) == 0) ec[name] = number(tok.substr(6));
          else if (tok.rfind("from=", 0) == 0) {
            std::string f = tok.substr(5);
            if (f != u && f != v) throw bad("direction source is not an endpoint");
            dir[name] = {f, f == u ? v : u};
          } else throw bad("unknown option '" + tok + "'");
          continue;
        }
        auto colon = tok.find(':');
        if (colon == std::string::npos || tok.size() != colon + 3) throw bad("bad path entry '" + tok + "'");
        EdgeRef r{static_cast<int>(number(tok.substr(0, colon))), tok[colon + 1] - '0', tok[colon + 2] - '0'};
        if (r.a < 0 || r.a > 3 || r.b < 0 || r.b > 3) throw bad("bad corner in '" + tok + "'");
        refs.push_back(r);
      }
      if (!path) throw bad("missing ':' before the path");
      g.edges.push_back({name, u, v});
    } else {
      throw bad("unknown keyword '" + kw + "'");
    }
  }
  if (ty.vertexColors) {
    for (const auto& v : g.vertices) vc.emplace(v, 0);
    g.vertexColor = vc;
  }
  if (ty.edgeColors) {
    for (const auto& e : g.edges) ec.emplace(e.id, 0);
    g.edgeColor = ec;
  }
  if (ty.directions) g.edgeDirection = dir;
  g.normalize();
  g.validate();
  return {sub, g};
}

}  // namespace sgk
