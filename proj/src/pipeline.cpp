#include "sgk/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace sgk {

using json = nlohmann::json;

namespace {

bool is_point(const DecoratedGraph& g) { return g.vertices.size() == 1 && g.edges.empty(); }
bool is_one_edge(const DecoratedGraph& g) {
  return g.vertices.size() == 2 && g.edges.size() == 1 && !g.edges[0].isLoop();
}

unsigned max_color(const DecoratedGraph& g) {
  unsigned m = 0;
  if (g.vertexColor)
    for (const auto& [v, c] : *g.vertexColor) m = std::max(m, c);
  return m;
}

std::set<std::string> edge_ids(const DecoratedGraph& g) {
  std::set<std::string> out;
  for (const auto& e : g.edges) out.insert(e.id);
  return out;
}

std::set<std::string> vertex_ids(const DecoratedGraph& g) { return {g.vertices.begin(), g.vertices.end()}; }

// Splits the edges at v into two sides when the drawing itself shows v as a
// cut vertex: the strands on one side never cross the others, and their ends
// are consecutive around v.
std::optional<std::array<std::set<std::string>, 2>> drawn_cut(const Diagram& d, const std::string& v) {
  DiagramInfo info = validate(d);
  std::map<std::string, std::string> parent;
  for (const auto& e : d.edges) parent[e.id] = e.id;
  std::function<std::string(const std::string&)> find = [&](const std::string& x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  auto unite = [&](const std::string& a, const std::string& b) { parent[find(a)] = find(b); };
  for (const auto& c : d.crossings)
    for (const auto& a : c.arcs) unite(info.arcEdge.at(c.arcs[0]), info.arcEdge.at(a));
  const VertexNode* at = nullptr;
  for (const auto& w : d.vertices) {
    if (w.id == v) {
      at = &w;
      continue;
    }
    for (const auto& a : w.rotation) unite(info.arcEdge.at(w.rotation[0]), info.arcEdge.at(a));
  }
  if (!at || at->rotation.empty()) return std::nullopt;
  std::vector<std::string> cls;
  for (const auto& a : at->rotation) cls.push_back(find(info.arcEdge.at(a)));
  std::vector<std::string> order;
  for (const auto& c : cls)
    if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
  if (order.size() < 2) return std::nullopt;
  const std::size_t k = cls.size();
  for (const auto& c : order) {
    int runs = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (cls[i] == c && cls[(i + k - 1) % k] != c) ++runs;
    if (runs != 1) continue;
    std::array<std::set<std::string>, 2> out;
    for (const auto& e : d.edges) out[find(e.id) == c ? 0 : 1].insert(e.id);
    return out;
  }
  return std::nullopt;
}

std::set<std::string> ends_of(const DecoratedGraph& g, const std::set<std::string>& edges) {
  std::set<std::string> out;
  for (const auto& e : g.edges)
    if (edges.count(e.id)) out.insert({e.u, e.v});
  return out;
}

std::vector<long> label_classes(const MarkedExterior& me) {
  std::vector<long> out;
  for (const Region& r : me.regions)
    out.push_back(2L * static_cast<long>(r.color.value_or(0)) + (r.kind == Region::Kind::Edge ? 1 : 0));
  return out;
}

// Graph isomorphism induced on regions by a triangulation isomorphism.
std::optional<GraphIso> induced_iso(const MarkedExterior& a, const MarkedExterior& b, const TriIso& iso) {
  std::map<int, int> regionMap;
  for (std::size_t t = 0; t < a.manifold.size(); ++t)
    for (int f = 0; f < 4; ++f) {
      if (!a.manifold.adj[t][f].boundary()) continue;
      int la = a.manifold.face[t][f].label;
      int lb = b.manifold.face[iso.tetMap[t]][iso.perms[t][f]].label;
      auto [it, fresh] = regionMap.insert({la, lb});
      if (!fresh && it->second != lb) return std::nullopt;
    }
  GraphIso g;
  for (auto [la, lb] : regionMap) {
    const Region& ra = a.regions.at(la);
    const Region& rb = b.regions.at(lb);
    if (ra.kind != rb.kind) return std::nullopt;
    (ra.kind == Region::Kind::Vertex ? g.vertexMap : g.edgeMap)[ra.id] = rb.id;
  }
  if (g.vertexMap.size() != a.graph.vertices.size() || g.edgeMap.size() != a.graph.edges.size()) return std::nullopt;
  return g;
}

bool graph_iso_holds(const GraphIso& iso, const DecoratedGraph& a, const DecoratedGraph& b) {
  if (iso.vertexMap.size() != a.vertices.size() || iso.edgeMap.size() != a.edges.size()) return false;
  try {
    DecoratedGraph img = apply_iso(iso, a);
    img.normalize();
    DecoratedGraph want = b;
    want.normalize();
    return img == want;
  } catch (const std::exception&) {
    return false;
  }
}

bool pins_hold(const GraphIso& iso, const std::vector<std::string>& pa, const std::vector<std::string>& pb) {
  if (pa.size() != pb.size()) return false;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    auto it = iso.vertexMap.find(pa[k]);
    if (it == iso.vertexMap.end() || it->second != pb[k]) return false;
  }
  return true;
}

std::map<std::string, std::string> invert(const std::map<std::string, std::string>& m) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : m) out[v] = k;
  return out;
}

// iso between canonical graphs -> iso between the originals
GraphIso through(const CanonicalDiagram& c1, const CanonicalDiagram& c2, const GraphIso& canon) {
  auto v2 = invert(c2.vertexMap), e2 = invert(c2.edgeMap);
  GraphIso out;
  for (const auto& [v, cv] : c1.vertexMap) out.vertexMap[v] = v2.at(canon.vertexMap.at(cv));
  for (const auto& [e, ce] : c1.edgeMap) out.edgeMap[e] = e2.at(canon.edgeMap.at(ce));
  return out;
}

GraphIso to_canonical(const CanonicalDiagram& c1, const CanonicalDiagram& c2, const GraphIso& iso) {
  GraphIso out;
  for (const auto& [v, w] : iso.vertexMap) out.vertexMap[c1.vertexMap.at(v)] = c2.vertexMap.at(w);
  for (const auto& [e, f] : iso.edgeMap) out.edgeMap[c1.edgeMap.at(e)] = c2.edgeMap.at(f);
  return out;
}

struct Pointed {
  Diagram recolored;
  CanonicalDiagram canon;
};

Pointed pointed(const Diagram& d, const std::vector<std::string>& pts, unsigned n) {
  Pointed p;
  p.recolored = recolor_vertices(d, recolor_pointed(underlying_graph(d), pts, n));
  p.canon = canonical_diagram(p.recolored);
  return p;
}

unsigned point_modulus(const Diagram& a, const Diagram& b) {
  return 1 + std::max(max_color(underlying_graph(a)), max_color(underlying_graph(b)));
}

MarkedExterior resimplified(const MarkedExterior& me, const PipelineOptions& opt, std::uint64_t seed) {
  if (seed == 0) return me;
  SimplifyOptions so{opt.simplifyMoves};
  so.seed = seed;
  return simplify_exterior(me, so);
}

Obstruction fingerprint_obstruction(const Fingerprint& a, const Fingerprint& b) {
  Obstruction o;
  o.kind = "fingerprint";
  o.entry = a.first_difference(b);
  o.detail = o.entry + ": " + a.entry(o.entry) + " vs " + b.entry(o.entry);
  return o;
}

// Maximum matching on a bipartite graph, Hopcroft-Karp.
std::vector<int> max_matching(std::size_t n, const std::vector<std::vector<int>>& adj) {
  const int INF = 1 << 29;
  std::vector<int> matchL(n, -1), matchR(n, -1), dist(n);
  auto bfs = [&] {
    std::vector<int> q;
    bool found = false;
    for (std::size_t u = 0; u < n; ++u) {
      dist[u] = matchL[u] < 0 ? 0 : INF;
      if (matchL[u] < 0) q.push_back(static_cast<int>(u));
    }
    for (std::size_t h = 0; h < q.size(); ++h) {
      int u = q[h];
      for (int w : adj[u]) {
        int m = matchR[w];
        if (m < 0)
          found = true;
        else if (dist[m] == INF) {
          dist[m] = dist[u] + 1;
          q.push_back(m);
        }
      }
    }
    return found;
  };
  std::function<bool(int)> dfs = [&](int u) {
    for (int w : adj[u]) {
      int m = matchR[w];
      if (m < 0 || (dist[m] == dist[u] + 1 && dfs(m))) {
        matchL[u] = w;
        matchR[w] = u;
        return true;
      }
    }
    dist[u] = INF;
    return false;
  };
  while (bfs())
    for (std::size_t u = 0; u < n; ++u)
      if (matchL[u] < 0) dfs(static_cast<int>(u));
  return matchL;
}

// Left vertices reachable from an unmatched left vertex by alternating paths.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> hall_violator(const std::vector<std::vector<int>>& adj,
                                                                             const std::vector<int>& matchL) {
  const std::size_t n = adj.size();
  std::vector<int> matchR(n, -1);
  for (std::size_t u = 0; u < n; ++u)
    if (matchL[u] >= 0) matchR[matchL[u]] = static_cast<int>(u);
  std::vector<char> seenL(n, 0), seenR(n, 0);
  std::vector<int> st;
  for (std::size_t u = 0; u < n; ++u)
    if (matchL[u] < 0) {
      st.push_back(static_cast<int>(u));
      seenL[u] = 1;
      break;
    }
  while (!st.empty()) {
    int u = st.back();
    st.pop_back();
    for (int w : adj[u]) {
      if (seenR[w]) continue;
      seenR[w] = 1;
      int m = matchR[w];
      if (m >= 0 && !seenL[m]) {
        seenL[m] = 1;
        st.push_back(m);
      }
    }
  }
  std::vector<std::size_t> S, N;
  for (std::size_t i = 0; i < n; ++i) {
    if (seenL[i]) S.push_back(i);
    if (seenR[i]) N.push_back(i);
  }
  return {S, N};
}

}  // namespace

// ---------------------------------------------------------------- options

PipelineOptions PipelineOptions::doubled() const {
  PipelineOptions o = *this;
  o.enumeration.maxRays *= 2;
  o.enumeration.maxPairs *= 2;
  o.enumeration.wallSeconds *= 2;
  o.simplifyMoves *= 2;
  o.witnessAttempts *= 2;
  o.wallSeconds *= 2;
  return o;
}

std::string PipelineOptions::key() const {
  std::ostringstream os;
  os << enumeration.maxRays << '/' << enumeration.maxPairs << '/' << enumeration.wallSeconds << '/' << simplifyMoves
     << '/' << witnessAttempts << '/' << wallSeconds << '/' << seed << '/' << depth << '/' << diagramSplits;
  return os.str();
}

// ------------------------------------------------------------ fingerprint

std::string Fingerprint::first_difference(const Fingerprint& o) const {
  for (const char* name : {"homology", "relHomology", "boundaryGenus", "regions", "graph"})
    if (entry(name) != o.entry(name)) return name;
  return "";
}

std::string Fingerprint::entry(const std::string& name) const {
  if (name == "homology") return homology.str();
  if (name == "relHomology") return relHomology.str();
  if (name == "boundaryGenus") {
    std::string s;
    for (int g : boundaryGenus) s += (s.empty() ? "" : ",") + std::to_string(g);
    return "[" + s + "]";
  }
  if (name == "regions") return regions;
  if (name == "graph") return graph;
  throw Error(ErrorCode::Usage, "unknown fingerprint entry " + name);
}

Fingerprint invariant_fingerprint(const MarkedExterior& me) {
  Fingerprint f;
  f.homology = homology(me.manifold);
  f.relHomology = homology(me.manifold, true);
  for (const auto& c : boundary_surface(me.manifold).components) f.boundaryGenus.push_back((2 - c.euler) / 2);
  std::sort(f.boundaryGenus.begin(), f.boundaryGenus.end());
  f.regions = region_summary(me).canonical;
  f.graph = canonical_form(me.graph);
  return f;
}

std::string fingerprint_to_json(const Fingerprint& f) {
  json j;
  for (const char* name : {"homology", "relHomology", "boundaryGenus", "regions", "graph"}) j[name] = f.entry(name);
  return j.dump();
}

MarkedExterior exterior_of(const Diagram& d, const PipelineOptions& opt) {
  CompiledGraph c = compile_to_sphere(d);
  ExteriorOptions eo;
  eo.depth = opt.depth;
  eo.simplifyOptions = SimplifyOptions{opt.simplifyMoves};
  eo.simplifyOptions.seed = opt.seed;
  return build_exterior(c.sphere, c.graph, c.metadata, eo);
}

// ----------------------------------------------------------------- pieces

PieceSplit find_pieces(const MarkedExterior& me, const PipelineOptions& opt) {
  PieceSplit out;
  if (me.graph.vertices.empty()) return out;
  std::vector<MarkedExterior> todo{me};
  while (!todo.empty()) {
    MarkedExterior x = std::move(todo.back());
    todo.pop_back();
    if (component_count(x.graph) <= 1) {
      out.pieces.push_back(std::move(x));
      continue;
    }
    SurfaceSearch s = find_reducing_sphere(x, opt.enumeration);
    if (s.status == SurfaceSearch::Status::Found) {
      auto [a, b] = split_along_sphere(x, *s.surface);
      todo.push_back(std::move(b));
      todo.push_back(std::move(a));
      continue;
    }
    if (s.status == SurfaceSearch::Status::Unknown) out.unknownReasons.push_back("sphere search: " + s.reason);
    out.pieces.push_back(std::move(x));
  }
  std::sort(out.pieces.begin(), out.pieces.end(),
            [](const MarkedExterior& a, const MarkedExterior& b) { return a.graph.vertices < b.graph.vertices; });
  return out;
}

DiagramPieces find_pieces(const Diagram& d, const PipelineOptions& opt) {
  Pipeline p(opt);
  return p.pieces(d);
}

// ------------------------------------------------------------ block trees

std::map<std::string, unsigned> recolor_pointed(const DecoratedGraph& g, const std::vector<std::string>& points,
                                                unsigned n) {
  std::map<std::string, unsigned> out;
  for (const auto& v : g.vertices) out[v] = g.vertexColor ? g.colorOf(v) : 0;
  for (std::size_t l = 0; l < points.size(); ++l) {
    if (!out.count(points[l])) throw Error(ErrorCode::MissingVertex, "point " + points[l] + " is not a vertex");
    out[points[l]] += n * static_cast<unsigned>(l + 1);
  }
  return out;
}

std::string block_tree_to_json(const BlockTree& t) {
  json j;
  j["iNodes"] = t.skeleton.iNodes;
  j["jNodes"] = t.skeleton.jNodes;
  j["links"] = json::array();
  for (const auto& l : t.skeleton.links) j["links"].push_back({{"id", l.id}, {"i", l.i}, {"j", l.j}, {"v", l.v}});
  j["blocks"] = json::object();
  for (const auto& [i, g] : t.blockGraphs) {
    json b;
    b["vertices"] = g.vertices;
    b["edges"] = json::array();
    for (const auto& e : g.edges) b["edges"].push_back(e.id);
    b["points"] = t.blockPoints.at(i);
    b["certain"] = std::find(t.uncertainBlocks.begin(), t.uncertainBlocks.end(), i) == t.uncertainBlocks.end();
    j["blocks"][i] = b;
  }
  j["cutMethod"] = t.cutMethod;
  j["unknownReasons"] = t.unknownReasons;
  return j.dump();
}

BlockTree find_block_tree(const Diagram& piece, const PipelineOptions& opt) {
  Pipeline p(opt);
  return p.block_tree(piece);
}

// --------------------------------------------------------------- pipeline

struct Pipeline::State {
  struct BlockResult {
    VerdictKind kind = VerdictKind::Unknown;
    std::string method;
    GraphIso canonIso;  // between canonical recoloured graphs
    std::optional<TriIso> tri;
    std::uint64_t seedA = 0, seedB = 0;
    Obstruction obstruction;
    std::string reason;
  };
  std::map<std::string, MarkedExterior> exteriors;
  std::map<std::string, Fingerprint> fingerprints;
  std::map<std::string, DiagramPieces> pieces;
  std::map<std::string, BlockTree> trees;
  std::map<std::string, BlockResult> blocks;
  std::chrono::steady_clock::time_point deadline;
  bool timed = false;

  bool out_of_time() const { return timed && std::chrono::steady_clock::now() > deadline; }
};

Pipeline::Pipeline(PipelineOptions opt) : opt_(std::move(opt)), st_(std::make_unique<State>()) {}
Pipeline::~Pipeline() = default;

const MarkedExterior& Pipeline::exterior(const Diagram& d) {
  std::string key = render(d);
  auto it = st_->exteriors.find(key);
  if (it != st_->exteriors.end()) return it->second;
  return st_->exteriors.emplace(key, exterior_of(d, opt_)).first->second;
}

const Fingerprint& Pipeline::fingerprint(const Diagram& d) {
  std::string key = render(d);
  auto it = st_->fingerprints.find(key);
  if (it != st_->fingerprints.end()) return it->second;
  return st_->fingerprints.emplace(key, invariant_fingerprint(exterior(d))).first->second;
}

const DiagramPieces& Pipeline::pieces(const Diagram& d) {
  std::string key = render(d);
  auto it = st_->pieces.find(key);
  if (it != st_->pieces.end()) return it->second;
  DiagramPieces out;
  DecoratedGraph g = underlying_graph(d);
  if (component_count(g) <= 1) {
    if (!g.vertices.empty()) {
      out.pieces.push_back(d);
      out.graphs.push_back(g);
    }
  } else {
    PieceSplit s = find_pieces(exterior(d), opt_);
    for (const MarkedExterior& x : s.pieces) {
      out.pieces.push_back(restrict_diagram(d, vertex_ids(x.graph), edge_ids(x.graph)));
      out.graphs.push_back(underlying_graph(out.pieces.back()));
    }
    out.unknownReasons = s.unknownReasons;
  }
  return st_->pieces.emplace(key, std::move(out)).first->second;
}

const BlockTree& Pipeline::block_tree(const Diagram& piece) {
  std::string key = render(piece);
  auto it = st_->trees.find(key);
  if (it != st_->trees.end()) return it->second;

  struct Leaf {
    Diagram d;
    DecoratedGraph g;
    bool certain = true;
  };
  std::vector<Leaf> leaves;
  std::map<std::string, std::string> cutMethod;
  std::vector<std::string> reasons;
  std::function<void(const Diagram&, std::optional<MarkedExterior>)> split = [&](const Diagram& d,
                                                                                 std::optional<MarkedExterior> ext) {
    DecoratedGraph g = underlying_graph(d);
    std::set<std::string> cuts = abstract_cut_vertices(g);
    if (g.edges.empty() || is_one_edge(g) || cuts.empty()) {
      leaves.push_back({d, g, true});
      return;
    }
    if (opt_.diagramSplits)
      for (const std::string& v : cuts)
        if (auto sides = drawn_cut(d, v)) {
          cutMethod[v] = "diagram";
          for (const auto& side : *sides) {
            std::set<std::string> vs = ends_of(g, side);
            vs.insert(v);
            split(restrict_diagram(d, vs, side), std::nullopt);
          }
          return;
        }
    const MarkedExterior& me = ext ? *ext : exterior(d);
    std::vector<int> regions;
    for (const std::string& v : cuts) {
      regions.push_back(me.region_of_vertex(v));
      for (const auto& e : me.graph.edges)
        if (e.u == v || e.v == v) regions.push_back(me.region_of_edge(e.id));
    }
    SurfaceSearch s = find_clean_reducing_disc(me, opt_.enumeration, regions);
    if (s.status == SurfaceSearch::Status::Found) {
      try {
        DiscSplit ds = split_along_disc(me, *s.surface);
        cutMethod[ds.vertex] = "disc";
        for (const MarkedExterior* side : {&ds.first, &ds.second})
          split(restrict_diagram(d, vertex_ids(side->graph), edge_ids(side->graph)), *side);
        return;
      } catch (const Error& e) {
        reasons.push_back(std::string("disc split refused: ") + e.what());
      }
    } else {
      reasons.push_back("disc search: " + s.reason);
    }
    leaves.push_back({d, g, false});
  };
  split(piece, std::nullopt);

  std::sort(leaves.begin(), leaves.end(), [](const Leaf& a, const Leaf& b) {
    return std::make_pair(edge_ids(a.g), a.g.vertices) < std::make_pair(edge_ids(b.g), b.g.vertices);
  });
  BlockTree t;
  std::map<std::string, std::vector<std::string>> blocksAt;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    std::string id = "B" + std::to_string(k + 1);
    t.skeleton.iNodes.push_back(id);
    t.blockDiagrams[id] = leaves[k].d;
    t.blockGraphs[id] = leaves[k].g;
    t.blockPoints[id] = {};
    if (!leaves[k].certain) t.uncertainBlocks.push_back(id);
    for (const auto& v : leaves[k].g.vertices) blocksAt[v].push_back(id);
  }
  for (const auto& [v, bs] : blocksAt) {
    if (bs.size() < 2) continue;
    std::string j = "J:" + v;
    t.skeleton.jNodes.push_back(j);
    t.cutMethod[j] = cutMethod.count(v) ? cutMethod[v] : "disc";
    for (const auto& b : bs) t.skeleton.links.push_back({b + "@" + v, b, j, v});
  }
  std::sort(t.skeleton.links.begin(), t.skeleton.links.end(),
            [](const TreeSkeleton::Link& a, const TreeSkeleton::Link& b) { return a.id < b.id; });
  for (const auto& l : t.skeleton.links) t.blockPoints[l.i].push_back(l.v);
  t.unknownReasons = reasons;
  t.skeleton.validate(t.blockGraphs);
  return st_->trees.emplace(key, std::move(t)).first->second;
}

Verdict Pipeline::compare_blocks_pointed(const Diagram& b1, const std::vector<std::string>& pts1, const Diagram& b2,
                                         const std::vector<std::string>& pts2) {
  Verdict out;
  if (!(diagram_decoration_type(b1) == diagram_decoration_type(b2)))
    throw Error(ErrorCode::DecorationMismatch, "blocks carry different decoration types");
  if (pts1.size() != pts2.size()) throw Error(ErrorCode::Usage, "point lists differ in length");
  DecoratedGraph g1 = underlying_graph(b1), g2 = underlying_graph(b2);
  auto blockMatch = [&](const std::string& method, const GraphIso& iso) {
    BlockMatch m;
    m.pointsA = pts1;
    m.pointsB = pts2;
    m.method = method;
    m.iso = iso;
    return m;
  };
  if ((is_one_edge(g1) && is_one_edge(g2)) || (is_point(g1) && is_point(g2))) {
    std::map<std::string, std::string> pinned;
    for (std::size_t k = 0; k < pts1.size(); ++k) pinned[pts1[k]] = pts2[k];
    auto isos = iso_search(g1, g2, pinned, 1);
    if (!isos.empty()) {
      out.kind = VerdictKind::Isomorphic;
      out.witness = Witness{"block", {}, {PieceMatch{0, 0, {}, {blockMatch("graph", isos[0])}}}};
    } else {
      out.kind = VerdictKind::NotIsomorphic;
      Obstruction o;
      o.kind = "block-pair";
      o.detail = "graph";
      o.pointsA = pts1;
      o.pointsB = pts2;
      out.obstruction = o;
    }
    return out;
  }
  unsigned n = point_modulus(b1, b2);
  Pointed p1 = pointed(b1, pts1, n), p2 = pointed(b2, pts2, n);
  std::string key = p1.canon.code + "|" + p2.canon.code;
  auto it = st_->blocks.find(key);
  if (it == st_->blocks.end()) {
    State::BlockResult r;
    if (p1.canon.code == p2.canon.code) {
      GraphIso id;
      for (const auto& [v, cv] : p1.canon.vertexMap) id.vertexMap[cv] = cv;
      for (const auto& [e, ce] : p1.canon.edgeMap) id.edgeMap[ce] = ce;
      r.kind = VerdictKind::Isomorphic;
      r.method = "diagram";
      r.canonIso = id;
    } else if (st_->out_of_time()) {
      r.reason = "wall-clock budget exhausted";
    } else {
      const Fingerprint& f1 = fingerprint(p1.canon.diagram);
      const Fingerprint& f2 = fingerprint(p2.canon.diagram);
      if (!(f1 == f2)) {
        r.kind = VerdictKind::NotIsomorphic;
        r.obstruction = fingerprint_obstruction(f1, f2);
      } else {
        const MarkedExterior& x1 = exterior(p1.canon.diagram);
        const MarkedExterior& x2 = exterior(p2.canon.diagram);
        std::vector<long> c1 = label_classes(x1), c2 = label_classes(x2);
        std::vector<std::pair<MarkedExterior, std::string>> ys1, ys2;
        for (std::size_t k = 0; k <= opt_.witnessAttempts && r.kind == VerdictKind::Unknown; ++k) {
          std::uint64_t seed = k == 0 ? 0 : opt_.seed + k;
          ys1.push_back({resimplified(x1, opt_, seed), ""});
          ys2.push_back({resimplified(x2, opt_, seed), ""});
          ys1.back().second = iso_signature(ys1.back().first.manifold, c1);
          ys2.back().second = iso_signature(ys2.back().first.manifold, c2);
          auto attempt = [&](std::size_t a, std::size_t b) {
            if (ys1[a].second != ys2[b].second) return false;
            auto tri = find_isomorphism(ys1[a].first.manifold, ys2[b].first.manifold, c1, c2);
            if (!tri) return false;
            auto gi = induced_iso(ys1[a].first, ys2[b].first, *tri);
            if (!gi || !graph_iso_holds(*gi, ys1[a].first.graph, ys2[b].first.graph)) return false;
            r.kind = VerdictKind::Isomorphic;
            r.method = "exterior";
            r.canonIso = *gi;
            r.tri = tri;
            r.seedA = a == 0 ? 0 : opt_.seed + a;
            r.seedB = b == 0 ? 0 : opt_.seed + b;
            return true;
          };
          for (std::size_t a = 0; a <= k && r.kind == VerdictKind::Unknown; ++a)
            if (!attempt(a, k) && a != k) attempt(k, a);
          if (st_->out_of_time()) break;
        }
        if (r.kind == VerdictKind::Unknown) r.reason = "no combinatorial witness within the re-simplification budget";
      }
    }
    it = st_->blocks.emplace(key, r).first;
  }
  const State::BlockResult& r = it->second;
  out.kind = r.kind;
  if (r.kind == VerdictKind::Isomorphic) {
    BlockMatch m = blockMatch(r.method, through(p1.canon, p2.canon, r.canonIso));
    m.tri = r.tri;
    m.seedA = r.seedA;
    m.seedB = r.seedB;
    out.witness = Witness{"block", {}, {PieceMatch{0, 0, {}, {m}}}};
  } else if (r.kind == VerdictKind::NotIsomorphic) {
    Obstruction o = r.obstruction;
    o.kind = "block-pair";
    o.detail = "fingerprint";
    o.pointsA = pts1;
    o.pointsB = pts2;
    out.obstruction = o;
  } else {
    out.unknownReasons.push_back(r.reason);
  }
  return out;
}

Verdict Pipeline::compare_pieces(const Diagram& p1, const Diagram& p2) {
  Verdict out;
  if (!(diagram_decoration_type(p1) == diagram_decoration_type(p2)))
    throw Error(ErrorCode::DecorationMismatch, "pieces carry different decoration types");
  DecoratedGraph g1 = underlying_graph(p1), g2 = underlying_graph(p2);
  if (is_point(g1) || is_point(g2)) {
    auto isos = iso_search(g1, g2, {}, 1);
    if (!isos.empty()) {
      out.kind = VerdictKind::Isomorphic;
      BlockMatch m;
      m.method = "graph";
      m.iso = isos[0];
      out.witness = Witness{"pieces", {}, {PieceMatch{0, 0, {}, {m}}}};
    } else {
      out.kind = VerdictKind::NotIsomorphic;
      Obstruction o;
      o.kind = "block-pair";
      o.detail = "graph";
      out.obstruction = o;
    }
    return out;
  }
  const Fingerprint& f1 = fingerprint(p1);
  const Fingerprint& f2 = fingerprint(p2);
  if (!(f1 == f2)) {
    out.kind = VerdictKind::NotIsomorphic;
    out.obstruction = fingerprint_obstruction(f1, f2);
    return out;
  }
  const BlockTree& t1 = block_tree(p1);
  const BlockTree& t2 = block_tree(p2);
  bool certain = t1.certain() && t2.certain();
  auto uncertainty = [&] {
    for (const auto& r : t1.unknownReasons) out.unknownReasons.push_back("block tree A: " + r);
    for (const auto& r : t2.unknownReasons) out.unknownReasons.push_back("block tree B: " + r);
  };
  std::vector<SkeletonIso> isos = skeleton_isos(t1.skeleton, t2.skeleton);
  if (isos.empty()) {
    if (certain) {
      out.kind = VerdictKind::NotIsomorphic;
      Obstruction o;
      o.kind = "block-tree";
      o.detail = std::to_string(t1.skeleton.iNodes.size()) + " blocks / " + std::to_string(t1.skeleton.jNodes.size()) +
                 " cut vertices vs " + std::to_string(t2.skeleton.iNodes.size()) + " blocks / " +
                 std::to_string(t2.skeleton.jNodes.size()) + " cut vertices";
      out.obstruction = o;
    } else {
      uncertainty();
    }
    return out;
  }
  auto linkById = [](const BlockTree& t) {
    std::map<std::string, const TreeSkeleton::Link*> m;
    for (const auto& l : t.skeleton.links) m[l.id] = &l;
    return m;
  };
  auto links2 = linkById(t2);
  bool allDefinite = true;
  Obstruction all;
  all.kind = "blocks";
  for (const SkeletonIso& f : isos) {
    if (st_->out_of_time()) {
      out.unknownReasons.push_back("wall-clock budget exhausted");
      return out;
    }
    PieceMatch pm;
    pm.skeletonIso = f;
    bool allIso = true, failed = false;
    for (const std::string& i : t1.skeleton.iNodes) {
      const std::string& j = f.nodeMap.at(i);
      std::vector<std::string> pts2;
      for (const auto& l : t1.skeleton.links)
        if (l.i == i) pts2.push_back(links2.at(f.linkMap.at(l.id))->v);
      Verdict b = compare_blocks_pointed(t1.blockDiagrams.at(i), t1.blockPoints.at(i), t2.blockDiagrams.at(j), pts2);
      if (b.kind == VerdictKind::Isomorphic) {
        BlockMatch m = b.witness->pieces[0].blocks[0];
        m.blockA = i;
        m.blockB = j;
        pm.blocks.push_back(m);
        continue;
      }
      allIso = false;
      if (b.kind == VerdictKind::NotIsomorphic) {
        Obstruction o = *b.obstruction;
        o.blockA = i;
        o.blockB = j;
        all.parts.push_back(o);
        failed = true;
        break;
      }
      for (const auto& r : b.unknownReasons) out.unknownReasons.push_back("block " + i + " vs " + j + ": " + r);
    }
    if (allIso) {
      out.kind = VerdictKind::Isomorphic;
      out.unknownReasons.clear();
      out.witness = Witness{"pieces", {}, {pm}};
      return out;
    }
    if (!failed) allDefinite = false;
  }
  if (allDefinite && certain) {
    out.kind = VerdictKind::NotIsomorphic;
    all.detail = std::to_string(isos.size()) + " skeleton isomorphisms, each with a non-isomorphic block pair";
    out.obstruction = all;
    out.unknownReasons.clear();
    return out;
  }
  if (!certain) uncertainty();
  std::sort(out.unknownReasons.begin(), out.unknownReasons.end());
  out.unknownReasons.erase(std::unique(out.unknownReasons.begin(), out.unknownReasons.end()), out.unknownReasons.end());
  return out;
}

Verdict Pipeline::compare_graphs(const Diagram& a, const Diagram& b) {
  auto start = std::chrono::steady_clock::now();
  st_->deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(opt_.wallSeconds));
  st_->timed = true;
  auto finish = [&](Verdict v) {
    v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    st_->timed = false;
    return v;
  };
  if (!(diagram_decoration_type(a) == diagram_decoration_type(b)))
    throw Error(ErrorCode::DecorationMismatch, "diagrams carry different decoration types");
  Verdict out;
  DecoratedGraph g1 = underlying_graph(a), g2 = underlying_graph(b);
  if (is_tree(g1) && is_tree(g2)) {
    auto isos = iso_search(g1, g2, {}, 1);
    if (!isos.empty()) {
      out.kind = VerdictKind::Isomorphic;
      out.witness = Witness{"tree", isos[0], {}};
    } else {
      out.kind = VerdictKind::NotIsomorphic;
      out.obstruction = Obstruction{};
      out.obstruction->kind = "tree";
      out.obstruction->detail = "decorated trees are not isomorphic";
    }
    return finish(out);
  }
  if (g1.vertices.empty() && g2.vertices.empty()) {
    out.kind = VerdictKind::Isomorphic;
    out.witness = Witness{"pieces", {}, {}};
    return finish(out);
  }
  const DiagramPieces& P = pieces(a);
  const DiagramPieces& Q = pieces(b);
  bool certain = P.certain() && Q.certain();
  if (P.pieces.size() != Q.pieces.size()) {
    if (certain) {
      out.kind = VerdictKind::NotIsomorphic;
      Obstruction o;
      o.kind = "piece-count";
      o.detail = std::to_string(P.pieces.size()) + " vs " + std::to_string(Q.pieces.size());
      out.obstruction = o;
    } else {
      for (const auto& r : P.unknownReasons) out.unknownReasons.push_back("pieces A: " + r);
      for (const auto& r : Q.unknownReasons) out.unknownReasons.push_back("pieces B: " + r);
    }
    return finish(out);
  }
  const std::size_t n = P.pieces.size();
  std::vector<std::vector<Verdict>> V(n, std::vector<Verdict>(n));
  std::vector<std::vector<int>> isoAdj(n), maybeAdj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      V[i][j] = compare_pieces(P.pieces[i], Q.pieces[j]);
      if (V[i][j].kind == VerdictKind::Isomorphic) isoAdj[i].push_back(static_cast<int>(j));
      if (V[i][j].kind != VerdictKind::NotIsomorphic) maybeAdj[i].push_back(static_cast<int>(j));
    }
  std::vector<int> m = max_matching(n, isoAdj);
  if (std::count(m.begin(), m.end(), -1) == 0) {
    out.kind = VerdictKind::Isomorphic;
    Witness w;
    w.method = "pieces";
    for (std::size_t i = 0; i < n; ++i) {
      PieceMatch pm = V[i][m[i]].witness->pieces[0];
      pm.pieceA = i;
      pm.pieceB = static_cast<std::size_t>(m[i]);
      w.pieces.push_back(pm);
    }
    out.witness = w;
    return finish(out);
  }
  std::vector<int> mm = max_matching(n, maybeAdj);
  if (std::count(mm.begin(), mm.end(), -1) > 0 && certain) {
    auto [S, N] = hall_violator(maybeAdj, mm);
    Obstruction o;
    o.kind = "hall";
    o.hallSet = S;
    o.hallImage = N;
    o.detail = std::to_string(S.size()) + " pieces can only match " + std::to_string(N.size());
    for (std::size_t s : S)
      for (std::size_t t = 0; t < n; ++t) {
        if (std::find(N.begin(), N.end(), t) != N.end()) continue;
        Obstruction part = *V[s][t].obstruction;
        part.pieceA = static_cast<int>(s);
        part.pieceB = static_cast<int>(t);
        o.parts.push_back(part);
      }
    out.kind = VerdictKind::NotIsomorphic;
    out.obstruction = o;
    return finish(out);
  }
  for (const auto& r : P.unknownReasons) out.unknownReasons.push_back("pieces A: " + r);
  for (const auto& r : Q.unknownReasons) out.unknownReasons.push_back("pieces B: " + r);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& r : V[i][j].unknownReasons)
        out.unknownReasons.push_back("piece " + std::to_string(i) + " vs " + std::to_string(j) + ": " + r);
  if (out.unknownReasons.empty()) out.unknownReasons.push_back("no isomorphic perfect matching of pieces");
  return finish(out);
}

Verdict compare_blocks_pointed(const Diagram& b1, const std::vector<std::string>& pts1, const Diagram& b2,
                               const std::vector<std::string>& pts2, const PipelineOptions& opt) {
  Pipeline p(opt);
  return p.compare_blocks_pointed(b1, pts1, b2, pts2);
}

Verdict compare_pieces(const Diagram& p1, const Diagram& p2, const PipelineOptions& opt) {
  Pipeline p(opt);
  return p.compare_pieces(p1, p2);
}

Verdict compare_graphs(const Diagram& a, const Diagram& b, const PipelineOptions& opt) {
  Pipeline p(opt);
  return p.compare_graphs(a, b);
}

const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Isomorphic:
      return "Isomorphic";
    case VerdictKind::NotIsomorphic:
      return "NotIsomorphic";
    case VerdictKind::Unknown:
      return "Unknown";
  }
  return "?";
}

// ----------------------------------------------------------------- replay

namespace {

class Replayer {
 public:
  Replayer(const PipelineOptions& opt, std::string* why) : opt_(opt), p_(opt), why_(why) {}

  bool fail(const std::string& w) {
    if (why_ && why_->empty()) *why_ = w;
    return false;
  }

  Fingerprint fresh_fingerprint(const Diagram& d) { return invariant_fingerprint(exterior_of(d, opt_)); }

  bool block_match(const Diagram& d1, const Diagram& d2, const BlockMatch& m) {
    DecoratedGraph g1 = underlying_graph(d1), g2 = underlying_graph(d2);
    if (!pins_hold(m.iso, m.pointsA, m.pointsB)) return fail("block " + m.blockA + ": points not respected");
    if (!graph_iso_holds(m.iso, g1, g2)) return fail("block " + m.blockA + ": graph map is not an isomorphism");
    if (m.method == "graph") {
      if ((is_one_edge(g1) && is_one_edge(g2)) || (is_point(g1) && is_point(g2))) return true;
      return fail("block " + m.blockA + ": graph witness on a block with topology");
    }
    unsigned n = point_modulus(d1, d2);
    Pointed p1 = pointed(d1, m.pointsA, n), p2 = pointed(d2, m.pointsB, n);
    if (m.method == "diagram") {
      if (p1.canon.code != p2.canon.code) return fail("block " + m.blockA + ": diagram codes differ");
      GraphIso c = to_canonical(p1.canon, p2.canon, m.iso);
      for (const auto& [v, w] : c.vertexMap)
        if (v != w) return fail("block " + m.blockA + ": map is not the diagram relabelling");
      for (const auto& [e, f] : c.edgeMap)
        if (e != f) return fail("block " + m.blockA + ": map is not the diagram relabelling");
      return true;
    }
    if (m.method == "exterior") {
      if (!m.tri) return fail("block " + m.blockA + ": missing triangulation map");
      MarkedExterior y1 = resimplified(exterior_of(p1.canon.diagram, opt_), opt_, m.seedA);
      MarkedExterior y2 = resimplified(exterior_of(p2.canon.diagram, opt_), opt_, m.seedB);
      if (!check_isomorphism(y1.manifold, y2.manifold, *m.tri, label_classes(y1), label_classes(y2)))
        return fail("block " + m.blockA + ": triangulation map does not check");
      auto gi = induced_iso(y1, y2, *m.tri);
      if (!gi || !(*gi == to_canonical(p1.canon, p2.canon, m.iso)))
        return fail("block " + m.blockA + ": region map disagrees with the graph map");
      return true;
    }
    return fail("unknown block method " + m.method);
  }

  bool skeleton_iso(const BlockTree& t1, const BlockTree& t2, const SkeletonIso& f) {
    std::set<std::string> imgI, imgJ, imgL;
    for (const auto& i : t1.skeleton.iNodes) {
      auto it = f.nodeMap.find(i);
      if (it == f.nodeMap.end() || !t2.blockGraphs.count(it->second)) return fail("skeleton map misses " + i);
      imgI.insert(it->second);
    }
    for (const auto& j : t1.skeleton.jNodes) {
      auto it = f.nodeMap.find(j);
      if (it == f.nodeMap.end()) return fail("skeleton map misses " + j);
      imgJ.insert(it->second);
    }
    if (imgI.size() != t2.skeleton.iNodes.size() || imgJ != std::set<std::string>(t2.skeleton.jNodes.begin(),
                                                                                 t2.skeleton.jNodes.end()))
      return fail("skeleton map is not a bijection");
    std::map<std::string, const TreeSkeleton::Link*> l2;
    for (const auto& l : t2.skeleton.links) l2[l.id] = &l;
    for (const auto& l : t1.skeleton.links) {
      auto it = f.linkMap.find(l.id);
      if (it == f.linkMap.end() || !l2.count(it->second)) return fail("skeleton map misses link " + l.id);
      const auto* m = l2[it->second];
      if (m->i != f.nodeMap.at(l.i) || m->j != f.nodeMap.at(l.j)) return fail("skeleton map breaks link " + l.id);
      imgL.insert(it->second);
    }
    if (imgL.size() != t2.skeleton.links.size()) return fail("link map is not a bijection");
    return true;
  }

  bool piece_match(const Diagram& d1, const Diagram& d2, const PieceMatch& pm) {
    DecoratedGraph g1 = underlying_graph(d1), g2 = underlying_graph(d2);
    if (is_point(g1) || is_point(g2)) {
      if (pm.blocks.size() != 1 || pm.blocks[0].method != "graph") return fail("point piece without a graph map");
      return graph_iso_holds(pm.blocks[0].iso, g1, g2) || fail("point pieces differ");
    }
    const BlockTree& t1 = p_.block_tree(d1);
    const BlockTree& t2 = p_.block_tree(d2);
    if (!skeleton_iso(t1, t2, pm.skeletonIso)) return false;
    if (pm.blocks.size() != t1.skeleton.iNodes.size()) return fail("not every block is matched");
    std::map<std::string, const TreeSkeleton::Link*> l2;
    for (const auto& l : t2.skeleton.links) l2[l.id] = &l;
    std::set<std::string> seen;
    for (const BlockMatch& m : pm.blocks) {
      if (!t1.blockDiagrams.count(m.blockA) || !seen.insert(m.blockA).second) return fail("bad block " + m.blockA);
      if (pm.skeletonIso.nodeMap.at(m.blockA) != m.blockB) return fail("block map disagrees with the skeleton map");
      if (m.pointsA != t1.blockPoints.at(m.blockA)) return fail("points of " + m.blockA + " are not canonical");
      std::vector<std::string> want;
      for (const auto& l : t1.skeleton.links)
        if (l.i == m.blockA) want.push_back(l2.at(pm.skeletonIso.linkMap.at(l.id))->v);
      if (m.pointsB != want) return fail("points of " + m.blockB + " do not follow the skeleton map");
      if (!block_match(t1.blockDiagrams.at(m.blockA), t2.blockDiagrams.at(m.blockB), m)) return false;
    }
    return true;
  }

  bool witness(const Diagram& a, const Diagram& b, const Witness& w) {
    if (w.method == "tree") {
      DecoratedGraph g1 = underlying_graph(a), g2 = underlying_graph(b);
      if (!is_tree(g1) || !is_tree(g2)) return fail("tree witness for a graph that is not a tree");
      return graph_iso_holds(w.treeIso, g1, g2) || fail("tree map is not an isomorphism");
    }
    if (w.method != "pieces") return fail("unknown witness method " + w.method);
    const DiagramPieces& P = p_.pieces(a);
    const DiagramPieces& Q = p_.pieces(b);
    if (P.pieces.size() != Q.pieces.size() || w.pieces.size() != P.pieces.size())
      return fail("piece matching is not a bijection");
    std::set<std::size_t> left, right;
    for (const PieceMatch& pm : w.pieces) {
      if (pm.pieceA >= P.pieces.size() || pm.pieceB >= Q.pieces.size()) return fail("piece index out of range");
      left.insert(pm.pieceA);
      right.insert(pm.pieceB);
      if (!piece_match(P.pieces[pm.pieceA], Q.pieces[pm.pieceB], pm)) return false;
    }
    if (left.size() != P.pieces.size() || right.size() != Q.pieces.size())
      return fail("piece matching is not a bijection");
    return true;
  }

  bool block_pair(const Diagram& d1, const Diagram& d2, const Obstruction& o) {
    DecoratedGraph g1 = underlying_graph(d1), g2 = underlying_graph(d2);
    if (o.detail == "graph") {
      bool small = (is_one_edge(g1) && is_one_edge(g2)) || is_point(g1) || is_point(g2);
      if (!small) return fail("graph obstruction on blocks with topology");
      std::map<std::string, std::string> pinned;
      for (std::size_t k = 0; k < o.pointsA.size() && k < o.pointsB.size(); ++k) pinned[o.pointsA[k]] = o.pointsB[k];
      return iso_search(g1, g2, pinned, 1).empty() || fail("graphs are isomorphic after all");
    }
    unsigned n = point_modulus(d1, d2);
    Pointed p1 = pointed(d1, o.pointsA, n), p2 = pointed(d2, o.pointsB, n);
    Fingerprint f1 = fresh_fingerprint(p1.canon.diagram), f2 = fresh_fingerprint(p2.canon.diagram);
    if (o.entry.empty() || f1.entry(o.entry) == f2.entry(o.entry)) return fail("fingerprint entry agrees");
    return true;
  }

  bool piece_pair(const Diagram& d1, const Diagram& d2, const Obstruction& o) {
    if (o.kind == "fingerprint") {
      Fingerprint f1 = fresh_fingerprint(d1), f2 = fresh_fingerprint(d2);
      return (!o.entry.empty() && f1.entry(o.entry) != f2.entry(o.entry)) || fail("fingerprint entry agrees");
    }
    if (o.kind == "block-pair") return block_pair(d1, d2, o);
    const BlockTree& t1 = p_.block_tree(d1);
    const BlockTree& t2 = p_.block_tree(d2);
    if (!t1.certain() || !t2.certain()) return fail("block trees are not certain");
    std::vector<SkeletonIso> isos = skeleton_isos(t1.skeleton, t2.skeleton);
    if (o.kind == "block-tree") return isos.empty() || fail("skeletons are isomorphic");
    if (o.kind != "blocks") return fail("unknown piece obstruction " + o.kind);
    if (isos.size() != o.parts.size()) return fail("obstruction does not cover every skeleton isomorphism");
    std::map<std::string, const TreeSkeleton::Link*> l2;
    for (const auto& l : t2.skeleton.links) l2[l.id] = &l;
    for (std::size_t k = 0; k < isos.size(); ++k) {
      const Obstruction& part = o.parts[k];
      if (!t1.blockDiagrams.count(part.blockA) || isos[k].nodeMap.at(part.blockA) != part.blockB)
        return fail("block pair does not follow skeleton isomorphism " + std::to_string(k));
      std::vector<std::string> want;
      for (const auto& l : t1.skeleton.links)
        if (l.i == part.blockA) want.push_back(l2.at(isos[k].linkMap.at(l.id))->v);
      if (part.pointsA != t1.blockPoints.at(part.blockA) || part.pointsB != want)
        return fail("block pair points do not follow the skeleton map");
      if (!block_pair(t1.blockDiagrams.at(part.blockA), t2.blockDiagrams.at(part.blockB), part)) return false;
    }
    return true;
  }

  bool obstruction(const Diagram& a, const Diagram& b, const Obstruction& o) {
    if (o.kind == "tree") {
      DecoratedGraph g1 = underlying_graph(a), g2 = underlying_graph(b);
      return (is_tree(g1) && is_tree(g2) && iso_search(g1, g2, {}, 1).empty()) || fail("trees are isomorphic");
    }
    if (o.kind != "piece-count" && o.kind != "hall") return piece_pair(a, b, o);
    const DiagramPieces& P = p_.pieces(a);
    const DiagramPieces& Q = p_.pieces(b);
    if (!P.certain() || !Q.certain()) return fail("piece decompositions are not certain");
    if (o.kind == "piece-count") return P.pieces.size() != Q.pieces.size() || fail("piece counts agree");
    if (o.kind != "hall") return fail("unknown obstruction " + o.kind);
    const std::size_t n = P.pieces.size();
    if (Q.pieces.size() != n || o.hallImage.size() >= o.hallSet.size()) return fail("not a Hall violation");
    for (std::size_t s : o.hallSet)
      for (std::size_t t = 0; t < n; ++t) {
        if (std::find(o.hallImage.begin(), o.hallImage.end(), t) != o.hallImage.end()) continue;
        auto it = std::find_if(o.parts.begin(), o.parts.end(), [&](const Obstruction& x) {
          return x.pieceA == static_cast<int>(s) && x.pieceB == static_cast<int>(t);
        });
        if (it == o.parts.end()) return fail("Hall set misses a piece pair");
        if (s >= n || !piece_pair(P.pieces[s], Q.pieces[t], *it)) return false;
      }
    return true;
  }

 private:
  PipelineOptions opt_;
  Pipeline p_;
  std::string* why_;
};

json iso_json(const GraphIso& iso) { return {{"vertices", iso.vertexMap}, {"edges", iso.edgeMap}}; }

json obstruction_json(const Obstruction& o) {
  json j{{"kind", o.kind}, {"detail", o.detail}};
  if (!o.entry.empty()) j["entry"] = o.entry;
  if (o.pieceA >= 0) j["pieces"] = {o.pieceA, o.pieceB};
  if (!o.blockA.empty()) j["blocks"] = {o.blockA, o.blockB};
  if (!o.pointsA.empty()) j["points"] = {o.pointsA, o.pointsB};
  if (!o.hallSet.empty()) j["hall"] = {{"set", o.hallSet}, {"image", o.hallImage}};
  if (!o.parts.empty()) {
    j["parts"] = json::array();
    for (const auto& p : o.parts) j["parts"].push_back(obstruction_json(p));
  }
  return j;
}

}  // namespace

bool replay_verdict(const Diagram& a, const Diagram& b, const Verdict& v, const PipelineOptions& opt, std::string* why) {
  Replayer r(opt, why);
  switch (v.kind) {
    case VerdictKind::Unknown:
      return true;
    case VerdictKind::Isomorphic:
      return v.witness ? r.witness(a, b, *v.witness) : r.fail("Isomorphic without a witness");
    case VerdictKind::NotIsomorphic:
      return v.obstruction ? r.obstruction(a, b, *v.obstruction) : r.fail("NotIsomorphic without an obstruction");
  }
  return false;
}

std::string verdict_to_json(const Verdict& v, const PipelineOptions& opt) {
  json j;
  j["verdict"] = verdict_name(v.kind);
  if (v.witness) {
    json w{{"method", v.witness->method}};
    if (v.witness->method == "tree") w["isomorphism"] = iso_json(v.witness->treeIso);
    w["pieces"] = json::array();
    for (const auto& pm : v.witness->pieces) {
      json p{{"pieceA", pm.pieceA}, {"pieceB", pm.pieceB}};
      p["skeleton"] = {{"nodes", pm.skeletonIso.nodeMap}, {"links", pm.skeletonIso.linkMap}};
      p["blocks"] = json::array();
      for (const auto& m : pm.blocks) {
        json b{{"blockA", m.blockA}, {"blockB", m.blockB}, {"method", m.method}, {"isomorphism", iso_json(m.iso)},
               {"points", {m.pointsA, m.pointsB}}};
        if (m.tri) {
          b["tetrahedra"] = m.tri->tetMap;
          std::vector<std::string> perms;
          for (const auto& p : m.tri->perms) perms.push_back(p.str());
          b["perms"] = perms;
          b["seeds"] = {m.seedA, m.seedB};
        }
        p["blocks"].push_back(b);
      }
      w["pieces"].push_back(p);
    }
    j["witness"] = w;
  }
  if (v.obstruction) j["obstruction"] = obstruction_json(*v.obstruction);
  if (!v.unknownReasons.empty()) j["unknownReasons"] = v.unknownReasons;
  j["budgets"] = {{"rays", opt.enumeration.maxRays},
                  {"pairs", opt.enumeration.maxPairs},
                  {"enumerationWall", opt.enumeration.wallSeconds},
                  {"moves", opt.simplifyMoves},
                  {"witnessAttempts", opt.witnessAttempts},
                  {"wall", opt.wallSeconds},
                  {"seed", opt.seed}};
  j["timings"] = {{"seconds", v.seconds}};
  return j.dump();
}

}  // namespace sgk
