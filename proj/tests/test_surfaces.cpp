#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "dd_oracle.hpp"
#include "json.hpp"
#include "sgk/compile.hpp"
#include "sgk/surfaces.hpp"

using namespace sgk;

namespace {

Diagram corpus(const std::string& name) { return parse_file(std::string(SGK_CORPUS_DIR) + "/" + name + ".sgd"); }

MarkedExterior exterior(const Diagram& d, bool simplify = true) {
  CompiledGraph c = compile_to_sphere(d);
  ExteriorOptions o;
  o.simplify = simplify;
  return build_exterior(c.sphere, c.graph, c.metadata, o);
}

Diagram split_union(const std::string& a, const std::string& b) {
  return disjoint_union(corpus(a), relabel_prefix(corpus(b), "z."));
}

MarkedExterior bare(const Triangulation& t) {
  MarkedExterior me;
  me.manifold = t;
  return me;
}

std::vector<int> cut_vertex_regions(const MarkedExterior& me) {
  std::vector<int> out;
  for (const std::string& v : abstract_cut_vertices(me.graph)) {
    out.push_back(me.region_of_vertex(v));
    for (const auto& e : me.graph.edges)
      if (e.u == v || e.v == v) out.push_back(me.region_of_edge(e.id));
  }
  return out;
}

bool is_one_edge_ball(const MarkedExterior& me) {
  return me.graph.vertices.size() == 2 && me.graph.edges.size() == 1 && check_exterior(me).empty() &&
         certify_ball(me.manifold);
}

HomologyGroup h1(const MarkedExterior& me) { return homology(me.manifold).groups[1]; }

int interior_faces(const Triangulation& t) {
  int n = 0;
  for (const auto& a : t.adj)
    for (const auto& g : a) n += !g.boundary();
  return n / 2;
}

NormalCoordinates vertex_link(const Triangulation& t, int vertexClass) {
  Skeleton s = skeleton(t);
  NormalCoordinates nc;
  nc.v.assign(7 * t.size(), 0);
  for (std::size_t a = 0; a < t.size(); ++a)
    for (int v = 0; v < 4; ++v)
      if (s.tetVertex[a][v] == vertexClass) nc.v[7 * a + v] = 1;
  return nc;
}

// Shuffles tetrahedra and their vertex orders; returns the map on coordinates.
Triangulation shuffled(const Triangulation& t, std::mt19937& rng, std::vector<int>& coordMap) {
  const int n = static_cast<int>(t.size());
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::shuffle(sigma.begin(), sigma.end(), rng);
  std::vector<std::array<int, 4>> pi(n);
  for (auto& p : pi) {
    p = {0, 1, 2, 3};
    std::shuffle(p.begin(), p.end(), rng);
  }
  Triangulation o;
  for (int i = 0; i < n; ++i) o.add_tet();
  for (int a = 0; a < n; ++a)
    for (int f = 0; f < 4; ++f) {
      const Gluing& g = t.adj[a][f];
      if (g.boundary()) continue;
      std::array<int, 4> img{};
      for (int v = 0; v < 4; ++v) img[pi[a][v]] = pi[g.tet][g.perm[v]];
      o.adj[sigma[a]][pi[a][f]] = {sigma[g.tet], Perm4(img[0], img[1], img[2], img[3])};
    }
  coordMap.assign(7 * n, 0);
  for (int a = 0; a < n; ++a) {
    for (int v = 0; v < 4; ++v) coordMap[7 * a + v] = 7 * sigma[a] + pi[a][v];
    for (int k = 0; k < 3; ++k) coordMap[7 * a + 4 + k] = 7 * sigma[a] + 4 + quad_type(pi[a][0], pi[a][k + 1]);
  }
  return o;
}

}  // namespace

TEST(Matching, FreeTetrahedron) {
  MatchingSystem m = matching_system(bare(single_tet()));
  EXPECT_EQ(m.unknowns, 7u);
  EXPECT_TRUE(m.equations.empty());
}

TEST(Matching, TwoTetSphereHasTwelveEquations) {
  EXPECT_EQ(matching_system(two_tet_sphere()).equations.size(), 12u);
}

TEST(Matching, ThreeEquationsPerInteriorFace) {
  for (const char* name : {"unknot-loop", "one-edge", "fig3-hopf"}) {
    MarkedExterior me = exterior(corpus(name));
    EXPECT_EQ(matching_system(me).equations.size(), 3u * interior_faces(me.manifold)) << name;
  }
}

TEST(Enumeration, FreeTetrahedronGivesUnitVectors) {
  Enumeration e = vertex_normal_surfaces(bare(single_tet()), false);
  ASSERT_TRUE(e.complete);
  ASSERT_EQ(e.surfaces.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(std::count(e.surfaces[i].v.begin(), e.surfaces[i].v.end(), 1), 1);
}

TEST(Enumeration, VertexLinksAppearInClosedTriangulations) {
  std::mt19937 rng(3);
  std::vector<Triangulation> closed{two_tet_sphere()};
  while (closed.size() < 8) {
    Triangulation t = oracle::random_gluing(rng, 2 + static_cast<int>(closed.size()) % 3, 0.0);
    if (boundary_surface(t).components.empty()) closed.push_back(t);
  }
  for (const Triangulation& t : closed) {
    Enumeration e = enumerate_vertex_surfaces(t, {});
    ASSERT_TRUE(e.complete);
    Skeleton s = skeleton(t);
    for (int v = 0; v < s.nVertices; ++v)
      EXPECT_TRUE(std::binary_search(e.surfaces.begin(), e.surfaces.end(), vertex_link(t, v)));
  }
}

TEST(Enumeration, TwoTetSphereSolutionsAreSpheres) {
  Triangulation t = two_tet_sphere();
  Enumeration e = enumerate_vertex_surfaces(t, {});
  ASSERT_TRUE(e.complete);
  int links = 0, quads = 0;
  for (const NormalCoordinates& nc : e.surfaces) {
    SurfaceAnalysis a = analyze(bare(t), nc);
    EXPECT_TRUE(a.closed);
    EXPECT_TRUE(a.connected);
    EXPECT_EQ(a.eulerChar, 2);
    bool hasQuad = false;
    for (std::size_t k = 0; k < t.size(); ++k)
      for (int q = 0; q < 3; ++q) hasQuad = hasQuad || nc.quad(k, q) > 0;
    (hasQuad ? quads : links)++;
  }
  EXPECT_EQ(links, skeleton(t).nVertices);
  EXPECT_EQ(quads, 3);
}

TEST(Enumeration, MatchesBruteForceOnSmallFixtures) {
  std::mt19937 rng(11);
  std::vector<std::pair<Triangulation, std::vector<char>>> fixtures{{single_tet(), {}}, {two_tet_sphere(), {}}};
  for (int i = 0; i < 40; ++i) {
    Triangulation t = oracle::random_gluing(rng, 1 + i % 4, i % 5 == 0 ? 0.0 : 0.25);
    fixtures.push_back({t, i % 3 == 0 ? zero_on_boundary(t) : std::vector<char>{}});
  }
  for (const auto& [t, zero] : fixtures) {
    Enumeration e = enumerate_vertex_surfaces(t, zero);
    ASSERT_TRUE(e.complete);
    EXPECT_EQ(e.surfaces, oracle::vertex_surfaces(t, zero)) << write_tri(t);
  }
}

TEST(Enumeration, SolutionsAreAdmissibleMatchingSolutions) {
  auto verify = [](const Triangulation& t, const Enumeration& e) {
    ASSERT_TRUE(e.complete);
    for (const NormalCoordinates& nc : e.surfaces) {
      EXPECT_TRUE(satisfies_matching(t, nc));
      EXPECT_TRUE(is_admissible(nc));
      std::int64_t g = 0;
      for (auto x : nc.v) g = std::gcd(g, x);
      EXPECT_EQ(g, 1);
    }
  };
  for (const char* name : {"unknot-loop", "flat-path", "directed-loop"}) {
    MarkedExterior me = exterior(corpus(name));
    verify(me.manifold, vertex_normal_surfaces(me, true));
  }
  for (const char* name : {"fig3-hopf", "theta", "fig5"}) {
    MarkedExterior me = exterior(corpus(name));
    verify(me.manifold, enumerate_vertex_surfaces(me.manifold, zero_on_boundary(me.manifold)));
  }
}

TEST(Enumeration, CleanSolutionsAvoidJunctures) {
  MarkedExterior me = exterior(corpus("flat-path"));
  Skeleton s = skeleton(me.manifold);
  for (const NormalCoordinates& nc : vertex_normal_surfaces(me, true).surfaces)
    for (std::size_t a = 0; a < me.manifold.size(); ++a)
      for (int e = 0; e < 6; ++e) {
        if (!s.edgeJuncture[s.tetEdge[a][e]]) continue;
        auto [x, y] = edge_vertices(e);
        EXPECT_EQ(edge_weight(nc, a, x, y), 0);
      }
}

TEST(Enumeration, IndependentOfTetrahedronOrder) {
  std::mt19937 rng(5);
  std::vector<std::pair<Triangulation, std::vector<char>>> fixtures;
  for (const char* name : {"unknot-loop", "flat-path"}) {
    MarkedExterior me = exterior(corpus(name));
    Skeleton s = skeleton(me.manifold);
    std::vector<char> edges(s.nEdges);
    for (int e = 0; e < s.nEdges; ++e) edges[e] = s.edgeJuncture[e];
    fixtures.push_back({me.manifold, zero_on_edges(me.manifold, edges)});
  }
  for (int i = 0; i < 10; ++i) fixtures.push_back({oracle::random_gluing(rng, 2 + i % 3), {}});
  for (const auto& [t, zero] : fixtures) {
    std::vector<int> map;
    Triangulation u = shuffled(t, rng, map);
    std::vector<char> movedZero(zero.empty() ? 0 : zero.size());
    for (std::size_t i = 0; i < zero.size(); ++i) movedZero[map[i]] = zero[i];
    std::vector<NormalCoordinates> moved;
    Enumeration e = enumerate_vertex_surfaces(t, zero);
    ASSERT_TRUE(e.complete);
    for (const NormalCoordinates& nc : e.surfaces) {
      NormalCoordinates m;
      m.v.assign(nc.v.size(), 0);
      for (std::size_t i = 0; i < nc.v.size(); ++i) m.v[map[i]] = nc.v[i];
      moved.push_back(m);
    }
    std::sort(moved.begin(), moved.end());
    EXPECT_EQ(moved, enumerate_vertex_surfaces(u, movedZero).surfaces);
  }
}

TEST(Enumeration, BudgetExhaustionIsReported) {
  MarkedExterior me = exterior(corpus("fig3-hopf"));
  EnumerationBudget tiny;
  tiny.maxRays = 3;
  Enumeration e = vertex_normal_surfaces(me, false, tiny);
  EXPECT_FALSE(e.complete);
  EXPECT_FALSE(e.reason.empty());
  SurfaceSearch s = find_reducing_sphere(exterior(split_union("unknot-loop", "unknot-loop")), tiny);
  EXPECT_EQ(s.status, SurfaceSearch::Status::Unknown);
}

TEST(Analyze, UnitTriangleInFreeTetrahedron) {
  NormalCoordinates nc;
  nc.v = {1, 0, 0, 0, 0, 0, 0};
  SurfaceAnalysis a = analyze(bare(single_tet()), nc);
  EXPECT_EQ(a.eulerChar, 1);
  EXPECT_FALSE(a.closed);
  EXPECT_TRUE(a.connected);
  EXPECT_EQ(a.boundaryCurves.size(), 1u);
}

TEST(Analyze, QuadInFreeTetrahedronIsADisc) {
  NormalCoordinates nc;
  nc.v = {0, 0, 0, 0, 0, 2, 0};
  SurfaceAnalysis a = analyze(bare(single_tet()), nc);
  EXPECT_EQ(a.eulerChar, 2);
  EXPECT_EQ(a.componentCount, 2);
  EXPECT_FALSE(a.connected);
  EXPECT_EQ(a.boundaryCurves.size(), 2u);
}

TEST(Analyze, VertexLinkOfAClosedTriangulation) {
  Triangulation t = compile_to_sphere(corpus("one-edge")).sphere;
  Skeleton s = skeleton(t);
  for (int v = 0; v < s.nVertices; ++v) {
    SurfaceAnalysis a = analyze(bare(t), vertex_link(t, v));
    EXPECT_EQ(a.eulerChar, 2);
    EXPECT_TRUE(a.closed);
    EXPECT_TRUE(a.connected);
  }
}

TEST(Analyze, EulerCharacteristicIsAdditive) {
  MarkedExterior me = exterior(corpus("unknot-loop"));
  auto sols = vertex_normal_surfaces(me, false).surfaces;
  for (std::size_t i = 0; i + 1 < sols.size() && i < 6; ++i) {
    NormalCoordinates sum = sols[i];
    for (std::size_t k = 0; k < sum.v.size(); ++k) sum.v[k] += sols[i + 1].v[k];
    if (!is_admissible(sum)) continue;
    EXPECT_EQ(analyze(me, sum).eulerChar, analyze(me, sols[i]).eulerChar + analyze(me, sols[i + 1]).eulerChar);
  }
}

TEST(ReducingSphere, SplitUnionsHaveOne) {
  for (auto [a, b] : std::vector<std::pair<const char*, const char*>>{
           {"unknot-loop", "unknot-loop"}, {"point", "unknot-loop"}, {"theta", "one-edge"}}) {
    MarkedExterior me = exterior(split_union(a, b));
    SurfaceSearch s = find_reducing_sphere(me);
    ASSERT_EQ(s.status, SurfaceSearch::Status::Found) << a << " " << b;
    SurfaceAnalysis an = analyze(me, *s.surface);
    EXPECT_TRUE(an.closed);
    EXPECT_EQ(an.eulerChar, 2);
    ASSERT_EQ(an.sidePartition.size(), 2u);
    EXPECT_EQ(an.sidePartition[0].size(), 1u);
    EXPECT_EQ(an.sidePartition[1].size(), 1u);
  }
}

TEST(ReducingSphere, HopfAndEmptyHaveNone) {
  EXPECT_EQ(find_reducing_sphere(exterior(corpus("fig3-hopf"))).status, SurfaceSearch::Status::None);
  EXPECT_EQ(find_reducing_sphere(exterior(corpus("empty"))).status, SurfaceSearch::Status::None);
}

TEST(SphereSplit, TwoUnknotsGiveTwoSolidTori) {
  MarkedExterior me = exterior(split_union("unknot-loop", "unknot-loop"));
  auto [a, b] = split_along_sphere(me, *find_reducing_sphere(me).surface);
  for (const MarkedExterior* x : {&a, &b}) {
    EXPECT_TRUE(check_exterior(*x).empty());
    EXPECT_EQ(x->regions.size(), 2u);
    EXPECT_EQ(h1(*x), (HomologyGroup{1, {}}));
    EXPECT_TRUE(is_oriented(x->manifold));
  }
}

TEST(SphereSplit, PointAndLoopGiveBallAndSolidTorus) {
  MarkedExterior me = exterior(split_union("point", "unknot-loop"));
  auto [a, b] = split_along_sphere(me, *find_reducing_sphere(me).surface);
  EXPECT_TRUE(check_exterior(a).empty());
  EXPECT_TRUE(check_exterior(b).empty());
  const MarkedExterior& ball = a.graph.edges.empty() ? a : b;
  const MarkedExterior& torus = a.graph.edges.empty() ? b : a;
  EXPECT_EQ(ball.regions.size(), 1u);
  EXPECT_TRUE(certify_ball(ball.manifold));
  EXPECT_EQ(h1(torus), (HomologyGroup{1, {}}));
}

TEST(SphereSplit, PiecesKeepTheirGraphs) {
  MarkedExterior me = exterior(split_union("theta", "one-edge"));
  auto [a, b] = split_along_sphere(me, *find_reducing_sphere(me).surface);
  EXPECT_EQ(a.graph.vertices.size() + b.graph.vertices.size(), me.graph.vertices.size());
  EXPECT_EQ(a.graph.edges.size() + b.graph.edges.size(), me.graph.edges.size());
  EXPECT_TRUE(check_exterior(a).empty());
  EXPECT_TRUE(check_exterior(b).empty());
}

TEST(SphereSplit, VertexLinkIsRefused) {
  MarkedExterior me = exterior(split_union("unknot-loop", "unknot-loop"), false);
  Skeleton s = skeleton(me.manifold);
  int inner = -1;
  for (int v = 0; v < s.nVertices && inner < 0; ++v)
    if (!s.vertexBoundary[v]) inner = v;
  ASSERT_GE(inner, 0);
  try {
    split_along_sphere(me, vertex_link(me.manifold, inner));
    FAIL() << "vertex link accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotReducing);
  }
}

TEST(ReducingDisc, FlatPathSplitsAtTheMiddleVertex) {
  MarkedExterior me = exterior(corpus("flat-path"));
  SurfaceSearch s = find_clean_reducing_disc(me, {}, cut_vertex_regions(me));
  ASSERT_EQ(s.status, SurfaceSearch::Status::Found);
  DiscSplit d = split_along_disc(me, *s.surface);
  EXPECT_EQ(d.vertex, "v");
  EXPECT_TRUE(is_one_edge_ball(d.first));
  EXPECT_TRUE(is_one_edge_ball(d.second));
  EXPECT_TRUE(d.first.graph.hasVertex("v"));
  EXPECT_TRUE(d.second.graph.hasVertex("v"));
}

TEST(ReducingDisc, WedgeOfLoopsGivesTwoSolidTori) {
  Diagram wedge = vertex_sum(corpus("unknot-loop"), "v", corpus("unknot-loop"), "v");
  MarkedExterior me = exterior(wedge);
  ASSERT_EQ(find_reducing_sphere(me).status, SurfaceSearch::Status::None);
  SurfaceSearch s = find_clean_reducing_disc(me, {}, cut_vertex_regions(me));
  ASSERT_EQ(s.status, SurfaceSearch::Status::Found);
  EXPECT_EQ(me.regions[s.region].kind, Region::Kind::Vertex);
  DiscSplit d = split_along_disc(me, *s.surface);
  for (const MarkedExterior* x : {&d.first, &d.second}) {
    EXPECT_TRUE(check_exterior(*x).empty());
    EXPECT_EQ(h1(*x), (HomologyGroup{1, {}}));
    EXPECT_EQ(x->graph.edges.size(), 1u);
  }
}

TEST(ReducingDisc, StarAndTangledTreeFindDiscs) {
  for (const char* name : {"flat-star", "tangled-tree", "flat-handcuffs"}) {
    MarkedExterior me = exterior(corpus(name));
    SurfaceSearch s = find_clean_reducing_disc(me, {}, cut_vertex_regions(me));
    ASSERT_EQ(s.status, SurfaceSearch::Status::Found) << name;
    DiscSplit d = split_along_disc(me, *s.surface);
    EXPECT_TRUE(check_exterior(d.first).empty()) << name;
    EXPECT_TRUE(check_exterior(d.second).empty()) << name;
    EXPECT_EQ(d.first.graph.edges.size() + d.second.graph.edges.size(), me.graph.edges.size()) << name;
  }
}

TEST(ReducingDisc, Fig5HasNoCertifiedDisc) {
  MarkedExterior me = exterior(corpus("fig5"));
  SurfaceSearch s = find_clean_reducing_disc(me, {}, cut_vertex_regions(me));
  EXPECT_EQ(s.status, SurfaceSearch::Status::Unknown);
  EXPECT_FALSE(s.surface);
}

TEST(ReducingDisc, InessentialDiscIsRefused) {
  MarkedExterior me = exterior(corpus("flat-path"));
  int refused = 0;
  for (const NormalCoordinates& nc : vertex_normal_surfaces(me, true).surfaces) {
    SurfaceAnalysis a = analyze(me, nc);
    if (!a.connected || a.eulerChar != 1 || a.boundaryCurves.size() != 1 || a.curveSides.size() != 2) continue;
    bool trivial = false;
    for (const auto& side : a.curveSides) trivial = trivial || (side.euler == 1 && !side.touchesJuncture);
    if (!trivial) continue;
    try {
      split_along_disc(me, nc);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NotReducing);
      ++refused;
    }
  }
  EXPECT_GT(refused, 0);
}

TEST(Surfaces, JsonDumps) {
  MarkedExterior me = exterior(corpus("unknot-loop"));
  NormalCoordinates nc = vertex_normal_surfaces(me, false).surfaces.front();
  auto c = nlohmann::json::parse(coordinates_to_json(nc));
  EXPECT_EQ(c["tetrahedra"].get<std::size_t>(), me.manifold.size());
  EXPECT_EQ(c["coordinates"].size(), 7 * me.manifold.size());
  auto a = nlohmann::json::parse(analysis_to_json(analyze(me, nc)));
  EXPECT_TRUE(a.contains("eulerChar"));
}
