#include <gtest/gtest.h>

#include <filesystem>

#include "sgk/compile.hpp"

using namespace sgk;

namespace {

Diagram corpus(const std::string& name) { return parse_file(std::string(SGK_CORPUS_DIR) + "/" + name); }

std::vector<std::string> corpus_names() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(SGK_CORPUS_DIR))
    if (e.path().extension() == ".sgd") out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

ErrorCode sub_code(const CompiledGraph& c, const SubComplex& s) {
  try {
    validate_subcomplex(c.sphere, s, c.metadata);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Usage;
}

}  // namespace

TEST(Layout, EmptyAndPoint) {
  PlanarLayout e = planar_layout(Diagram{});
  EXPECT_TRUE(e.nodes.empty());
  EXPECT_TRUE(e.arcs.empty());
  PlanarLayout p = planar_layout(corpus("point.sgd"));
  EXPECT_EQ(p.nodes.size(), 1u);
  EXPECT_TRUE(layout_realizes(corpus("point.sgd"), p));
}

TEST(Layout, CorpusRotationsRetrace) {
  for (const auto& name : corpus_names()) {
    Diagram d = corpus(name);
    PlanarLayout l = planar_layout(d);
    EXPECT_TRUE(layout_realizes(d, l)) << name;
    EXPECT_EQ(l.crossings.size(), d.crossings.size()) << name;
  }
}

TEST(Layout, MirroredDrawingIsRejected) {
  Diagram d = corpus("theta.sgd");
  PlanarLayout l = planar_layout(d);
  for (auto& [id, p] : l.nodes) p.x = -p.x;
  for (auto& [a, pts] : l.arcs)
    for (auto& p : pts) p.x = -p.x;
  EXPECT_FALSE(layout_realizes(d, l));
}

TEST(Compile, EmptyDiagramIsCertified) {
  CompiledGraph c = compile_to_sphere(Diagram{});
  EXPECT_TRUE(c.graph.vertices.empty());
  EXPECT_TRUE(c.graph.edgePaths.empty());
  SphereReport r = verify_sphere(c.sphere);
  EXPECT_EQ(r.status, "certified");
  EXPECT_LE(r.simplifiedSize, 2u);
}

TEST(Compile, VerifySphereFixtures) {
  EXPECT_EQ(verify_sphere(two_tet_sphere()).status, "certified");
  Triangulation torus;
  torus.add_tet();
  torus.join(0, 0, 0, Perm4(1, 2, 3, 0));
  SphereReport r = verify_sphere(torus);
  EXPECT_EQ(r.status, "failed");
  EXPECT_FALSE(r.closed);
}

TEST(Compile, CorpusCompilesToSpheres) {
  for (const auto& name : corpus_names()) {
    Diagram d = corpus(name);
    CompiledGraph c = compile_to_sphere(d);
    EXPECT_TRUE(is_oriented(c.sphere)) << name;
    SphereReport r = verify_sphere(c.sphere);
    EXPECT_TRUE(r.status == "certified" || r.status == "homology-consistent") << name;
    EXPECT_NO_THROW(validate_subcomplex(c.sphere, c.graph, c.metadata)) << name;
    EXPECT_EQ(graph_from_subcomplex(c.sphere, c.graph, c.metadata), underlying_graph(d)) << name;
  }
}

TEST(Compile, SinglePointAndLoop) {
  CompiledGraph p = compile_to_sphere(corpus("point.sgd"));
  EXPECT_EQ(p.graph.vertices.size(), 1u);
  EXPECT_TRUE(p.graph.edgePaths.empty());
  CompiledGraph u = compile_to_sphere(corpus("unknot-loop.sgd"));
  ASSERT_EQ(u.graph.edgePaths.size(), 1u);
  Skeleton s = skeleton(u.sphere);
  const auto& path = u.graph.edgePaths.begin()->second;
  EXPECT_EQ(s.tetVertex[path.front().tet][path.front().a], s.tetVertex[path.back().tet][path.back().b]);
}

TEST(Compile, DirectedPathsLeaveTheSource) {
  Diagram d = corpus("directed-loop.sgd");
  CompiledGraph c = compile_to_sphere(d);
  EXPECT_TRUE(c.metadata.edgeDirection.has_value());
  EXPECT_NO_THROW(validate_subcomplex(c.sphere, c.graph, c.metadata));
}

TEST(Compile, Deterministic) {
  Diagram d = corpus("fig5.sgd");
  CompiledGraph a = compile_to_sphere(d), b = compile_to_sphere(d);
  EXPECT_EQ(a.sphere, b.sphere);
  EXPECT_EQ(write_sub(a.graph, a.metadata), write_sub(b.graph, b.metadata));
}

TEST(Compile, SubRoundTrip) {
  for (const char* name : {"fig5.sgd", "directed-loop.sgd", "point-c1.sgd", "empty.sgd"}) {
    CompiledGraph c = compile_to_sphere(corpus(name));
    auto [sub, meta] = read_sub(write_sub(c.graph, c.metadata));
    EXPECT_EQ(meta, c.metadata) << name;
    EXPECT_EQ(sub.vertices, c.graph.vertices) << name;
    EXPECT_EQ(sub.edgePaths, c.graph.edgePaths) << name;
  }
}

TEST(Compile, SubParseErrors) {
  for (const char* bad : {"vertex v 0\n", "edge e u v 0:01\n", "frob\n", "edge e u v : 0:0x\n", "vertex v 0 1 hue=2\n"}) {
    try {
      read_sub(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Syntax) << bad;
    }
  }
}

TEST(Compile, BrokenSubcomplexesAreRejected) {
  CompiledGraph c = compile_to_sphere(corpus("flat-path.sgd"));
  SubComplex s = c.graph;
  s.vertices["v"] = s.vertices["u"];
  EXPECT_EQ(sub_code(c, s), ErrorCode::InvalidSubComplex);
  s = c.graph;
  auto& p = s.edgePaths.begin()->second;
  p.erase(p.begin() + 1);
  EXPECT_EQ(sub_code(c, s), ErrorCode::InvalidSubComplex);
  s = c.graph;
  auto it = s.edgePaths.begin();
  auto first = it->second;
  ++it;
  it->second = first;
  EXPECT_EQ(sub_code(c, s), ErrorCode::InvalidSubComplex);
  s = c.graph;
  s.edgePaths.erase(s.edgePaths.begin());
  EXPECT_EQ(sub_code(c, s), ErrorCode::InvalidSubComplex);
}
