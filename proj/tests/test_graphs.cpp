#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "sgk/graphs.hpp"

using namespace sgk;

namespace {

DecoratedGraph make(std::vector<std::string> vs, std::vector<GraphEdge> es) {
  DecoratedGraph g;
  g.vertices = std::move(vs);
  g.edges = std::move(es);
  g.normalize();
  g.validate();
  return g;
}

DecoratedGraph theta() { return make({"a", "b"}, {{"e1", "a", "b"}, {"e2", "a", "b"}, {"e3", "a", "b"}}); }

bool check_iso(const DecoratedGraph& g1, const DecoratedGraph& g2, const GraphIso& f) {
  for (const auto& e : g1.edges) {
    const GraphEdge* t = g2.edge(f.edgeMap.at(e.id));
    std::string a = f.vertexMap.at(e.u), b = f.vertexMap.at(e.v);
    if (!((t->u == a && t->v == b) || (t->u == b && t->v == a))) return false;
    if (g1.edgeColor && g1.edgeColor->at(e.id) != g2.edgeColor->at(t->id)) return false;
    if (g1.edgeDirection) {
      auto d1 = g1.edgeDirection->at(e.id);
      auto d2 = g2.edgeDirection->at(t->id);
      if (f.vertexMap.at(d1.first) != d2.first || f.vertexMap.at(d1.second) != d2.second) return false;
    }
  }
  if (g1.vertexColor)
    for (const auto& v : g1.vertices)
      if (g1.vertexColor->at(v) != g2.vertexColor->at(f.vertexMap.at(v))) return false;
  return true;
}

// every pair of bijections, filtered
std::set<std::pair<std::vector<std::string>, std::vector<std::string>>> brute_isos(const DecoratedGraph& g1,
                                                                                 const DecoratedGraph& g2) {
  std::set<std::pair<std::vector<std::string>, std::vector<std::string>>> out;
  if (g1.vertices.size() != g2.vertices.size() || g1.edges.size() != g2.edges.size()) return out;
  std::vector<std::string> vp = g2.vertices;
  std::sort(vp.begin(), vp.end());
  do {
    std::vector<std::string> ep;
    for (const auto& e : g2.edges) ep.push_back(e.id);
    std::sort(ep.begin(), ep.end());
    do {
      GraphIso f;
      for (std::size_t i = 0; i < vp.size(); ++i) f.vertexMap[g1.vertices[i]] = vp[i];
      for (std::size_t i = 0; i < ep.size(); ++i) f.edgeMap[g1.edges[i].id] = ep[i];
      if (check_iso(g1, g2, f)) out.insert({vp, ep});
    } while (std::next_permutation(ep.begin(), ep.end()));
  } while (std::next_permutation(vp.begin(), vp.end()));
  return out;
}

DecoratedGraph random_graph(std::mt19937& rng, int nv, int ne, bool colors, bool dirs) {
  DecoratedGraph g;
  for (int i = 0; i < nv; ++i) g.vertices.push_back("v" + std::to_string(i));
  std::uniform_int_distribution<int> pick(0, nv - 1), col(0, 1);
  for (int i = 0; i < ne; ++i) g.edges.push_back({"e" + std::to_string(i), g.vertices[pick(rng)], g.vertices[pick(rng)]});
  if (colors) {
    g.vertexColor.emplace();
    for (const auto& v : g.vertices) (*g.vertexColor)[v] = col(rng);
  }
  if (dirs) {
    g.edgeDirection.emplace();
    for (const auto& e : g.edges) (*g.edgeDirection)[e.id] = {e.u, e.v};
  }
  g.normalize();
  return g;
}

DecoratedGraph shuffled_copy(std::mt19937& rng, const DecoratedGraph& g) {
  std::vector<std::string> names = g.vertices;
  std::shuffle(names.begin(), names.end(), rng);
  std::map<std::string, std::string> vm;
  for (std::size_t i = 0; i < names.size(); ++i) vm[g.vertices[i]] = "w" + names[i];
  GraphIso f;
  f.vertexMap = vm;
  std::vector<int> perm(g.edges.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t i = 0; i < perm.size(); ++i) f.edgeMap[g.edges[i].id] = "f" + std::to_string(perm[i]);
  return apply_iso(f, g);
}

}  // namespace

TEST(Graphs, EmptyGraphHasIdentityOnly) {
  DecoratedGraph g;
  auto r = iso_search(g, g);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(r[0].vertexMap.empty());
}

TEST(Graphs, ColorMismatchGivesNoIso) {
  auto a = make({"x"}, {}), b = make({"x"}, {});
  a.vertexColor = std::map<std::string, unsigned>{{"x", 1}};
  b.vertexColor = std::map<std::string, unsigned>{{"x", 2}};
  EXPECT_TRUE(iso_search(a, b).empty());
}

TEST(Graphs, DecorationTypeMismatchThrows) {
  auto a = make({"x"}, {}), b = make({"x"}, {});
  a.vertexColor = std::map<std::string, unsigned>{{"x", 1}};
  EXPECT_THROW(iso_search(a, b), Error);
}

TEST(Graphs, ThetaHasTwelveIsos) {
  auto g = theta();
  auto r = iso_search(g, g);
  EXPECT_EQ(r.size(), 12u);
  EXPECT_EQ(brute_isos(g, g).size(), 12u);
  for (const auto& f : r) EXPECT_EQ(apply_iso(f, g), g);
}

TEST(Graphs, PinnedSearchRestricts) {
  auto g = theta();
  auto r = iso_search(g, g, {{"a", "b"}});
  EXPECT_EQ(r.size(), 6u);
  for (const auto& f : r) EXPECT_EQ(f.vertexMap.at("a"), "b");
}

TEST(Graphs, IsoSearchMatchesBruteForce) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    int nv = 1 + trial % 5, ne = trial % 5;
    bool colors = trial % 3 == 0, dirs = trial % 4 == 1;
    auto g1 = random_graph(rng, nv, ne, colors, dirs);
    auto g2 = trial % 2 ? shuffled_copy(rng, g1) : random_graph(rng, nv, ne, colors, dirs);
    g2.normalize();
    auto r = iso_search(g1, g2);
    auto brute = brute_isos(g1, g2);
    ASSERT_EQ(r.size(), brute.size()) << "trial " << trial;
    std::set<std::pair<std::vector<std::string>, std::vector<std::string>>> got;
    for (const auto& f : r) {
      ASSERT_EQ(apply_iso(f, g1), g2);
      std::vector<std::string> vp, ep;
      for (const auto& v : g1.vertices) vp.push_back(f.vertexMap.at(v));
      for (const auto& e : g1.edges) ep.push_back(f.edgeMap.at(e.id));
      got.insert({vp, ep});
    }
    EXPECT_EQ(got, brute);
    if (!r.empty()) EXPECT_EQ(canonical_form(g1), canonical_form(g2));
    else EXPECT_NE(canonical_form(g1), canonical_form(g2)) << "trial " << trial;
  }
}

TEST(Graphs, IdentityAlwaysFound) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = random_graph(rng, 2 + trial % 6, trial % 8, trial % 2, trial % 3 == 0);
    auto r = iso_search(g, g);
    GraphIso id;
    for (const auto& v : g.vertices) id.vertexMap[v] = v;
    for (const auto& e : g.edges) id.edgeMap[e.id] = e.id;
    EXPECT_NE(std::find(r.begin(), r.end(), id), r.end());
  }
}

TEST(Graphs, TreesAndLeaves) {
  auto single = make({"v"}, {});
  EXPECT_TRUE(is_tree(single));
  EXPECT_TRUE(leaves(single).empty());
  auto edge = make({"u", "v"}, {{"e", "u", "v"}});
  EXPECT_TRUE(is_tree(edge));
  EXPECT_EQ(leaves(edge), (std::set<std::string>{"u", "v"}));
  auto loop = make({"v"}, {{"e", "v", "v"}});
  EXPECT_FALSE(is_tree(loop));
  EXPECT_EQ(loop.degree("v"), 2u);
  EXPECT_FALSE(is_tree(DecoratedGraph{}));
}

TEST(Graphs, CutVertices) {
  auto path = make({"a", "b", "c"}, {{"e1", "a", "b"}, {"e2", "b", "c"}});
  EXPECT_EQ(abstract_cut_vertices(path), std::set<std::string>{"b"});
  auto handcuff = make({"a", "b"}, {{"l1", "a", "a"}, {"m", "a", "b"}, {"l2", "b", "b"}});
  EXPECT_EQ(abstract_cut_vertices(handcuff), (std::set<std::string>{"a", "b"}));
  EXPECT_TRUE(abstract_cut_vertices(theta()).empty());
  auto loop = make({"v"}, {{"e", "v", "v"}});
  EXPECT_TRUE(abstract_cut_vertices(loop).empty());
  auto twoLoops = make({"v"}, {{"e", "v", "v"}, {"f", "v", "v"}});
  EXPECT_EQ(abstract_cut_vertices(twoLoops), std::set<std::string>{"v"});
}

namespace {

TreeSkeleton star() {
  TreeSkeleton s;
  s.iNodes = {"i1", "i2"};
  s.jNodes = {"j"};
  s.links = {{"l1", "i1", "j", "u"}, {"l2", "i2", "j", "u"}};
  return s;
}

std::map<std::string, DecoratedGraph> star_blocks() {
  auto one = make({"u", "w"}, {{"e", "u", "w"}});
  return {{"i1", one}, {"i2", one}};
}

// brute-force part-preserving tree isomorphism count
std::size_t brute_skeleton_isos(const TreeSkeleton& a, const TreeSkeleton& b) {
  if (a.iNodes.size() != b.iNodes.size() || a.jNodes.size() != b.jNodes.size() || a.links.size() != b.links.size())
    return 0;
  std::vector<std::string> ip = b.iNodes, jp = b.jNodes;
  std::sort(ip.begin(), ip.end());
  std::sort(jp.begin(), jp.end());
  std::set<std::pair<std::string, std::string>> eb;
  for (const auto& l : b.links) eb.insert({l.i, l.j});
  std::size_t count = 0;
  do {
    do {
      std::map<std::string, std::string> m;
      for (std::size_t k = 0; k < ip.size(); ++k) m[a.iNodes[k]] = ip[k];
      for (std::size_t k = 0; k < jp.size(); ++k) m[a.jNodes[k]] = jp[k];
      bool ok = true;
      for (const auto& l : a.links) ok = ok && eb.count({m[l.i], m[l.j]});
      count += ok;
    } while (std::next_permutation(jp.begin(), jp.end()));
  } while (std::next_permutation(ip.begin(), ip.end()));
  return count;
}

TreeSkeleton random_skeleton(std::mt19937& rng, int nodes) {
  // random bipartite tree: grow from an I-node, alternating parts
  TreeSkeleton s;
  std::vector<std::pair<std::string, bool>> all{{"i0", true}};
  s.iNodes.push_back("i0");
  for (int k = 1; k < nodes; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    auto [parent, isI] = all[pick(rng)];
    std::string id = (isI ? "j" : "i") + std::to_string(k);
    all.push_back({id, !isI});
    (isI ? s.jNodes : s.iNodes).push_back(id);
    std::string i = isI ? parent : id, j = isI ? id : parent;
    s.links.push_back({"l" + std::to_string(k), i, j, "x" + std::to_string(k)});
  }
  return s;
}

}  // namespace

TEST(Skeleton, StarRealizesPath) {
  auto s = star();
  auto bg = star_blocks();
  auto g = realized_underlying_graph(s, bg);
  EXPECT_EQ(g.vertices.size(), 3u);
  EXPECT_EQ(g.edges.size(), 2u);
  EXPECT_TRUE(is_tree(g));
  auto cut = cut_vertex_table(s, bg);
  ASSERT_EQ(cut.size(), 1u);
  EXPECT_EQ(abstract_cut_vertices(g), std::set<std::string>{cut.at("j")});
}

TEST(Skeleton, EmptyAndSingle) {
  TreeSkeleton e;
  EXPECT_TRUE(realized_underlying_graph(e, {}).vertices.empty());
  EXPECT_TRUE(cut_vertex_table(e, {}).empty());
  auto sk = skeleton_isos(e, e);
  ASSERT_EQ(sk.size(), 1u);
  EXPECT_TRUE(sk[0].nodeMap.empty());
  TreeSkeleton one;
  one.iNodes = {"i"};
  auto g = make({"p", "q"}, {{"e", "p", "q"}});
  EXPECT_EQ(realized_underlying_graph(one, {{"i", g}}), g);
  TreeSkeleton two;
  two.iNodes = {"a", "b"};
  EXPECT_TRUE(skeleton_isos(one, two).empty());
}

TEST(Skeleton, PathHasTwoIsos) {
  auto s = star();
  auto r = skeleton_isos(s, s);
  EXPECT_EQ(r.size(), 2u);
  EXPECT_EQ(brute_skeleton_isos(s, s), 2u);
}

TEST(Skeleton, ChainOfThreeBlocks) {
  TreeSkeleton s;
  s.iNodes = {"i1", "i2", "i3"};
  s.jNodes = {"j1", "j2"};
  s.links = {{"a", "i1", "j1", "w"}, {"b", "i2", "j1", "u"}, {"c", "i2", "j2", "w"}, {"d", "i3", "j2", "u"}};
  auto one = make({"u", "w"}, {{"e", "u", "w"}});
  std::map<std::string, DecoratedGraph> bg{{"i1", one}, {"i2", one}, {"i3", one}};
  auto cut = cut_vertex_table(s, bg);
  ASSERT_EQ(cut.size(), 2u);
  EXPECT_NE(cut.at("j1"), cut.at("j2"));
  auto g = realized_underlying_graph(s, bg);
  EXPECT_EQ(g.vertices.size(), 6u - 2u);
  EXPECT_EQ(abstract_cut_vertices(g), (std::set<std::string>{cut.at("j1"), cut.at("j2")}));
}

TEST(Skeleton, InvariantViolationsRejected) {
  TreeSkeleton s;
  s.iNodes = {"i1"};
  s.jNodes = {"j"};
  s.links = {{"l", "i1", "j", "u"}};
  EXPECT_THROW(s.validate(), Error);  // J of degree 1
  auto t = star();
  t.links[1].i = "i1";
  EXPECT_THROW(t.validate(), Error);
}

TEST(Skeleton, IsosMatchBruteForce) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + trial % 8;
    auto a = random_skeleton(rng, n), b = random_skeleton(rng, n);
    auto r = skeleton_isos(a, b);
    EXPECT_EQ(r.size(), brute_skeleton_isos(a, b)) << "trial " << trial;
  }
}

TEST(Skeleton, RealizedVertexCountFormula) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    // random skeleton whose J-nodes have degree >= 2, blocks are one-edge graphs or triangles
    TreeSkeleton s;
    std::map<std::string, DecoratedGraph> bg;
    int nb = 1 + trial % 5;
    for (int b = 0; b < nb; ++b) {
      std::string id = "i" + std::to_string(b);
      s.iNodes.push_back(id);
      bg[id] = trial % 2 ? make({"x", "y", "z"}, {{"p", "x", "y"}, {"q", "y", "z"}, {"r", "z", "x"}})
                         : make({"x", "y"}, {{"p", "x", "y"}});
    }
    std::map<std::string, std::set<std::string>> usedAt;
    std::size_t jdeg = 0;
    for (int b = 1; b < nb; ++b) {
      std::uniform_int_distribution<int> pick(0, b - 1);
      int parent = pick(rng);
      std::string j = "j" + std::to_string(b);
      s.jNodes.push_back(j);
      std::string pv, cv = "x";
      for (const std::string& v : bg["i0"].vertices)
        if (!usedAt["i" + std::to_string(parent)].count(v)) {
          pv = v;
          break;
        }
      if (pv.empty()) {
        s.jNodes.pop_back();
        continue;
      }
      usedAt["i" + std::to_string(parent)].insert(pv);
      usedAt["i" + std::to_string(b)].insert(cv);
      s.links.push_back({"a" + std::to_string(b), "i" + std::to_string(parent), j, pv});
      s.links.push_back({"b" + std::to_string(b), "i" + std::to_string(b), j, cv});
      jdeg += 1;
    }
    if (s.links.size() / 2 + 1 != s.iNodes.size()) continue;
    auto g = realized_underlying_graph(s, bg);
    std::size_t total = 0;
    for (const auto& [i, b] : bg) total += b.vertices.size();
    EXPECT_EQ(g.vertices.size(), total - jdeg);
    auto cut = cut_vertex_table(s, bg);
    std::set<std::string> img;
    for (const auto& [j, v] : cut) img.insert(v);
    EXPECT_EQ(img.size(), cut.size());
  }
}
