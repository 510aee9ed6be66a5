#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "sgk/diagram.hpp"

using namespace sgk;

namespace {

Diagram corpus(const std::string& name) { return parse_file(std::string(SGK_CORPUS_DIR) + "/" + name); }

ErrorCode code_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Usage;
}

// Euler characteristic of a rotation system from permutation cycles
long brute_euler(const Diagram& d) {
  std::vector<std::vector<std::string>> rot;
  for (const auto& v : d.vertices) rot.push_back(v.rotation);
  for (const auto& c : d.crossings) rot.push_back({c.arcs.begin(), c.arcs.end()});
  std::vector<std::pair<int, int>> darts;
  std::map<std::pair<int, int>, int> id;
  for (std::size_t n = 0; n < rot.size(); ++n)
    for (std::size_t p = 0; p < rot[n].size(); ++p) {
      id[{static_cast<int>(n), static_cast<int>(p)}] = static_cast<int>(darts.size());
      darts.push_back({static_cast<int>(n), static_cast<int>(p)});
    }
  std::vector<int> sigma(darts.size()), alpha(darts.size(), -1);
  std::map<std::string, int> firstSeen;
  for (std::size_t k = 0; k < darts.size(); ++k) {
    auto [n, p] = darts[k];
    int deg = static_cast<int>(rot[n].size());
    sigma[k] = id[{n, (p + deg - 1) % deg}];
    const auto& a = rot[n][p];
    auto it = firstSeen.find(a);
    if (it == firstSeen.end()) {
      firstSeen[a] = static_cast<int>(k);
    } else {
      alpha[k] = it->second;
      alpha[it->second] = static_cast<int>(k);
    }
  }
  std::vector<char> seen(darts.size(), 0);
  long faces = 0;
  for (std::size_t k = 0; k < darts.size(); ++k) {
    if (seen[k]) continue;
    ++faces;
    int c = static_cast<int>(k);
    while (!seen[c]) {
      seen[c] = 1;
      c = sigma[alpha[c]];
    }
  }
  long isolated = 0;
  for (const auto& r : rot) isolated += r.empty();
  return static_cast<long>(rot.size()) - static_cast<long>(firstSeen.size()) + faces + isolated;
}

long brute_components(const Diagram& d) {
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> find = [&](const std::string& x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::map<std::string, std::string> arcNode;
  auto add = [&](const std::string& node, const std::string& a) {
    auto it = arcNode.find(a);
    if (it == arcNode.end()) arcNode[a] = node;
    else parent[find(node)] = find(it->second);
  };
  for (const auto& v : d.vertices) parent[v.id] = v.id;
  for (const auto& c : d.crossings) parent[c.id] = c.id;
  for (const auto& v : d.vertices)
    for (const auto& a : v.rotation) add(v.id, a);
  for (const auto& c : d.crossings)
    for (const auto& a : c.arcs) add(c.id, a);
  std::set<std::string> roots;
  for (const auto& [k, v] : parent) roots.insert(find(k));
  return static_cast<long>(roots.size());
}

Diagram random_relabel(const Diagram& d, std::mt19937& rng) {
  std::map<std::string, std::string> arc;
  std::uniform_int_distribution<int> coin(0, 1000000);
  Diagram r = d;
  auto ren = [&](const std::string& a) {
    auto it = arc.find(a);
    if (it == arc.end()) it = arc.emplace(a, "r" + std::to_string(coin(rng)) + "_" + a).first;
    return it->second;
  };
  std::map<std::string, std::string> vmap;
  for (auto& v : r.vertices) {
    std::string nid = "n" + std::to_string(coin(rng)) + v.id;
    vmap[v.id] = nid;
    v.id = nid;
    for (auto& a : v.rotation) a = ren(a);
    if (!v.rotation.empty()) {
      std::size_t s = std::uniform_int_distribution<std::size_t>(0, v.rotation.size() - 1)(rng);
      std::vector<std::string> rr;
      std::set<std::size_t> marks;
      for (std::size_t k = 0; k < v.rotation.size(); ++k) {
        std::size_t p = (s + k) % v.rotation.size();
        rr.push_back(v.rotation[p]);
        if (v.outSlots.count(p)) marks.insert(k);
      }
      v.rotation = rr;
      v.outSlots = marks;
    }
  }
  for (auto& c : r.crossings) {
    for (auto& a : c.arcs) a = ren(a);
    if (coin(rng) % 2) c.arcs = {c.arcs[2], c.arcs[3], c.arcs[0], c.arcs[1]};
    c.id = "k" + std::to_string(coin(rng)) + c.id;
  }
  for (auto& e : r.edges) {
    for (auto& a : e.arcs) a = ren(a);
    e.id = "f" + std::to_string(coin(rng)) + e.id;
    if (e.direction) e.direction = std::make_pair(vmap[e.direction->first], vmap[e.direction->second]);
    else if (coin(rng) % 2) std::reverse(e.arcs.begin(), e.arcs.end());
  }
  std::shuffle(r.vertices.begin(), r.vertices.end(), rng);
  std::shuffle(r.crossings.begin(), r.crossings.end(), rng);
  std::shuffle(r.edges.begin(), r.edges.end(), rng);
  return r;
}

const std::vector<std::string> kCorpus = {"empty.sgd",     "point.sgd",       "point-c1.sgd",  "one-edge.sgd",
                                          "flat-path.sgd", "flat-star.sgd",   "tangled-tree.sgd", "unknot-loop.sgd",
                                          "trefoil-loop.sgd", "fig3-hopf.sgd", "fig5.sgd",      "flat-handcuffs.sgd",
                                          "theta.sgd",     "directed-loop.sgd"};

}  // namespace

TEST(Diagram, EmptyAndPoint) {
  auto e = parse("");
  EXPECT_TRUE(e.vertices.empty() && e.crossings.empty() && e.edges.empty());
  auto p = parse("vertex v color=1");
  ASSERT_EQ(p.vertices.size(), 1u);
  EXPECT_EQ(p.vertices[0].color, 1u);
  EXPECT_TRUE(p.vertices[0].rotation.empty());
  auto g = underlying_graph(p);
  EXPECT_EQ(g.vertexColor->at("v"), 1u);
}

TEST(Diagram, Fig5Shape) {
  auto d = corpus("fig5.sgd");
  EXPECT_EQ(d.vertices.size(), 2u);
  EXPECT_EQ(d.edges.size(), 3u);
  EXPECT_EQ(d.crossings.size(), 2u);
  auto g = underlying_graph(d);
  int loops = 0, links = 0;
  for (const auto& e : g.edges) (e.isLoop() ? loops : links)++;
  EXPECT_EQ(loops, 2);
  EXPECT_EQ(links, 1);
  EXPECT_EQ(g.degree("p"), 3u);
}

TEST(Diagram, UnknotLoopGraph) {
  auto g = underlying_graph(corpus("unknot-loop.sgd"));
  ASSERT_EQ(g.vertices.size(), 1u);
  EXPECT_EQ(g.degree("v"), 2u);
}

TEST(Diagram, TypedErrors) {
  EXPECT_EQ(code_of("vertex v\nfoo bar"), ErrorCode::Syntax);
  EXPECT_EQ(code_of("vertex v color=x"), ErrorCode::Syntax);
  EXPECT_EQ(code_of("vertex v\nvertex v"), ErrorCode::DuplicateId);
  EXPECT_EQ(code_of("vertex v\nvnode v a\nedge e a"), ErrorCode::ArcMultiplicity);
  EXPECT_EQ(code_of("vnode v a a\nedge e a"), ErrorCode::MissingVertex);
  EXPECT_EQ(code_of("vertex u\nvertex w\nvnode u a\nvnode w a\nedge e a\nedge f a"), ErrorCode::EdgePartition);
  EXPECT_EQ(code_of("vertex u color=1\nvertex w\nvnode u a\nvnode w a\nedge e a"), ErrorCode::PartialDecoration);
  EXPECT_EQ(code_of("vertex v color=0\nvnode v a b\ncrossing c a b a b\nedge e a b"), ErrorCode::ArcMultiplicity);
  std::string k33 =
      "vertex a1\nvertex a2\nvertex a3\nvertex b1\nvertex b2\nvertex b3\n"
      "vnode a1 x11 x12 x13\nvnode a2 x21 x22 x23\nvnode a3 x31 x32 x33\n"
      "vnode b1 x11 x21 x31\nvnode b2 x12 x22 x32\nvnode b3 x13 x23 x33\n"
      "edge e11 x11\nedge e12 x12\nedge e13 x13\nedge e21 x21\nedge e22 x22\nedge e23 x23\n"
      "edge e31 x31\nedge e32 x32\nedge e33 x33\n";
  EXPECT_EQ(code_of(k33), ErrorCode::Nonplanar);
}

TEST(Diagram, ErrorsCarryLineAndColumn) {
  try {
    parse("vertex v\n\n  vertex v");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateId);
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 10);
  }
  try {
    parse("vertex v # comment\nedge");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Syntax);
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Diagram, RoundTripAndPlanarityOracle) {
  for (const auto& f : kCorpus) {
    auto d = corpus(f);
    EXPECT_EQ(parse(render(d)), d) << f;
    auto info = validate(d);
    EXPECT_EQ(brute_euler(d), 2L * info.componentCount) << f;
  }
}

TEST(Diagram, PlanarityOracleOnPerturbedRotations) {
  std::mt19937 rng(17);
  int planar = 0, nonplanar = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto d = corpus(kCorpus[8 + trial % 6]);
    for (auto& v : d.vertices)
      if (v.rotation.size() > 2 && trial % 3) std::shuffle(v.rotation.begin(), v.rotation.end(), rng);
    for (auto& c : d.crossings)
      if (trial % 5 == 0) std::swap(c.arcs[1], c.arcs[2]);
    bool ok = true;
    try {
      validate(d);
    } catch (const Error& e) {
      ok = false;
      if (e.code() == ErrorCode::Nonplanar) {
        EXPECT_LT(brute_euler(d), 2L * brute_components(d));
        ++nonplanar;
      }
    }
    if (ok) {
      EXPECT_EQ(brute_euler(d), 2L * validate(d).componentCount);
      ++planar;
    }
  }
  EXPECT_GT(planar, 0);
  EXPECT_GT(nonplanar, 0);
}

TEST(Diagram, DisjointUnion) {
  auto u = corpus("unknot-loop.sgd");
  auto uu = disjoint_union(u, u);
  EXPECT_EQ(uu.vertices.size(), 2u);
  EXPECT_EQ(uu.edges.size(), 2u);
  EXPECT_TRUE(uu.crossings.empty());
  auto hu = disjoint_union(corpus("fig3-hopf.sgd"), u);
  EXPECT_EQ(component_count(underlying_graph(hu)), 3u);
  EXPECT_EQ(validate(hu).componentCount, 2);
  for (const auto& f : kCorpus) {
    auto d = corpus(f);
    EXPECT_EQ(canonical_diagram(disjoint_union(d, Diagram{})).code, canonical_diagram(d).code) << f;
  }
  auto a = corpus("fig5.sgd"), b = corpus("theta.sgd");
  auto g = underlying_graph(disjoint_union(a, b));
  EXPECT_EQ(g, graph_disjoint_union(underlying_graph(a), underlying_graph(b)));
  EXPECT_THROW(disjoint_union(corpus("point-c1.sgd"), corpus("point.sgd")), Error);
}

TEST(Diagram, VertexSum) {
  auto e = corpus("one-edge.sgd");
  auto p = vertex_sum(e, "u", e, "u");
  auto g = underlying_graph(p);
  EXPECT_EQ(g.vertices.size(), 3u);
  EXPECT_EQ(g.edges.size(), 2u);
  EXPECT_TRUE(p.crossings.empty());
  EXPECT_TRUE(is_tree(g));
  auto t = corpus("trefoil-loop.sgd");
  auto tt = vertex_sum(t, "v", t, "v");
  EXPECT_EQ(tt.vertices.size(), 1u);
  EXPECT_EQ(tt.edges.size(), 2u);
  EXPECT_EQ(tt.crossings.size(), 6u);
  for (const auto& f : kCorpus) {
    auto d = corpus(f);
    if (d.vertices.empty()) continue;
    Diagram one = diagram_decoration_type(d).vertexColors ? parse("vertex o color=" + std::to_string(*d.vertices[0].color))
                                                         : parse("vertex o");
    if (diagram_decoration_type(d).edgeColors || diagram_decoration_type(d).directions) continue;
    auto s = vertex_sum(d, d.vertices[0].id, one, "o");
    EXPECT_EQ(canonical_diagram(s).code, canonical_diagram(d).code) << f;
  }
  EXPECT_THROW(vertex_sum(corpus("point-c1.sgd"), "v", corpus("point-c2.sgd"), "v"), Error);
  EXPECT_THROW(vertex_sum(e, "nope", e, "u"), Error);
}

TEST(Diagram, VertexSumGraphIsQuotient) {
  auto a = corpus("fig5.sgd"), b = corpus("theta.sgd");
  auto s = underlying_graph(vertex_sum(a, "q", b, "a"));
  auto ga = underlying_graph(a), gb = underlying_graph(b);
  DecoratedGraph q;
  for (const auto& v : ga.vertices) q.vertices.push_back("a." + v);
  for (const auto& v : gb.vertices)
    if (v != "a") q.vertices.push_back("b." + v);
  auto nb = [](const std::string& v) { return v == "a" ? std::string("a.q") : "b." + v; };
  for (const auto& e : ga.edges) q.edges.push_back({"a." + e.id, "a." + e.u, "a." + e.v});
  for (const auto& e : gb.edges) q.edges.push_back({"b." + e.id, nb(e.u), nb(e.v)});
  q.normalize();
  EXPECT_EQ(s, q);
}

TEST(Diagram, Mirror) {
  auto f = corpus("flat-handcuffs.sgd");
  EXPECT_EQ(mirror(f), f);
  for (const auto& n : kCorpus) {
    auto d = corpus(n);
    EXPECT_EQ(canonical_diagram(mirror(mirror(d))).diagram, canonical_diagram(d).diagram);
    EXPECT_NO_THROW(validate(mirror(d)));
  }
  auto t = corpus("trefoil-loop.sgd");
  EXPECT_NE(canonical_diagram(mirror(t)).code, canonical_diagram(t).code);
}

TEST(Diagram, RestrictResolvesCrossings) {
  auto d = corpus("fig5.sgd");
  auto r = restrict_diagram(d, {"p"}, {"la"});
  EXPECT_TRUE(r.crossings.empty());
  EXPECT_EQ(canonical_diagram(r).code, canonical_diagram(corpus("unknot-loop.sgd")).code);
  auto h = restrict_diagram(d, {"p", "q"}, {"la", "lb"});
  EXPECT_EQ(canonical_diagram(h).code, canonical_diagram(corpus("fig3-hopf.sgd")).code);
  auto t = restrict_diagram(corpus("tangled-tree.sgd"), {"c", "y", "z"}, {"ey", "ez"});
  EXPECT_EQ(underlying_graph(t).edges.size(), 2u);
}

TEST(Diagram, CanonicalFormIgnoresLabels) {
  std::mt19937 rng(23);
  for (const auto& f : kCorpus) {
    auto d = corpus(f);
    auto c = canonical_diagram(d);
    EXPECT_EQ(canonical_diagram(c.diagram).code, c.code) << f;
    EXPECT_EQ(canonical_diagram(c.diagram).diagram, c.diagram) << f;
    for (int k = 0; k < 5; ++k) {
      auto r = random_relabel(d, rng);
      auto cr = canonical_diagram(r);
      EXPECT_EQ(cr.code, c.code) << f;
      EXPECT_EQ(cr.diagram, c.diagram) << f;
    }
  }
  std::set<std::string> codes;
  for (const auto& f : kCorpus) codes.insert(canonical_diagram(corpus(f)).code);
  EXPECT_EQ(codes.size(), kCorpus.size());
}

TEST(Diagram, DirectedLoopMarks) {
  auto d = corpus("directed-loop.sgd");
  ASSERT_EQ(d.vertices[0].outSlots, std::set<std::size_t>{0});
  EXPECT_EQ(code_of("vertex v\nvnode v a a\nedge e a from=v to=v"), ErrorCode::EdgePartition);
  EXPECT_EQ(code_of("vertex v\nvnode v a^ a\nedge e a"), ErrorCode::EdgePartition);
  auto g = underlying_graph(d);
  EXPECT_EQ(g.edgeDirection->at("e"), std::make_pair(std::string("v"), std::string("v")));
}
