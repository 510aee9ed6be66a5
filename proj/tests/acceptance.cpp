// Acceptance run: one line per criterion, exit status 1 if any fails.
#include <chrono>
#include <fstream>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "dd_oracle.hpp"
#include "json.hpp"
#include "sgk/pipeline.hpp"

using namespace sgk;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Named {
  std::string name;
  Diagram d;
};

std::vector<Named> load_corpus() {
  std::vector<Named> out;
  for (const auto& f : fs::directory_iterator(SGK_CORPUS_DIR))
    if (f.path().extension() == ".sgd") out.push_back({f.path().stem().string(), parse_file(f.path().string())});
  std::sort(out.begin(), out.end(), [](const Named& a, const Named& b) { return a.name < b.name; });
  return out;
}

const Diagram& get(const std::vector<Named>& c, const std::string& name) {
  for (const auto& n : c)
    if (n.name == name) return n.d;
  throw Error(ErrorCode::Io, "corpus entry " + name + " missing");
}

DecoratedGraph graph_of(const Diagram& d) { return underlying_graph(d); }
bool same_type(const Diagram& a, const Diagram& b) { return diagram_decoration_type(a) == diagram_decoration_type(b); }
bool nonempty(const Diagram& d) { return !d.vertices.empty(); }
bool connected(const Diagram& d) { return nonempty(d) && component_count(graph_of(d)) == 1; }
bool is_block(const Diagram& d) {
  DecoratedGraph g = graph_of(d);
  return connected(d) && !g.edges.empty() && abstract_cut_vertices(g).empty();
}
Diagram split_union(const Diagram& a, const Diagram& b) { return disjoint_union(relabel_prefix(a, "a."), relabel_prefix(b, "b.")); }

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;
  void fail(const std::string& why) {
    pass = false;
    if (failures.size() < 5) failures.push_back(why);
  }
};

// ------------------------------------------------------------------ 1
Outcome exterior_structure(const std::vector<Named>& corpus) {
  Outcome o;
  double worst = 0;
  for (const auto& [name, d] : corpus) {
    auto t0 = Clock::now();
    MarkedExterior me = exterior_of(d);
    RegionSummary s = region_summary(me);
    double secs = since(t0);
    worst = std::max(worst, secs);
    if (secs >= 10) o.fail(name + " took " + std::to_string(secs) + " s");
    if (auto problems = check_exterior(me); !problems.empty()) o.fail(name + ": " + problems[0]);
    DecoratedGraph g = graph_of(d);
    int degrees = 0, junctures = 0;
    for (const auto& e : s.regions) {
      if (e.region.kind == Region::Kind::Vertex) {
        int deg = static_cast<int>(g.degree(e.region.id));
        degrees += deg;
        junctures += e.junctures;
        if (e.euler != 2 - deg) o.fail(name + ": chi(R_" + e.region.id + ") = " + std::to_string(e.euler));
      } else if (e.euler != 0) {
        o.fail(name + ": chi(R_" + e.region.id + ") = " + std::to_string(e.euler));
      }
    }
    if (junctures != degrees) o.fail(name + ": " + std::to_string(junctures) + " junctures, degree sum " + std::to_string(degrees));
    if (s.regions.size() != g.vertices.size() + g.edges.size()) o.fail(name + ": region count");
  }
  std::ostringstream os;
  os << corpus.size() << " graphs, slowest " << worst << " s";
  o.detail = os.str();
  return o;
}

// ------------------------------------------------------------------ 2
Outcome depth_independence(const std::vector<Named>& corpus) {
  Outcome o;
  PipelineOptions deep;
  deep.depth = 3;
  for (const auto& [name, d] : corpus) {
    Fingerprint a = invariant_fingerprint(exterior_of(d));
    Fingerprint b = invariant_fingerprint(exterior_of(d, deep));
    if (!(a == b)) o.fail(name + ": " + a.first_difference(b));
  }
  o.detail = std::to_string(corpus.size()) + " graphs at depths 2 and 3";
  return o;
}

// ------------------------------------------------------------------ 3
Outcome separability(const std::vector<Named>& corpus) {
  Outcome o;
  double worst = 0;
  std::size_t biggest = 0, instances = 0;
  auto run = [&](const std::string& label, const Diagram& d, std::size_t want) {
    auto t0 = Clock::now();
    MarkedExterior me = exterior_of(d);
    PieceSplit s = find_pieces(me);
    double secs = since(t0);
    ++instances;
    worst = std::max(worst, secs);
    biggest = std::max(biggest, me.manifold.size());
    if (secs >= 60) o.fail(label + " took " + std::to_string(secs) + " s");
    if (!s.unknownReasons.empty()) o.fail(label + ": " + s.unknownReasons[0]);
    if (s.pieces.size() != want) {
      o.fail(label + ": " + std::to_string(s.pieces.size()) + " pieces, expected " + std::to_string(want));
      return;
    }
    // no false splits: a piece never mixes the summands of a union, and it
    // carries the whole sub-graph on its vertices
    std::multiset<std::string> got, expected;
    for (const auto& p : s.pieces) {
      std::set<std::string> sides;
      for (const auto& v : p.graph.vertices) sides.insert(v.substr(0, v.find('.')));
      if (label.find('+') != std::string::npos && sides.size() != 1) o.fail(label + ": a piece mixes summands");
      got.insert(canonical_form(p.graph));
    }
    DecoratedGraph g = graph_of(d);
    std::vector<std::string> vs;
    for (const auto& p : s.pieces) {
      std::set<std::string> ids(p.graph.vertices.begin(), p.graph.vertices.end());
      for (const auto& v : ids) vs.push_back(v);
      std::set<std::string> es;
      for (const auto& e : g.edges)
        if (ids.count(e.u) && ids.count(e.v)) es.insert(e.id);
      expected.insert(canonical_form(induced_subgraph(g, ids, es)));
    }
    if (got != expected || vs.size() != g.vertices.size()) o.fail(label + ": pieces do not match the components");
  };
  std::ifstream metaFile(std::string(SGK_CORPUS_DIR) + "/expected.json");
  nlohmann::json meta = nlohmann::json::parse(metaFile);
  std::vector<const Named*> single;
  for (const auto& n : corpus) {
    std::size_t want = meta["graphs"][n.name]["pieces"];
    run(n.name, n.d, want);
    if (want == 1) single.push_back(&n);
  }
  for (const Named* a : single)
    for (const Named* b : single)
      if (a->name <= b->name && same_type(a->d, b->d)) run(a->name + "+" + b->name, split_union(a->d, b->d), 2);
  run("unknot+theta+hopf",
      split_union(split_union(get(corpus, "unknot-loop"), get(corpus, "theta")), get(corpus, "fig3-hopf")), 3);
  std::ostringstream os;
  os << instances << " instances, slowest " << worst << " s, largest exterior " << biggest << " tetrahedra";
  o.detail = os.str();
  return o;
}

// ------------------------------------------------------------------ 4
Outcome round_trips(const std::vector<Named>& corpus) {
  Outcome o;
  Pipeline pipe;
  std::size_t unions = 0, sums = 0, discSums = 0;
  const Diagram& empty = get(corpus, "empty");
  for (const auto& p : corpus) {
    if (!nonempty(p.d)) continue;
    for (const auto& q : corpus) {
      if (!nonempty(q.d) || !same_type(p.d, q.d) || p.name > q.name) continue;
      Diagram pq = split_union(p.d, q.d), qp = split_union(q.d, p.d);
      Verdict v = pipe.compare_graphs(pq, qp);
      ++unions;
      if (v.kind != VerdictKind::Isomorphic) o.fail(p.name + "+" + q.name + " vs swapped: " + verdict_name(v.kind));
    }
    Verdict id = pipe.compare_graphs(disjoint_union(p.d, empty), p.d);
    if (id.kind != VerdictKind::Isomorphic) o.fail(p.name + "+empty: " + verdict_name(id.kind));
  }
  std::vector<const Named*> blocks;
  for (const auto& n : corpus)
    if (is_block(n.d)) blocks.push_back(&n);
  auto check_sum = [&](Pipeline& pp, const Named& a, const std::string& va, const Named& b, const std::string& vb) {
    std::string label = a.name + "@" + va + " * " + b.name + "@" + vb;
    Diagram ab = vertex_sum(a.d, va, b.d, vb), ba = vertex_sum(b.d, vb, a.d, va);
    const BlockTree& t = pp.block_tree(ab);
    if (t.skeleton.iNodes.size() != 2) o.fail(label + ": " + std::to_string(t.skeleton.iNodes.size()) + " blocks");
    Verdict v = pp.compare_pieces(ab, ba);
    if (v.kind != VerdictKind::Isomorphic) o.fail(label + " vs swapped: " + verdict_name(v.kind));
  };
  for (const Named* a : blocks)
    for (const Named* b : blocks) {
      if (!same_type(a->d, b->d)) continue;
      for (const auto& va : graph_of(a->d).vertices)
        for (const auto& vb : graph_of(b->d).vertices) {
          check_sum(pipe, *a, va, *b, vb);
          ++sums;
        }
    }
  // the same sums found by the disc search alone, where it is tractable
  PipelineOptions discs;
  discs.diagramSplits = false;
  Pipeline discPipe(discs);
  std::vector<std::pair<std::string, std::string>> small{{"one-edge", "u"}, {"unknot-loop", "v"}, {"fig3-hopf", "p"}, {"theta", "a"}};
  for (const auto& [a, va] : small)
    for (const auto& [b, vb] : small) {
      const Named na{a, get(corpus, a)}, nb{b, get(corpus, b)};
      check_sum(discPipe, na, va, nb, vb);
      ++discSums;
    }
  std::ostringstream os;
  os << unions << " union pairs, " << sums << " vertex sums from the drawing, " << discSums << " by disc search";
  o.detail = os.str();
  return o;
}

// ------------------------------------------------------------------ 5
Outcome cut_vertices(const std::vector<Named>& corpus) {
  Outcome o;
  for (bool drawn : {true, false}) {
    PipelineOptions opt;
    opt.diagramSplits = drawn;
    std::string how = drawn ? " (drawing)" : " (disc search)";
    BlockTree path = find_block_tree(get(corpus, "flat-path"), opt);
    if (path.skeleton.iNodes.size() != 2 || path.skeleton.jNodes != std::vector<std::string>{"J:v"})
      o.fail("flat-path" + how + ": " + std::to_string(path.skeleton.iNodes.size()) + " blocks");
    BlockTree fig5 = find_block_tree(get(corpus, "fig5"), opt);
    if (fig5.skeleton.iNodes.size() != 1) o.fail("fig5" + how + ": " + std::to_string(fig5.skeleton.iNodes.size()) + " blocks");
    BlockTree cuffs = find_block_tree(get(corpus, "flat-handcuffs"), opt);
    if (cuffs.skeleton.iNodes.size() != 3 || !cuffs.certain())
      o.fail("flat-handcuffs" + how + ": " + std::to_string(cuffs.skeleton.iNodes.size()) + " blocks");
  }
  o.detail = "flat-path 2, fig5 1, flat-handcuffs 3, with and without drawn cuts";
  return o;
}

// ------------------------------------------------------------------ 6
Outcome spatial_trees(const std::vector<Named>& corpus) {
  Outcome o;
  std::size_t pairs = 0;
  double worst = 0;
  std::vector<const Named*> trees;
  for (const auto& n : corpus)
    if (is_tree(graph_of(n.d))) trees.push_back(&n);
  for (const Named* a : trees)
    for (const Named* b : trees) {
      if (!same_type(a->d, b->d)) continue;
      std::vector<Diagram> drawings{b->d, relabel_prefix(mirror(b->d), "m.")};
      for (const Diagram& bd : drawings) {
        bool same = !iso_search(graph_of(a->d), graph_of(bd), {}, 1).empty();
        if (!same) continue;
        ++pairs;
        auto t0 = Clock::now();
        Verdict v = compare_graphs(a->d, bd);
        double secs = since(t0);
        worst = std::max(worst, secs);
        if (v.kind != VerdictKind::Isomorphic || !v.witness || v.witness->method != "tree" || secs >= 1)
          o.fail(a->name + " vs " + b->name + ": " + verdict_name(v.kind) + " in " + std::to_string(secs) + " s");
      }
    }
  const Diagram& star = get(corpus, "flat-star");
  const Diagram& tangled = get(corpus, "tangled-tree");
  if (compare_graphs(star, tangled).kind != VerdictKind::Isomorphic) o.fail("flat-star vs tangled-tree");
  std::ostringstream os;
  os << pairs << " pairs of drawings of the same tree, slowest " << worst << " s";
  o.detail = os.str();
  return o;
}

// ------------------------------------------------------------------ 7
Outcome soundness(const std::vector<Named>& corpus, int audits) {
  Outcome o;
  // diagrams in one group are drawings that may or may not be isomorphic
  std::vector<std::vector<Named>> groups;
  for (const auto& n : corpus) {
    std::vector<Named> g{n, {n.name + "'", relabel_prefix(n.d, "r.")}};
    if (!n.d.crossings.empty()) g.push_back({"mirror " + n.name, mirror(n.d)});
    groups.push_back(g);
  }
  std::vector<const Named*> blocks;
  for (const auto& n : corpus)
    if (is_block(n.d)) blocks.push_back(&n);
  for (const Named* a : blocks)
    for (const Named* b : blocks)
      if (same_type(a->d, b->d) && a->name < b->name) {
        groups.push_back({{a->name + "+" + b->name, split_union(a->d, b->d)},
                          {b->name + "+" + a->name, split_union(b->d, a->d)}});
        std::string va = graph_of(a->d).vertices[0], vb = graph_of(b->d).vertices[0];
        groups.push_back({{a->name + "*" + b->name, vertex_sum(a->d, va, b->d, vb)},
                          {b->name + "*" + a->name, vertex_sum(b->d, vb, a->d, va)}});
      }
  std::vector<const Named*> pool;
  std::vector<std::size_t> groupOf;
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (const auto& n : groups[g]) {
      pool.push_back(&n);
      groupOf.push_back(g);
    }
  std::mt19937 rng(20261015);
  PipelineOptions base;
  PipelineOptions twice = base.doubled();
  Pipeline p1(base), p2(twice);
  std::map<std::string, int> tally;
  int replays = 0;
  for (int k = 0; k < audits; ++k) {
    std::size_t ia = rng() % pool.size();
    const Named& a = *pool[ia];
    const Named* b = nullptr;
    while (!b) {
      const auto& group = groups[groupOf[ia]];
      const Named* c = rng() % 2 ? pool[rng() % pool.size()] : &group[rng() % group.size()];
      if (same_type(a.d, c->d)) b = c;
    }
    std::string label = a.name + " vs " + b->name;
    Verdict v = p1.compare_graphs(a.d, b->d);
    tally[verdict_name(v.kind)]++;
    std::string why;
    if (v.kind != VerdictKind::Unknown) {
      ++replays;
      if (!replay_verdict(a.d, b->d, v, base, &why)) o.fail(label + ": replay failed: " + why);
    }
    Verdict w = p2.compare_graphs(a.d, b->d);
    if (v.kind != VerdictKind::Unknown && w.kind != VerdictKind::Unknown && v.kind != w.kind)
      o.fail(label + ": " + verdict_name(v.kind) + " became " + verdict_name(w.kind) + " with doubled budgets");
    if (v.kind != VerdictKind::Unknown && w.kind == VerdictKind::Unknown)
      o.fail(label + ": definite verdict lost with doubled budgets");
    if (w.kind != VerdictKind::Unknown && w.kind != v.kind) {
      ++replays;
      if (!replay_verdict(a.d, b->d, w, twice, &why)) o.fail(label + ": doubled replay failed: " + why);
    }
  }
  std::ostringstream os;
  os << audits << " audits over a pool of " << pool.size() << " diagrams: ";
  for (const auto& [k, n] : tally) os << n << " " << k << " ";
  os << "(" << replays << " replays)";
  o.detail = os.str();
  return o;
}

// ------------------------------------------------------------------ 8
Outcome enumeration_oracle(int randomFixtures) {
  Outcome o;
  std::mt19937 rng(8);
  std::vector<Triangulation> fixtures{single_tet(), two_tet_sphere()};
  for (int i = 0; i < randomFixtures; ++i)
    fixtures.push_back(oracle::random_gluing(rng, 1 + i % 4, i % 4 == 0 ? 0.0 : 0.25));
  std::size_t runs = 0, rays = 0;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const Triangulation& t = fixtures[i];
    for (bool constrained : {false, true}) {
      std::vector<char> zero = constrained ? zero_on_boundary(t) : std::vector<char>{};
      Enumeration e = enumerate_vertex_surfaces(t, zero);
      std::vector<NormalCoordinates> want = oracle::vertex_surfaces(t, zero);
      ++runs;
      rays += want.size();
      if (!e.complete) o.fail("fixture " + std::to_string(i) + ": enumeration incomplete");
      else if (e.surfaces != want) o.fail("fixture " + std::to_string(i) + (constrained ? " (boundary zero)" : "") + ": ray sets differ");
    }
  }
  std::ostringstream os;
  os << fixtures.size() << " fixtures of 1 to 4 tetrahedra, " << runs << " enumerations, " << rays << " rays";
  o.detail = os.str();
  return o;
}

// ------------------------------------------------------------------ 9
Outcome honest_unknown(const std::vector<Named>& corpus) {
  Outcome o;
  Verdict v = compare_graphs(get(corpus, "trefoil-loop"), get(corpus, "unknot-loop"));
  if (v.kind != VerdictKind::Unknown) o.fail(std::string("got ") + verdict_name(v.kind));
  if (v.unknownReasons.empty()) o.fail("no reason given");
  o.detail = "trefoil-loop vs unknot-loop: " + std::string(verdict_name(v.kind)) +
             (v.unknownReasons.empty() ? "" : " (" + v.unknownReasons[0] + ")");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int audits = 1000;
  int fixtures = 300;
  for (int i = 1; i + 1 < argc; ++i) {
    std::string a = argv[i];
    if (a == "--audits") audits = std::stoi(argv[++i]);
    else if (a == "--fixtures") fixtures = std::stoi(argv[++i]);
  }
  std::vector<Named> corpus = load_corpus();
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exterior structure", [&] { return exterior_structure(corpus); }},
      {"well-definedness across subdivision depth", [&] { return depth_independence(corpus); }},
      {"separability and reducibility", [&] { return separability(corpus); }},
      {"decomposition round trips", [&] { return round_trips(corpus); }},
      {"cut-vertex fidelity", [&] { return cut_vertices(corpus); }},
      {"spatial-tree fast path", [&] { return spatial_trees(corpus); }},
      {"soundness audits", [&] { return soundness(corpus, audits); }},
      {"normal surface enumeration oracle", [&] { return enumeration_oracle(fixtures); }},
      {"documented Unknown", [&] { return honest_unknown(corpus); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::ostringstream secs;
    secs.precision(1);
    secs << std::fixed << since(t0);
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << ": " << criteria[i].first << " - "
              << o.detail << " [" << secs.str() << " s]\n";
    for (const auto& f : o.failures) std::cout << "    " << f << "\n";
    std::cout.flush();
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
