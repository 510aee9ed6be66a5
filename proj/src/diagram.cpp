#include "sgk/diagram.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace sgk {

namespace {

bool valid_ident(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == ':' || c == '-' || c == '/'))
      return false;
  return true;
}

struct Token {
  std::string text;
  int col;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#') ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

unsigned parse_uint(const Token& t, const std::string& value, int line) {
  if (value.empty() || value.size() > 9) throw Error(ErrorCode::Syntax, "bad unsigned value '" + t.text + "'", line, t.col);
  for (char c : value)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error(ErrorCode::Syntax, "bad unsigned value '" + t.text + "'", line, t.col);
  return static_cast<unsigned>(std::stoul(value));
}

using LineMap = std::map<std::string, std::pair<int, int>>;

DiagramInfo validate_impl(const Diagram& d, const LineMap* lines) {
  auto fail = [&](ErrorCode c, const std::string& key, const std::string& msg) -> Error {
    if (lines) {
      auto it = lines->find(key);
      if (it != lines->end()) return Error(c, msg, it->second.first, it->second.second);
    }
    return Error(c, msg);
  };
  DiagramInfo info;
  info.vertexCount = static_cast<int>(d.vertices.size());
  info.crossingCount = static_cast<int>(d.crossings.size());
  std::map<std::string, int> nodeIndex;
  for (std::size_t i = 0; i < d.vertices.size(); ++i) {
    const auto& v = d.vertices[i];
    if (!valid_ident(v.id)) throw fail(ErrorCode::Syntax, "vertex:" + v.id, "invalid vertex id '" + v.id + "'");
    if (!nodeIndex.emplace(v.id, static_cast<int>(i)).second)
      throw fail(ErrorCode::DuplicateId, "vertex:" + v.id, "duplicate node id " + v.id);
    info.rotation.push_back(v.rotation);
  }
  for (std::size_t i = 0; i < d.crossings.size(); ++i) {
    const auto& c = d.crossings[i];
    if (!nodeIndex.emplace(c.id, info.vertexCount + static_cast<int>(i)).second)
      throw fail(ErrorCode::DuplicateId, "crossing:" + c.id, "duplicate node id " + c.id);
    info.rotation.push_back({c.arcs.begin(), c.arcs.end()});
  }
  // decoration totality
  {
    std::size_t vc = 0, ec = 0, dc = 0;
    for (const auto& v : d.vertices) vc += v.color.has_value();
    for (const auto& e : d.edges) {
      ec += e.color.has_value();
      dc += e.direction.has_value();
    }
    if (vc && vc != d.vertices.size())
      throw fail(ErrorCode::PartialDecoration, "", "vertex colouring must be given for every vertex or none");
    if (ec && ec != d.edges.size())
      throw fail(ErrorCode::PartialDecoration, "", "edge colouring must be given for every edge or none");
    if (dc && dc != d.edges.size())
      throw fail(ErrorCode::PartialDecoration, "", "edge directions must be given for every edge or none");
  }
  // arc ends
  std::map<std::string, std::vector<DiagramInfo::Slot>> ends;
  for (std::size_t n = 0; n < info.rotation.size(); ++n)
    for (std::size_t p = 0; p < info.rotation[n].size(); ++p) {
      const auto& a = info.rotation[n][p];
      if (!valid_ident(a)) throw fail(ErrorCode::Syntax, "arc:" + a, "invalid arc label '" + a + "'");
      ends[a].push_back({static_cast<int>(n), static_cast<int>(p)});
    }
  for (const auto& [a, v] : ends) {
    if (v.size() != 2)
      throw fail(ErrorCode::ArcMultiplicity, "arc:" + a,
                 "arc " + a + " occurs " + std::to_string(v.size()) + " times (expected 2)");
    info.arcEnds[a] = {v[0], v[1]};
  }
  // edge partition
  std::set<std::string> edgeIds;
  std::map<std::string, std::string> arcEdge;
  for (const auto& e : d.edges) {
    if (!valid_ident(e.id)) throw fail(ErrorCode::Syntax, "edge:" + e.id, "invalid edge id");
    if (!edgeIds.insert(e.id).second) throw fail(ErrorCode::DuplicateId, "edge:" + e.id, "duplicate edge id " + e.id);
    if (e.arcs.empty()) throw fail(ErrorCode::EdgePartition, "edge:" + e.id, "edge " + e.id + " has no arcs");
    for (const auto& a : e.arcs) {
      if (!info.arcEnds.count(a))
        throw fail(ErrorCode::ArcMultiplicity, "edge:" + e.id, "edge " + e.id + " uses unknown arc " + a);
      if (!arcEdge.emplace(a, e.id).second)
        throw fail(ErrorCode::EdgePartition, "edge:" + e.id, "arc " + a + " belongs to two edges");
    }
  }
  for (const auto& [a, s] : info.arcEnds)
    if (!arcEdge.count(a)) throw fail(ErrorCode::EdgePartition, "arc:" + a, "arc " + a + " belongs to no edge");
  info.arcEdge = arcEdge;
  auto isV = [&](const DiagramInfo::Slot& s) { return s.node < info.vertexCount; };
  auto other = [&](const std::string& a, const DiagramInfo::Slot& s) {
    const auto& e2 = info.arcEnds.at(a);
    return e2[0] == s ? e2[1] : e2[0];
  };
  std::set<DiagramInfo::Slot> markedSlots;
  for (std::size_t n = 0; n < d.vertices.size(); ++n)
    for (std::size_t p : d.vertices[n].outSlots) {
      if (p >= d.vertices[n].rotation.size())
        throw fail(ErrorCode::Syntax, "vertex:" + d.vertices[n].id, "out-mark beyond rotation");
      markedSlots.insert({static_cast<int>(n), static_cast<int>(p)});
    }
  std::set<DiagramInfo::Slot> usedMarks;
  for (const auto& e : d.edges) {
    const std::string key = "edge:" + e.id;
    std::vector<DiagramInfo::Step> steps;
    const auto& x1 = info.arcEnds.at(e.arcs.front());
    DiagramInfo::Slot start;
    if (e.arcs.size() == 1) {
      if (!isV(x1[0]) || !isV(x1[1]))
        throw fail(ErrorCode::EdgePartition, key, "single-arc edge " + e.id + " must join vertex slots");
      if (x1[0].node == x1[1].node && e.direction) {
        bool m0 = markedSlots.count(x1[0]), m1 = markedSlots.count(x1[1]);
        if (m0 == m1)
          throw fail(ErrorCode::EdgePartition, key,
                     "directed single-arc loop " + e.id + " needs exactly one out-marked slot");
        start = m0 ? x1[0] : x1[1];
        usedMarks.insert(start);
      } else if (e.direction) {
        const std::string& from = e.direction->first;
        if (d.vertices[x1[0].node].id == from)
          start = x1[0];
        else if (d.vertices[x1[1].node].id == from)
          start = x1[1];
        else
          throw fail(ErrorCode::EdgePartition, key, "direction of " + e.id + " names a vertex off the edge");
      } else {
        start = std::min(x1[0], x1[1]);
      }
    } else {
      if (isV(x1[0]) == isV(x1[1]))
        throw fail(ErrorCode::EdgePartition, key, "first arc of " + e.id + " must have exactly one vertex end");
      start = isV(x1[0]) ? x1[0] : x1[1];
    }
    DiagramInfo::Slot cur = start;
    for (std::size_t k = 0; k < e.arcs.size(); ++k) {
      const auto& a = e.arcs[k];
      if (info.rotation[cur.node][cur.pos] != a)
        throw fail(ErrorCode::EdgePartition, key, "arc " + a + " does not continue edge " + e.id);
      DiagramInfo::Slot nxt = other(a, cur);
      steps.push_back({a, cur, nxt});
      bool last = k + 1 == e.arcs.size();
      if (last) {
        if (!isV(nxt)) throw fail(ErrorCode::EdgePartition, key, "edge " + e.id + " does not end at a vertex");
      } else {
        if (isV(nxt))
          throw fail(ErrorCode::EdgePartition, key, "edge " + e.id + " meets a vertex before its last arc");
        cur = {nxt.node, (nxt.pos + 2) % 4};
      }
    }
    std::string sv = d.vertices[steps.front().from.node].id, tv = d.vertices[steps.back().to.node].id;
    if (e.direction) {
      if (e.direction->first != sv || e.direction->second != tv)
        throw fail(ErrorCode::EdgePartition, key,
                   "edge " + e.id + " arcs must be listed from its source " + e.direction->first);
    }
    info.edgeEnds[e.id] = {sv, tv};
    info.edgeSteps[e.id] = std::move(steps);
  }
  if (usedMarks.size() != markedSlots.size())
    throw fail(ErrorCode::EdgePartition, "", "out-marks are only allowed on directed single-arc loops");
  // every crossing strand traversed exactly once is implied by the arc partition; check
  // that strands pair opposite slots
  for (const auto& [eid, steps] : info.edgeSteps)
    for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
      const auto& to = steps[k].to;
      const auto& fr = steps[k + 1].from;
      if (to.node != fr.node || (to.pos + 2) % 4 != fr.pos)
        throw fail(ErrorCode::EdgePartition, "edge:" + eid, "edge " + eid + " does not pass straight through");
    }
  // components and faces
  std::size_t N = info.rotation.size();
  std::vector<int> parent(N);
  for (std::size_t i = 0; i < N; ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& [a, s] : info.arcEnds) parent[find(s[0].node)] = find(s[1].node);
  std::map<int, int> compId;
  info.nodeComponent.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    int r = find(static_cast<int>(i));
    auto it = compId.find(r);
    if (it == compId.end()) it = compId.emplace(r, static_cast<int>(compId.size())).first;
    info.nodeComponent[i] = it->second;
  }
  info.componentCount = static_cast<int>(compId.size());
  std::set<DiagramInfo::Slot> seen;
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t p = 0; p < info.rotation[n].size(); ++p) {
      DiagramInfo::Slot s{static_cast<int>(n), static_cast<int>(p)};
      if (seen.count(s)) continue;
      std::vector<DiagramInfo::Slot> face;
      DiagramInfo::Slot c = s;
      do {
        seen.insert(c);
        face.push_back(c);
        c = info.faceNext(c);
      } while (!(c == s));
      info.faces.push_back(std::move(face));
    }
  std::vector<long> V(info.componentCount, 0), E(info.componentCount, 0), F(info.componentCount, 0);
  for (std::size_t n = 0; n < N; ++n) V[info.nodeComponent[n]]++;
  for (const auto& [a, s] : info.arcEnds) E[info.nodeComponent[s[0].node]]++;
  for (const auto& f : info.faces) F[info.nodeComponent[f.front().node]]++;
  for (int c = 0; c < info.componentCount; ++c) {
    long faces = F[c] == 0 ? 1 : F[c];
    if (V[c] - E[c] + faces != 2)
      throw fail(ErrorCode::Nonplanar, "", "rotation system is not planar (V-E+F = " +
                                               std::to_string(V[c] - E[c] + faces) + " on a component)");
  }
  return info;
}

}  // namespace

DiagramInfo::Slot DiagramInfo::twin(const Slot& s) const {
  const auto& a = rotation[s.node][s.pos];
  const auto& e = arcEnds.at(a);
  return e[0] == s ? e[1] : e[0];
}

DiagramInfo::Slot DiagramInfo::faceNext(const Slot& s) const {
  Slot t = twin(s);
  int deg = static_cast<int>(rotation[t.node].size());
  return {t.node, (t.pos - 1 + deg) % deg};
}

DecorationType diagram_decoration_type(const Diagram& d) {
  DecorationType t;
  for (const auto& v : d.vertices) t.vertexColors |= v.color.has_value();
  for (const auto& e : d.edges) {
    t.edgeColors |= e.color.has_value();
    t.directions |= e.direction.has_value();
  }
  return t;
}

DiagramInfo validate(const Diagram& d) { return validate_impl(d, nullptr); }

Diagram parse(const std::string& text) {
  Diagram d;
  LineMap lines;
  std::map<std::string, std::size_t> vertexPos;
  std::map<std::string, std::pair<std::vector<std::string>, std::set<std::size_t>>> vnodes;
  std::map<std::string, std::pair<int, int>> vnodeLines;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0].text;
    auto need_ident = [&](const Token& t) {
      if (!valid_ident(t.text)) throw Error(ErrorCode::Syntax, "invalid identifier '" + t.text + "'", ln, t.col);
    };
    if (kw == "vertex") {
      if (toks.size() < 2 || toks.size() > 3) throw Error(ErrorCode::Syntax, "expected: vertex <id> [color=<uint>]", ln, toks[0].col);
      need_ident(toks[1]);
      VertexNode v;
      v.id = toks[1].text;
      if (toks.size() == 3) {
        if (toks[2].text.rfind("color=", 0) != 0) throw Error(ErrorCode::Syntax, "unexpected token '" + toks[2].text + "'", ln, toks[2].col);
        v.color = parse_uint(toks[2], toks[2].text.substr(6), ln);
      }
      if (vertexPos.count(v.id)) throw Error(ErrorCode::DuplicateId, "duplicate vertex " + v.id, ln, toks[1].col);
      vertexPos[v.id] = d.vertices.size();
      lines["vertex:" + v.id] = {ln, toks[1].col};
      d.vertices.push_back(std::move(v));
    } else if (kw == "crossing") {
      if (toks.size() != 6) throw Error(ErrorCode::Syntax, "expected: crossing <id> <a> <b> <c> <d>", ln, toks[0].col);
      Crossing c;
      need_ident(toks[1]);
      c.id = toks[1].text;
      for (int k = 0; k < 4; ++k) {
        need_ident(toks[2 + k]);
        c.arcs[k] = toks[2 + k].text;
        if (!lines.count("arc:" + c.arcs[k])) lines["arc:" + c.arcs[k]] = {ln, toks[2 + k].col};
      }
      lines["crossing:" + c.id] = {ln, toks[1].col};
      d.crossings.push_back(std::move(c));
    } else if (kw == "vnode") {
      if (toks.size() < 3) throw Error(ErrorCode::Syntax, "expected: vnode <id> <arc>...", ln, toks[0].col);
      need_ident(toks[1]);
      if (vnodes.count(toks[1].text)) throw Error(ErrorCode::DuplicateId, "duplicate vnode " + toks[1].text, ln, toks[1].col);
      std::vector<std::string> rot;
      std::set<std::size_t> marks;
      for (std::size_t k = 2; k < toks.size(); ++k) {
        std::string a = toks[k].text;
        if (!a.empty() && a.back() == '^') {
          a.pop_back();
          marks.insert(k - 2);
        }
        if (!valid_ident(a)) throw Error(ErrorCode::Syntax, "invalid arc label '" + toks[k].text + "'", ln, toks[k].col);
        if (!lines.count("arc:" + a)) lines["arc:" + a] = {ln, toks[k].col};
        rot.push_back(a);
      }
      vnodes[toks[1].text] = {rot, marks};
      vnodeLines[toks[1].text] = {ln, toks[1].col};
    } else if (kw == "edge") {
      if (toks.size() < 3) throw Error(ErrorCode::Syntax, "expected: edge <id> <arc>... [options]", ln, toks[0].col);
      need_ident(toks[1]);
      DiagramEdge e;
      e.id = toks[1].text;
      std::optional<std::string> from, to;
      bool options = false;
      for (std::size_t k = 2; k < toks.size(); ++k) {
        const auto& t = toks[k];
        auto eq = t.text.find('=');
        if (eq == std::string::npos) {
          if (options) throw Error(ErrorCode::Syntax, "arc label after options", ln, t.col);
          need_ident(t);
          e.arcs.push_back(t.text);
          continue;
        }
        options = true;
        std::string key = t.text.substr(0, eq), val = t.text.substr(eq + 1);
        if (key == "color") {
          if (e.color) throw Error(ErrorCode::Syntax, "repeated color", ln, t.col);
          e.color = parse_uint(t, val, ln);
        } else if (key == "from") {
          if (from || !valid_ident(val)) throw Error(ErrorCode::Syntax, "bad from=", ln, t.col);
          from = val;
        } else if (key == "to") {
          if (to || !valid_ident(val)) throw Error(ErrorCode::Syntax, "bad to=", ln, t.col);
          to = val;
        } else {
          throw Error(ErrorCode::Syntax, "unknown option '" + key + "'", ln, t.col);
        }
      }
      if (e.arcs.empty()) throw Error(ErrorCode::Syntax, "edge without arcs", ln, toks[0].col);
      if (from.has_value() != to.has_value()) throw Error(ErrorCode::Syntax, "from= and to= must appear together", ln, toks[0].col);
      if (from) e.direction = std::make_pair(*from, *to);
      lines["edge:" + e.id] = {ln, toks[1].col};
      d.edges.push_back(std::move(e));
    } else {
      throw Error(ErrorCode::Syntax, "unknown declaration '" + kw + "'", ln, toks[0].col);
    }
  }
  for (auto& [id, rm] : vnodes) {
    auto it = vertexPos.find(id);
    if (it == vertexPos.end()) {
      auto p = vnodeLines[id];
      throw Error(ErrorCode::MissingVertex, "vnode for undeclared vertex " + id, p.first, p.second);
    }
    d.vertices[it->second].rotation = rm.first;
    d.vertices[it->second].outSlots = rm.second;
  }
  for (const auto& e : d.edges)
    if (e.direction) {
      for (const auto& v : {e.direction->first, e.direction->second})
        if (!vertexPos.count(v)) {
          auto p = lines["edge:" + e.id];
          throw Error(ErrorCode::MissingVertex, "edge " + e.id + " refers to unknown vertex " + v, p.first, p.second);
        }
    }
  validate_impl(d, &lines);
  return d;
}

Diagram parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string render(const Diagram& d) {
  std::ostringstream os;
  for (const auto& v : d.vertices) {
    os << "vertex " << v.id;
    if (v.color) os << " color=" << *v.color;
    os << '\n';
  }
  for (const auto& v : d.vertices) {
    if (v.rotation.empty()) continue;
    os << "vnode " << v.id;
    for (std::size_t p = 0; p < v.rotation.size(); ++p) {
      os << ' ' << v.rotation[p];
      if (v.outSlots.count(p)) os << '^';
    }
    os << '\n';
  }
  for (const auto& c : d.crossings) os << "crossing " << c.id << ' ' << c.arcs[0] << ' ' << c.arcs[1] << ' ' << c.arcs[2] << ' ' << c.arcs[3] << '\n';
  for (const auto& e : d.edges) {
    os << "edge " << e.id;
    for (const auto& a : e.arcs) os << ' ' << a;
    if (e.color) os << " color=" << *e.color;
    if (e.direction) os << " from=" << e.direction->first << " to=" << e.direction->second;
    os << '\n';
  }
  return os.str();
}

DecoratedGraph underlying_graph(const Diagram& d) {
  DiagramInfo info = validate(d);
  DecorationType t = diagram_decoration_type(d);
  DecoratedGraph g;
  for (const auto& v : d.vertices) g.vertices.push_back(v.id);
  if (t.vertexColors) {
    g.vertexColor.emplace();
    for (const auto& v : d.vertices) (*g.vertexColor)[v.id] = *v.color;
  }
  if (t.edgeColors) g.edgeColor.emplace();
  if (t.directions) g.edgeDirection.emplace();
  for (const auto& e : d.edges) {
    const auto& [s, tv] = info.edgeEnds.at(e.id);
    g.edges.push_back({e.id, s, tv});
    if (t.edgeColors) (*g.edgeColor)[e.id] = *e.color;
    if (t.directions) (*g.edgeDirection)[e.id] = *e.direction;
  }
  g.normalize();
  return g;
}

Diagram relabel_prefix(const Diagram& d, const std::string& p) {
  Diagram r = d;
  for (auto& v : r.vertices) {
    v.id = p + v.id;
    for (auto& a : v.rotation) a = p + a;
  }
  for (auto& c : r.crossings) {
    c.id = p + c.id;
    for (auto& a : c.arcs) a = p + a;
  }
  for (auto& e : r.edges) {
    e.id = p + e.id;
    for (auto& a : e.arcs) a = p + a;
    if (e.direction) e.direction = std::make_pair(p + e.direction->first, p + e.direction->second);
  }
  return r;
}

Diagram disjoint_union(const Diagram& d1, const Diagram& d2) {
  auto t1 = diagram_decoration_type(d1), t2 = diagram_decoration_type(d2);
  bool empty1 = d1.vertices.empty(), empty2 = d2.vertices.empty();
  if (!empty1 && !empty2 && !(t1 == t2)) throw Error(ErrorCode::DecorationMismatch, "decoration types differ");
  Diagram a = relabel_prefix(d1, "a."), b = relabel_prefix(d2, "b.");
  a.vertices.insert(a.vertices.end(), b.vertices.begin(), b.vertices.end());
  a.crossings.insert(a.crossings.end(), b.crossings.begin(), b.crossings.end());
  a.edges.insert(a.edges.end(), b.edges.begin(), b.edges.end());
  validate(a);
  return a;
}

Diagram vertex_sum(const Diagram& d1, const std::string& v1, const Diagram& d2, const std::string& v2) {
  if (!(diagram_decoration_type(d1) == diagram_decoration_type(d2)))
    throw Error(ErrorCode::DecorationMismatch, "decoration types differ");
  auto findV = [](const Diagram& d, const std::string& id) -> const VertexNode* {
    for (const auto& v : d.vertices)
      if (v.id == id) return &v;
    return nullptr;
  };
  const VertexNode* a = findV(d1, v1);
  const VertexNode* b = findV(d2, v2);
  if (!a || !b) throw Error(ErrorCode::MissingVertex, "vertex-sum basepoint missing");
  if (a->color != b->color) throw Error(ErrorCode::ColorMismatch, "basepoints carry different colours");
  Diagram A = relabel_prefix(d1, "a."), B = relabel_prefix(d2, "b.");
  std::string merged = "a." + v1, gone = "b." + v2;
  VertexNode* va = nullptr;
  for (auto& v : A.vertices)
    if (v.id == merged) va = &v;
  VertexNode vb;
  for (const auto& v : B.vertices)
    if (v.id == gone) vb = v;
  // rotate d2's rotation to start at its smallest label
  std::vector<std::string> r2;
  std::vector<bool> m2;
  if (!vb.rotation.empty()) {
    std::size_t s = std::min_element(vb.rotation.begin(), vb.rotation.end()) - vb.rotation.begin();
    for (std::size_t k = 0; k < vb.rotation.size(); ++k) {
      std::size_t p = (s + k) % vb.rotation.size();
      r2.push_back(vb.rotation[p]);
      m2.push_back(vb.outSlots.count(p) > 0);
    }
  }
  std::vector<std::string> r1 = va->rotation;
  std::vector<bool> m1;
  for (std::size_t p = 0; p < r1.size(); ++p) m1.push_back(va->outSlots.count(p) > 0);
  std::size_t at = r1.empty() ? 0 : (std::min_element(r1.begin(), r1.end()) - r1.begin()) + 1;
  r1.insert(r1.begin() + at, r2.begin(), r2.end());
  m1.insert(m1.begin() + at, m2.begin(), m2.end());
  va->rotation = r1;
  va->outSlots.clear();
  for (std::size_t p = 0; p < m1.size(); ++p)
    if (m1[p]) va->outSlots.insert(p);
  for (const auto& v : B.vertices)
    if (v.id != gone) A.vertices.push_back(v);
  A.crossings.insert(A.crossings.end(), B.crossings.begin(), B.crossings.end());
  for (auto e : B.edges) {
    if (e.direction) {
      if (e.direction->first == gone) e.direction->first = merged;
      if (e.direction->second == gone) e.direction->second = merged;
    }
    A.edges.push_back(e);
  }
  validate(A);
  return A;
}

Diagram mirror(const Diagram& d) {
  Diagram r = d;
  for (auto& c : r.crossings) c.arcs = {c.arcs[1], c.arcs[2], c.arcs[3], c.arcs[0]};
  return r;
}

Diagram recolor_vertices(const Diagram& d, const std::map<std::string, unsigned>& colors) {
  Diagram r = d;
  for (auto& v : r.vertices) {
    auto it = colors.find(v.id);
    v.color = it == colors.end() ? 0u : it->second;
  }
  return r;
}

Diagram restrict_diagram(const Diagram& d, const std::set<std::string>& vs, const std::set<std::string>& es) {
  DiagramInfo info = validate(d);
  std::vector<char> keepCrossing(d.crossings.size(), 0);
  for (std::size_t c = 0; c < d.crossings.size(); ++c) {
    const auto& cr = d.crossings[c];
    bool s0 = es.count(info.arcEdge.at(cr.arcs[0])) > 0;
    bool s1 = es.count(info.arcEdge.at(cr.arcs[1])) > 0;
    keepCrossing[c] = s0 && s1;
  }
  std::map<std::string, std::string> arcRename;  // original arc -> surviving arc label
  Diagram r;
  for (const auto& e : d.edges) {
    if (!es.count(e.id)) continue;
    const auto& steps = info.edgeSteps.at(e.id);
    DiagramEdge ne = e;
    ne.arcs.clear();
    std::string cur;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      bool boundary = k == 0;
      if (k > 0) {
        int node = steps[k].from.node;
        boundary = keepCrossing[node - info.vertexCount];
      }
      if (boundary) {
        cur = steps[k].arc;
        ne.arcs.push_back(cur);
      }
      arcRename[steps[k].arc] = cur;
    }
    r.edges.push_back(std::move(ne));
  }
  for (const auto& v : d.vertices) {
    if (!vs.count(v.id)) {
      for (const auto& a : v.rotation)
        if (es.count(info.arcEdge.at(a)))
          throw Error(ErrorCode::MissingVertex, "restriction drops vertex " + v.id + " but keeps an incident edge");
      continue;
    }
    VertexNode nv;
    nv.id = v.id;
    nv.color = v.color;
    for (std::size_t p = 0; p < v.rotation.size(); ++p) {
      const auto& a = v.rotation[p];
      if (!es.count(info.arcEdge.at(a))) continue;
      if (v.outSlots.count(p)) nv.outSlots.insert(nv.rotation.size());
      nv.rotation.push_back(arcRename.at(a));
    }
    r.vertices.push_back(std::move(nv));
  }
  for (std::size_t c = 0; c < d.crossings.size(); ++c) {
    if (!keepCrossing[c]) continue;
    Crossing nc = d.crossings[c];
    for (auto& a : nc.arcs) a = arcRename.at(a);
    r.crossings.push_back(nc);
  }
  validate(r);
  return r;
}

// ------------------------------------------------------------ canonical form

CanonicalDiagram canonical_diagram(const Diagram& d) {
  DiagramInfo info = validate(d);
  DecorationType t = diagram_decoration_type(d);
  std::size_t N = info.rotation.size();
  struct Traversal {
    std::string code;
    std::vector<int> order;      // nodes in discovery order
    std::vector<int> entry;      // per node entry slot
    std::vector<std::string> arcs;   // arcs in discovery order
    std::vector<std::string> edges;  // edges in discovery order
  };
  auto traverse = [&](int n0, int p0) {
    Traversal tr;
    tr.entry.assign(N, -1);
    std::vector<int> label(N, -1);
    std::map<std::string, int> arcLabel, edgeLabel;
    std::ostringstream os;
    label[n0] = 0;
    tr.entry[n0] = p0;
    tr.order.push_back(n0);
    for (std::size_t h = 0; h < tr.order.size(); ++h) {
      int u = tr.order[h];
      int deg = static_cast<int>(info.rotation[u].size());
      int e = tr.entry[u];
      if (info.isVertex(u)) {
        const auto& vx = d.vertices[u];
        os << 'V' << (vx.color ? static_cast<long>(*vx.color) : -1L) << '/' << deg;
      } else {
        os << 'C' << (e % 2);
      }
      os << '[';
      for (int k = 0; k < deg; ++k) {
        DiagramInfo::Slot s{u, (e + k) % deg};
        DiagramInfo::Slot w = info.twin(s);
        if (label[w.node] < 0) {
          label[w.node] = static_cast<int>(tr.order.size());
          tr.entry[w.node] = w.pos;
          tr.order.push_back(w.node);
        }
        int wdeg = static_cast<int>(info.rotation[w.node].size());
        int off = (w.pos - tr.entry[w.node] + wdeg) % wdeg;
        const std::string& a = info.rotation[u][s.pos];
        os << label[w.node] << '.' << off;
        if (!arcLabel.count(a)) {
          arcLabel[a] = static_cast<int>(tr.arcs.size());
          tr.arcs.push_back(a);
          const std::string& eid = info.arcEdge.at(a);
          auto it = edgeLabel.find(eid);
          if (it == edgeLabel.end()) {
            it = edgeLabel.emplace(eid, static_cast<int>(tr.edges.size())).first;
            tr.edges.push_back(eid);
            const DiagramEdge* de = nullptr;
            for (const auto& x : d.edges)
              if (x.id == eid) de = &x;
            os << "{e" << (de->color ? static_cast<long>(*de->color) : -1L) << '}';
          }
          os << 'e' << it->second;
          if (t.directions) {
            // does the edge traverse this arc leaving through slot s?
            for (const auto& st : info.edgeSteps.at(eid))
              if (st.arc == a) os << (st.from == s ? '>' : '<');
          }
        }
        os << ',';
      }
      os << ']';
    }
    tr.code = os.str();
    return tr;
  };
  // components
  std::vector<std::vector<int>> compNodes(info.componentCount);
  for (std::size_t n = 0; n < N; ++n) compNodes[info.nodeComponent[n]].push_back(static_cast<int>(n));
  std::vector<Traversal> best(info.componentCount);
  for (int c = 0; c < info.componentCount; ++c) {
    bool have = false;
    for (int n : compNodes[c]) {
      int deg = static_cast<int>(info.rotation[n].size());
      if (deg == 0) {
        Traversal tr;
        const auto& vx = d.vertices[n];
        tr.code = "I" + std::to_string(vx.color ? static_cast<long>(*vx.color) : -1L);
        tr.order = {n};
        tr.entry.assign(N, -1);
        tr.entry[n] = 0;
        best[c] = tr;
        have = true;
        continue;
      }
      for (int p = 0; p < deg; ++p) {
        Traversal tr = traverse(n, p);
        if (!have || tr.code < best[c].code) {
          best[c] = std::move(tr);
          have = true;
        }
      }
    }
  }
  std::vector<int> compOrder(info.componentCount);
  for (int c = 0; c < info.componentCount; ++c) compOrder[c] = c;
  std::stable_sort(compOrder.begin(), compOrder.end(), [&](int a, int b) { return best[a].code < best[b].code; });
  CanonicalDiagram out;
  std::ostringstream code;
  code << 'T' << t.vertexColors << t.edgeColors << t.directions << ';';
  for (int c : compOrder) code << '(' << best[c].code << ')';
  out.code = code.str();
  // relabel
  std::map<std::string, std::string> arcMap;
  int nv = 0, nc = 0, na = 0, ne = 0;
  std::vector<int> entryOf(N, 0);
  std::vector<std::string> nodeName(N);
  for (int c : compOrder) {
    for (int n : best[c].order) {
      entryOf[n] = best[c].entry[n];
      if (info.isVertex(n)) {
        nodeName[n] = "v" + std::to_string(nv++);
        out.vertexMap[d.vertices[n].id] = nodeName[n];
      } else {
        nodeName[n] = "c" + std::to_string(nc++);
      }
    }
    for (const auto& a : best[c].arcs) arcMap[a] = "a" + std::to_string(na++);
    for (const auto& e : best[c].edges) out.edgeMap[e] = "e" + std::to_string(ne++);
  }
  std::vector<int> nodesInOrder;
  for (int c : compOrder)
    for (int n : best[c].order) nodesInOrder.push_back(n);
  for (int n : nodesInOrder) {
    int deg = static_cast<int>(info.rotation[n].size());
    int e = entryOf[n];
    if (info.isVertex(n)) {
      const auto& vx = d.vertices[n];
      VertexNode v;
      v.id = nodeName[n];
      v.color = vx.color;
      for (int k = 0; k < deg; ++k) {
        int p = (e + k) % deg;
        if (vx.outSlots.count(p)) v.outSlots.insert(k);
        v.rotation.push_back(arcMap.at(info.rotation[n][p]));
      }
      out.diagram.vertices.push_back(std::move(v));
    } else {
      Crossing cr;
      cr.id = nodeName[n];
      int s = (e % 2 == 0) ? e : e + 1;
      for (int k = 0; k < 4; ++k) cr.arcs[k] = arcMap.at(info.rotation[n][(s + k) % 4]);
      out.diagram.crossings.push_back(std::move(cr));
    }
  }
  std::vector<std::pair<std::string, DiagramEdge>> edges;
  for (const auto& e : d.edges) {
    DiagramEdge x = e;
    x.id = out.edgeMap.at(e.id);
    for (auto& a : x.arcs) a = arcMap.at(a);
    if (x.direction) {
      x.direction = std::make_pair(out.vertexMap.at(e.direction->first), out.vertexMap.at(e.direction->second));
    } else if (x.arcs.size() > 1) {
      // undirected: list from the end whose first arc has the smaller label
      auto num = [](const std::string& s) { return std::stoi(s.substr(1)); };
      if (num(x.arcs.back()) < num(x.arcs.front())) std::reverse(x.arcs.begin(), x.arcs.end());
    }
    edges.push_back({x.id, x});
  }
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    return std::stoi(a.first.substr(1)) < std::stoi(b.first.substr(1));
  });
  for (auto& [k, e] : edges) out.diagram.edges.push_back(e);
  validate(out.diagram);
  return out;
}

}  // namespace sgk
