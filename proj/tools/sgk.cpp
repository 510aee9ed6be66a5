// sgk: command-line front end for spatial graph comparison.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <openssl/sha.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgk/compile.hpp"
#include "sgk/pipeline.hpp"

using namespace sgk;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kCacheVersion = "sgk-cache-1";

struct RunConfig {
  std::size_t rays = EnumerationBudget{}.maxRays;
  std::size_t moves = PipelineOptions{}.simplifyMoves;
  std::size_t witness = PipelineOptions{}.witnessAttempts;
  double wall = PipelineOptions{}.wallSeconds;
  std::string format = "human";
  std::string cacheDir;
  std::uint64_t seed = 1;

  PipelineOptions options() const {
    PipelineOptions o;
    o.enumeration.maxRays = rays;
    o.enumeration.wallSeconds = std::min(o.enumeration.wallSeconds, wall);
    o.simplifyMoves = moves;
    o.witnessAttempts = witness;
    o.wallSeconds = wall;
    o.seed = seed;
    return o;
  }
  bool asJson() const { return format == "json"; }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
}

std::string content_hash(const std::string& s) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(s.data()), s.size(), digest);
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned char c : digest) os << std::setw(2) << static_cast<int>(c);
  return os.str();
}

class Cache {
 public:
  explicit Cache(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }
  std::optional<std::string> get(const std::string& kind, const std::string& key) const {
    if (dir_.empty()) return std::nullopt;
    fs::path p = path(kind, key);
    if (!fs::exists(p)) return std::nullopt;
    std::string text = slurp(p.string());
    auto nl = text.find('\n');
    if (nl == std::string::npos || text.substr(0, nl) != key) return std::nullopt;
    return text.substr(nl + 1);
  }
  void put(const std::string& kind, const std::string& key, const std::string& value) const {
    if (dir_.empty()) return;
    fs::path p = path(kind, key);
    fs::path tmp = p;
    tmp += ".tmp";
    spill(tmp.string(), key + "\n" + value);
    fs::rename(tmp, p);
  }

 private:
  fs::path path(const std::string& kind, const std::string& key) const {
    return fs::path(dir_) / (kind + "-" + content_hash(key) + ".json");
  }
  std::string dir_;
};

std::string cache_key(const std::vector<std::string>& parts, const PipelineOptions& opt) {
  std::string k = kCacheVersion;
  for (const auto& p : parts) k += "|" + content_hash(p);
  return k + "|" + opt.key();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string stem_of(const std::string& path) {
  fs::path p(path);
  return (p.parent_path() / p.stem()).string();
}

// .sgd, or a .sub with its .tri next to it
MarkedExterior load_exterior(const std::string& path, const PipelineOptions& opt) {
  if (ends_with(path, ".sub")) {
    auto [sub, meta] = read_sub(slurp(path));
    Triangulation sphere = read_tri(slurp(stem_of(path) + ".tri"));
    ExteriorOptions eo;
    eo.depth = opt.depth;
    eo.simplifyOptions = SimplifyOptions{opt.simplifyMoves};
    eo.simplifyOptions.seed = opt.seed;
    return build_exterior(sphere, sub, meta, eo);
  }
  return exterior_of(parse_file(path), opt);
}

void print(const RunConfig& rc, const json& j, const std::string& human) {
  if (rc.asJson())
    std::cout << j.dump(2) << "\n";
  else
    std::cout << human;
}

int cmd_validate(const RunConfig& rc, const std::string& path) {
  Diagram d = parse_file(path);
  validate(d);
  DecoratedGraph g = underlying_graph(d);
  DecorationType t = diagram_decoration_type(d);
  json j{{"file", path},
         {"valid", true},
         {"vertices", g.vertices.size()},
         {"edges", g.edges.size()},
         {"crossings", d.crossings.size()},
         {"components", component_count(g)},
         {"tree", is_tree(g)},
         {"decorations",
          {{"vertexColors", t.vertexColors}, {"edgeColors", t.edgeColors}, {"directions", t.directions}}}};
  std::ostringstream os;
  os << path << ": valid, " << g.vertices.size() << " vertices, " << g.edges.size() << " edges, "
     << d.crossings.size() << " crossings, " << component_count(g) << " components\n";
  print(rc, j, os.str());
  return 0;
}

int cmd_compile(const RunConfig& rc, const std::string& path, std::string out) {
  CompiledGraph c = compile_to_sphere(parse_file(path));
  if (out.empty()) out = stem_of(path);
  spill(out + ".tri", write_tri(c.sphere));
  spill(out + ".sub", write_sub(c.graph, c.metadata));
  json j{{"tri", out + ".tri"}, {"sub", out + ".sub"}, {"tetrahedra", c.sphere.size()}};
  print(rc, j, "wrote " + out + ".tri and " + out + ".sub (" + std::to_string(c.sphere.size()) + " tetrahedra)\n");
  return 0;
}

int cmd_exterior(const RunConfig& rc, const std::string& path) {
  MarkedExterior me = load_exterior(path, rc.options());
  json j = json::parse(exterior_to_json(me));
  std::ostringstream os;
  os << path << ": exterior with " << me.manifold.size() << " tetrahedra, " << me.regions.size() << " regions\n";
  print(rc, j, os.str());
  return 0;
}

int cmd_pieces(const RunConfig& rc, const std::string& path) {
  PipelineOptions opt = rc.options();
  DiagramPieces p = find_pieces(parse_file(path), opt);
  json j{{"pieces", json::array()}, {"certain", p.certain()}, {"unknownReasons", p.unknownReasons}};
  std::ostringstream os;
  os << p.pieces.size() << " piece" << (p.pieces.size() == 1 ? "" : "s") << (p.certain() ? "" : " (uncertain)")
     << "\n";
  for (std::size_t i = 0; i < p.graphs.size(); ++i) {
    const DecoratedGraph& g = p.graphs[i];
    std::vector<std::string> edges;
    for (const auto& e : g.edges) edges.push_back(e.id);
    j["pieces"].push_back({{"vertices", g.vertices}, {"edges", edges}});
    os << "  piece " << i + 1 << ": vertices";
    for (const auto& v : g.vertices) os << ' ' << v;
    os << "; edges";
    for (const auto& e : edges) os << ' ' << e;
    os << "\n";
  }
  for (const auto& r : p.unknownReasons) os << "  unknown: " << r << "\n";
  print(rc, j, os.str());
  return 0;
}

int cmd_blocks(const RunConfig& rc, const std::string& path) {
  PipelineOptions opt = rc.options();
  Pipeline pipe(opt);
  const DiagramPieces& p = pipe.pieces(parse_file(path));
  json j{{"pieces", json::array()}};
  std::ostringstream os;
  for (std::size_t i = 0; i < p.pieces.size(); ++i) {
    const DecoratedGraph& g = p.graphs[i];
    if (g.vertices.size() == 1 && g.edges.empty()) {
      j["pieces"].push_back({{"point", g.vertices[0]}});
      os << "piece " << i + 1 << ": point " << g.vertices[0] << "\n";
      continue;
    }
    const BlockTree& t = pipe.block_tree(p.pieces[i]);
    j["pieces"].push_back(json::parse(block_tree_to_json(t)));
    os << "piece " << i + 1 << ": " << t.skeleton.iNodes.size() << " blocks, " << t.skeleton.jNodes.size()
       << " cut vertices" << (t.certain() ? "" : " (uncertain)") << "\n";
    for (const auto& b : t.skeleton.iNodes) {
      os << "  " << b << ":";
      for (const auto& e : t.blockGraphs.at(b).edges) os << ' ' << e.id;
      os << "\n";
    }
  }
  print(rc, j, os.str());
  return 0;
}

int cmd_invariants(const RunConfig& rc, const std::string& path, const Cache& cache) {
  PipelineOptions opt = rc.options();
  Diagram d = parse_file(path);
  std::string key = cache_key({render(d)}, opt);
  std::string text;
  if (auto hit = cache.get("fingerprint", key)) {
    text = *hit;
  } else {
    text = fingerprint_to_json(invariant_fingerprint(exterior_of(d, opt)));
    cache.put("fingerprint", key, text);
  }
  json j = json::parse(text);
  std::ostringstream os;
  for (const auto& [k, v] : j.items()) os << k << ": " << v.get<std::string>() << "\n";
  print(rc, j, os.str());
  return 0;
}

int cmd_compare(const RunConfig& rc, const std::string& pa, const std::string& pb, const Cache& cache) {
  PipelineOptions opt = rc.options();
  Diagram a = parse_file(pa), b = parse_file(pb);
  std::string key = cache_key({render(a), render(b)}, opt);
  std::string text;
  if (auto hit = cache.get("verdict", key)) {
    text = *hit;
  } else {
    text = verdict_to_json(compare_graphs(a, b, opt), opt);
    cache.put("verdict", key, text);
  }
  json j = json::parse(text);
  std::string verdict = j["verdict"];
  std::ostringstream os;
  os << verdict << "\n";
  if (j.contains("witness")) os << "  witness: " << j["witness"]["method"].get<std::string>() << "\n";
  if (j.contains("obstruction"))
    os << "  obstruction: " << j["obstruction"]["kind"].get<std::string>() << " ("
       << j["obstruction"]["detail"].get<std::string>() << ")\n";
  if (j.contains("unknownReasons"))
    for (const auto& r : j["unknownReasons"]) os << "  unknown: " << r.get<std::string>() << "\n";
  print(rc, j, os.str());
  if (verdict == "Isomorphic") return 0;
  if (verdict == "NotIsomorphic") return 3;
  return 4;
}

int error_exit(const Error& e, const RunConfig& rc) {
  int code = 64 + static_cast<int>(e.code());
  if (rc.asJson()) {
    json j{{"error", error_code_name(e.code())}, {"message", e.what()}, {"exit", code}};
    if (e.line() > 0) j["line"] = e.line();
    if (e.column() > 0) j["column"] = e.column();
    std::cout << j.dump(2) << "\n";
  }
  std::cerr << "sgk: " << error_code_name(e.code()) << ": " << e.what();
  if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
  std::cerr << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sgk: spatial graph isomorphism through marked exteriors"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig rc;
  if (const char* env = std::getenv("SGK_CACHE_DIR")) rc.cacheDir = env;
  auto positive = CLI::PositiveNumber;
  app.add_option("--budget-rays", rc.rays, "vertex rays kept during normal surface enumeration")->check(positive);
  app.add_option("--budget-moves", rc.moves, "simplification moves per exterior")->check(positive);
  app.add_option("--budget-witness", rc.witness, "re-simplifications tried per block witness search")
      ->check(positive);
  app.add_option("--budget-wall", rc.wall, "wall-clock seconds per comparison")->check(positive);
  app.add_option("--format", rc.format, "output format")->check(CLI::IsMember({"human", "json"}));
  app.add_option("--cache-dir", rc.cacheDir, "result cache directory (env SGK_CACHE_DIR)");
  app.add_option("--seed", rc.seed, "seed for randomized simplification");

  std::string a, b, out;
  auto* validate = app.add_subcommand("validate", "parse and check a diagram");
  validate->add_option("file", a, ".sgd diagram")->required();
  auto* compile = app.add_subcommand("compile", "write the compiled sphere (.tri) and graph (.sub)");
  compile->add_option("file", a, ".sgd diagram")->required();
  compile->add_option("-o,--output", out, "output path without extension");
  auto* exterior = app.add_subcommand("exterior", "build the marked exterior");
  exterior->add_option("file", a, ".sgd diagram or .sub next to its .tri")->required();
  auto* pieces = app.add_subcommand("pieces", "split into pieces along reducing spheres");
  pieces->add_option("file", a, ".sgd diagram")->required();
  auto* blocks = app.add_subcommand("blocks", "tree of blocks of every piece");
  blocks->add_option("file", a, ".sgd diagram")->required();
  auto* invariants = app.add_subcommand("invariants", "invariant fingerprint of the exterior");
  invariants->add_option("file", a, ".sgd diagram")->required();
  auto* compare = app.add_subcommand("compare", "decide isomorphism of two spatial graphs");
  compare->add_option("a", a, "first .sgd diagram")->required();
  compare->add_option("b", b, "second .sgd diagram")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc0 = app.exit(e);
    return rc0 == 0 ? 0 : 64 + static_cast<int>(ErrorCode::Usage);
  }

  try {
    Cache cache(rc.cacheDir);
    if (*validate) return cmd_validate(rc, a);
    if (*compile) return cmd_compile(rc, a, out);
    if (*exterior) return cmd_exterior(rc, a);
    if (*pieces) return cmd_pieces(rc, a);
    if (*blocks) return cmd_blocks(rc, a);
    if (*invariants) return cmd_invariants(rc, a, cache);
    if (*compare) return cmd_compare(rc, a, b, cache);
  } catch (const Error& e) {
    return error_exit(e, rc);
  } catch (const fs::filesystem_error& e) {
    return error_exit(Error(ErrorCode::Io, e.what()), rc);
  } catch (const std::exception& e) {
    std::cerr << "sgk: internal error: " << e.what() << "\n";
    return 99;
  }
  return 64 + static_cast<int>(ErrorCode::Usage);
}
