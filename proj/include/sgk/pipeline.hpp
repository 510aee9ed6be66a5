#pragma once
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sgk/compile.hpp"
#include "sgk/diagram.hpp"
#include "sgk/exterior.hpp"
#include "sgk/graphs.hpp"
#include "sgk/surfaces.hpp"

namespace sgk {

struct PipelineOptions {
  EnumerationBudget enumeration;
  std::size_t simplifyMoves = 100000000;
  std::size_t witnessAttempts = 6;  // re-simplifications per side in the exterior witness search
  double wallSeconds = 600;         // whole comparison
  std::uint64_t seed = 1;
  int depth = 2;
  bool diagramSplits = true;  // accept cut vertices visible in the drawing without a disc search

  PipelineOptions doubled() const;
  std::string key() const;
};

struct Fingerprint {
  HomologyProfile homology;
  HomologyProfile relHomology;
  std::vector<int> boundaryGenus;  // sorted
  std::string regions;             // canonical region summary
  std::string graph;               // canonical decorated underlying graph
  bool operator==(const Fingerprint&) const = default;
  // Name of the first entry that differs, empty when equal.
  std::string first_difference(const Fingerprint& o) const;
  std::string entry(const std::string& name) const;
};
Fingerprint invariant_fingerprint(const MarkedExterior& me);
std::string fingerprint_to_json(const Fingerprint& f);

MarkedExterior exterior_of(const Diagram& d, const PipelineOptions& opt = {});

// Sphere splits until no reducing sphere remains.
struct PieceSplit {
  std::vector<MarkedExterior> pieces;
  std::vector<std::string> unknownReasons;  // searches that ran out of budget
};
PieceSplit find_pieces(const MarkedExterior& me, const PipelineOptions& opt = {});

struct DiagramPieces {
  std::vector<Diagram> pieces;  // restrictions of the input to each piece
  std::vector<DecoratedGraph> graphs;
  std::vector<std::string> unknownReasons;
  bool certain() const { return unknownReasons.empty(); }
};
DiagramPieces find_pieces(const Diagram& d, const PipelineOptions& opt = {});

struct BlockTree {
  TreeSkeleton skeleton;
  std::map<std::string, Diagram> blockDiagrams;
  std::map<std::string, DecoratedGraph> blockGraphs;
  std::map<std::string, std::vector<std::string>> blockPoints;  // attachment vertices, by link id
  std::map<std::string, std::string> cutMethod;                // J-node -> "disc" or "diagram"
  std::vector<std::string> uncertainBlocks;                    // kept whole after an inconclusive disc search
  std::vector<std::string> unknownReasons;
  bool certain() const { return uncertainBlocks.empty(); }
};
BlockTree find_block_tree(const Diagram& piece, const PipelineOptions& opt = {});
std::string block_tree_to_json(const BlockTree& t);

// f+(v) = n*l + f(v) for the l-th point (1-based); uncoloured graphs count as all 0.
std::map<std::string, unsigned> recolor_pointed(const DecoratedGraph& g, const std::vector<std::string>& points,
                                                unsigned n);

enum class VerdictKind { Isomorphic, NotIsomorphic, Unknown };
const char* verdict_name(VerdictKind k);

struct BlockMatch {
  std::string blockA;
  std::string blockB;
  std::vector<std::string> pointsA;
  std::vector<std::string> pointsB;
  std::string method;  // "graph", "diagram" or "exterior"
  GraphIso iso;        // on the original ids
  std::optional<TriIso> tri;
  std::uint64_t seedA = 0;  // re-simplification seeds of the matched exteriors, 0 for none
  std::uint64_t seedB = 0;
};

struct PieceMatch {
  std::size_t pieceA = 0;
  std::size_t pieceB = 0;
  SkeletonIso skeletonIso;
  std::vector<BlockMatch> blocks;
};

struct Witness {
  std::string method;  // "tree" or "pieces"
  GraphIso treeIso;
  std::vector<PieceMatch> pieces;
};

struct Obstruction {
  // "tree", "fingerprint", "piece-count", "block-tree", "blocks", "block-pair", "hall"
  std::string kind;
  std::string detail;
  std::string entry;  // fingerprint entry that differs
  int pieceA = -1;
  int pieceB = -1;
  std::string blockA;
  std::string blockB;
  std::vector<std::string> pointsA;
  std::vector<std::string> pointsB;
  std::vector<std::size_t> hallSet;    // left pieces
  std::vector<std::size_t> hallImage;  // right pieces they may match
  std::vector<Obstruction> parts;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::optional<Witness> witness;
  std::optional<Obstruction> obstruction;
  std::vector<std::string> unknownReasons;
  double seconds = 0;
};

// Shares exteriors, block trees and block verdicts between comparisons.
class Pipeline {
 public:
  explicit Pipeline(PipelineOptions opt = {});
  ~Pipeline();
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  const PipelineOptions& options() const { return opt_; }

  const MarkedExterior& exterior(const Diagram& d);
  const Fingerprint& fingerprint(const Diagram& d);
  const DiagramPieces& pieces(const Diagram& d);
  const BlockTree& block_tree(const Diagram& piece);

  Verdict compare_blocks_pointed(const Diagram& b1, const std::vector<std::string>& pts1, const Diagram& b2,
                                 const std::vector<std::string>& pts2);
  Verdict compare_pieces(const Diagram& p1, const Diagram& p2);
  Verdict compare_graphs(const Diagram& a, const Diagram& b);

 private:
  struct State;
  PipelineOptions opt_;
  std::unique_ptr<State> st_;
};

Verdict compare_blocks_pointed(const Diagram& b1, const std::vector<std::string>& pts1, const Diagram& b2,
                               const std::vector<std::string>& pts2, const PipelineOptions& opt = {});
Verdict compare_pieces(const Diagram& p1, const Diagram& p2, const PipelineOptions& opt = {});
Verdict compare_graphs(const Diagram& a, const Diagram& b, const PipelineOptions& opt = {});

// Re-checks a verdict from scratch through independent routes: graph
// isomorphisms by direct application, triangulation isomorphisms by
// check_isomorphism, obstructions by recomputing the named invariants.
// Unknown verdicts replay trivially.  `why` receives the first failure.
bool replay_verdict(const Diagram& a, const Diagram& b, const Verdict& v, const PipelineOptions& opt = {},
                    std::string* why = nullptr);

std::string verdict_to_json(const Verdict& v, const PipelineOptions& opt);

}  // namespace sgk
