#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "sgk/pipeline.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  std::string cmd = std::string(SGK_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string corpus(const std::string& name) { return std::string(SGK_CORPUS_DIR) + "/" + name + ".sgd"; }

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("sgk-cli-test-" + std::to_string(getpid())) / name;
  fs::create_directories(p.parent_path());
  return p;
}

}  // namespace

TEST(Cli, EmptyAgainstEmptyExitsZero) { EXPECT_EQ(run("compare " + corpus("empty") + " " + corpus("empty")).exit, 0); }

TEST(Cli, DifferentlyColouredPointsExitThree) {
  EXPECT_EQ(run("compare " + corpus("point-c1") + " " + corpus("point-c2")).exit, 3);
}

TEST(Cli, TrefoilAgainstUnknotExitsFour) {
  CliRun r = run("--format json compare " + corpus("trefoil-loop") + " " + corpus("unknot-loop"));
  EXPECT_EQ(r.exit, 4);
  json j = json::parse(r.out);
  EXPECT_EQ(j["verdict"], "Unknown");
  EXPECT_FALSE(j["unknownReasons"].empty());
}

TEST(Cli, TwoUnknotsListTwoPieces) {
  CliRun r = run("--format json pieces " + corpus("two-unknots"));
  ASSERT_EQ(r.exit, 0);
  EXPECT_EQ(json::parse(r.out)["pieces"].size(), 2u);
  EXPECT_NE(run("pieces " + corpus("two-unknots")).out.find("2 pieces"), std::string::npos);
}

TEST(Cli, GlobalFlagsMayFollowTheCommand) {
  CliRun before = run("--format json --seed 3 pieces " + corpus("two-unknots"));
  CliRun after = run("pieces " + corpus("two-unknots") + " --format json --seed 3");
  ASSERT_EQ(after.exit, 0);
  EXPECT_EQ(before.out, after.out);
}

TEST(Cli, ErrorsExitWithTheirCode) {
  auto code = [](sgk::ErrorCode c) { return 64 + static_cast<int>(c); };
  EXPECT_EQ(run("validate /nonexistent/x.sgd").exit, code(sgk::ErrorCode::Io));
  fs::path bad = scratch("bad.sgd");
  std::ofstream(bad) << "vertex v\nvnode v a\n";
  CliRun parse = run("--format json validate " + bad.string());
  EXPECT_GE(parse.exit, 64);
  EXPECT_LT(parse.exit, code(sgk::ErrorCode::Usage));
  json j = json::parse(parse.out);
  EXPECT_EQ(j["exit"], parse.exit);
  EXPECT_EQ(run("frobnicate").exit, code(sgk::ErrorCode::Usage));
  EXPECT_EQ(run("--budget-rays 0 pieces " + corpus("theta")).exit, code(sgk::ErrorCode::Usage));
  EXPECT_EQ(run("compare " + corpus("point") + " " + corpus("point-c1")).exit,
            code(sgk::ErrorCode::DecorationMismatch));
}

TEST(Cli, CompileThenExteriorFromSub) {
  fs::path out = scratch("theta");
  ASSERT_EQ(run("compile " + corpus("theta") + " -o " + out.string()).exit, 0);
  EXPECT_TRUE(fs::exists(out.string() + ".tri"));
  EXPECT_TRUE(fs::exists(out.string() + ".sub"));
  CliRun fromSub = run("--format json exterior " + out.string() + ".sub");
  CliRun fromSgd = run("--format json exterior " + corpus("theta"));
  ASSERT_EQ(fromSub.exit, 0);
  ASSERT_EQ(fromSgd.exit, 0);
  EXPECT_EQ(json::parse(fromSub.out)["regions"], json::parse(fromSgd.out)["regions"]);
}

TEST(Cli, BlocksAndInvariants) {
  CliRun b = run("--format json blocks " + corpus("flat-handcuffs"));
  ASSERT_EQ(b.exit, 0);
  EXPECT_EQ(json::parse(b.out)["pieces"][0]["iNodes"].size(), 3u);
  CliRun i = run("--format json invariants " + corpus("unknot-loop"));
  ASSERT_EQ(i.exit, 0);
  EXPECT_EQ(json::parse(i.out)["boundaryGenus"], "[1]");
  CliRun v = run("--format json validate " + corpus("tangled-tree"));
  ASSERT_EQ(v.exit, 0);
  EXPECT_EQ(json::parse(v.out)["tree"], true);
}

TEST(Cli, CacheNeverChangesTheVerdict) {
  fs::path dir = scratch("cache");
  fs::remove_all(dir);
  for (auto [a, b] : {std::pair{"theta", "theta-redrawn"}, {"two-unknots", "fig3-hopf"}, {"trefoil-loop", "unknot-loop"}}) {
    std::string args = "compare " + corpus(a) + " " + corpus(b);
    CliRun cold = run("--format json " + args);
    CliRun miss = run("--format json --cache-dir " + dir.string() + " " + args);
    CliRun hit = run("--format json --cache-dir " + dir.string() + " " + args);
    EXPECT_EQ(cold.exit, miss.exit);
    EXPECT_EQ(miss.exit, hit.exit);
    EXPECT_EQ(json::parse(cold.out)["verdict"], json::parse(hit.out)["verdict"]);
    EXPECT_EQ(miss.out, hit.out);
  }
  EXPECT_FALSE(fs::is_empty(dir));
  // a different budget is a different entry
  std::size_t before = std::distance(fs::directory_iterator(dir), fs::directory_iterator{});
  run("--cache-dir " + dir.string() + " --seed 7 compare " + corpus("theta") + " " + corpus("theta-redrawn"));
  std::size_t after = std::distance(fs::directory_iterator(dir), fs::directory_iterator{});
  EXPECT_EQ(after, before + 1);
}

TEST(Cli, SeedGivesIdenticalOutput) {
  std::string args = "--format json --seed 5 exterior " + corpus("fig3-hopf");
  EXPECT_EQ(run(args).out, run(args).out);
}

// Every corpus entry agrees with its recorded metadata.
TEST(Corpus, ExpectedMetadata) {
  std::ifstream in(std::string(SGK_CORPUS_DIR) + "/expected.json");
  json meta = json::parse(in);
  sgk::Pipeline pipe;
  for (const auto& [name, want] : meta["graphs"].items()) {
    sgk::Diagram d = sgk::parse_file(corpus(name));
    const sgk::DiagramPieces& p = pipe.pieces(d);
    EXPECT_EQ(p.pieces.size(), want["pieces"].get<std::size_t>()) << name;
    EXPECT_EQ(sgk::is_tree(sgk::underlying_graph(d)), want.value("tree", false)) << name;
    if (want.contains("blocks")) {
      ASSERT_EQ(p.pieces.size(), 1u) << name;
      EXPECT_EQ(pipe.block_tree(p.pieces[0]).skeleton.iNodes.size(), want["blocks"].get<std::size_t>()) << name;
    }
  }
  for (const auto& c : meta["comparisons"]) {
    std::string a = c["a"], b = c["b"];
    sgk::Verdict v = pipe.compare_graphs(sgk::parse_file(corpus(a)), sgk::parse_file(corpus(b)));
    EXPECT_EQ(sgk::verdict_name(v.kind), c["verdict"].get<std::string>()) << a << " vs " << b;
  }
}

TEST(Corpus, EveryFileIsListed) {
  std::ifstream in(std::string(SGK_CORPUS_DIR) + "/expected.json");
  json meta = json::parse(in);
  for (const auto& f : fs::directory_iterator(SGK_CORPUS_DIR))
    if (f.path().extension() == ".sgd") EXPECT_TRUE(meta["graphs"].contains(f.path().stem().string())) << f.path();
}
