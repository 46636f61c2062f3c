#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "supersat/cli.hpp"

using namespace supersat;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("supersat_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::cli_run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("count subcommand prints the integer") {
  TempDir tmp;
  std::ofstream(tmp.file("s.txt")) << "# an AP-free set\n1\n2\n4 5\n";
  const auto res = run({"count", "--eq", "1,1,-2", "--set", tmp.file("s.txt"), "--n", "5",
                        "--mode", "distinct"});
  CHECK(res.code == 0);
  CHECK(res.out.substr(0, 2) == "0\n");

  const auto all = run({"count", "--eq", "1,1,-2", "--n", "5", "--full-set"});
  CHECK(all.code == 0);
  CHECK(all.out.substr(0, 2) == "8\n");
}

TEST_CASE("count handles JSON set files and field universes") {
  TempDir tmp;
  std::ofstream(tmp.file("s.json")) << R"({"n": 5, "members": [1,2,4,5]})";
  const auto res = run({"count", "--eq", "1,1,-2", "--set", tmp.file("s.json")});
  CHECK(res.code == 0);
  CHECK(res.out.substr(0, 2) == "0\n");

  const auto field =
      run({"count", "--eq", "1,1,-2", "--p", "13", "--full-set", "--mode", "all"});
  CHECK(field.code == 0);
  CHECK(field.out.substr(0, 4) == "169\n");
  // distinct mode drops exactly the 13 constant triples
  const auto dist = run({"count", "--eq", "1,1,-2", "--p", "13", "--full-set"});
  CHECK(dist.out.substr(0, 4) == "156\n");
}

TEST_CASE("extremal subcommand variants") {
  const auto mf = run({"extremal", "--eq", "1,1,-2", "--n", "9", "--exact"});
  CHECK(mf.code == 0);
  CHECK(mf.out.find("max_free_size=5") != std::string::npos);

  TempDir tmp;
  const auto th = run({"extremal", "--eq", "1,1,-2", "--epsilon", "0.5", "--horizon", "20",
                       "--csv", tmp.file("t.csv"), "--out", tmp.file("t.json")});
  CHECK(th.code == 0);
  CHECK(th.out.find("r_hat=17") != std::string::npos);
  const auto csv = slurp(tmp.file("t.csv"));
  CHECK(csv.find("n,max_free_size,threshold") != std::string::npos);

  const auto mc = run({"extremal", "--eq", "1,1,-2", "--n", "9", "--m", "6"});
  CHECK(mc.code == 0);
  CHECK(mc.out.find("min_count=4") != std::string::npos);
}

TEST_CASE("sphere and behrend subcommands write reports") {
  TempDir tmp;
  const auto sp = run({"sphere", "--t", "3", "--d", "2", "--out", tmp.file("cap.json")});
  CHECK(sp.code == 0);
  const auto cap = json::parse(slurp(tmp.file("cap.json")));
  CHECK(cap.at("r") == 5);
  CHECK(cap.at("points").size() == 2);

  const auto bh = run({"behrend", "--n", "100", "--set-out", tmp.file("b.txt"), "--out",
                       tmp.file("b.json")});
  CHECK(bh.code == 0);
  const auto rep = json::parse(slurp(tmp.file("b.json")));
  CHECK(rep.at("members") == json::array({22, 25, 37}));
  const auto set_text = slurp(tmp.file("b.txt"));
  CHECK(set_text.find("22") != std::string::npos);
}

TEST_CASE("encode-check reports zero counterexamples") {
  const auto res = run({"encode-check", "--samples", "2000", "--seed", "9"});
  CHECK(res.code == 0);
  CHECK(res.out.find("counterexamples=0") != std::string::npos);
}

TEST_CASE("varnavides and amplify run end to end") {
  TempDir tmp;
  const auto var = run({"varnavides", "--eq", "1,1,-2", "--n", "10", "--p", "auto",
                        "--density", "0.9", "--auto-r", "--horizon", "30", "--trials",
                        "500", "--seed", "5", "--out", tmp.file("v.json")});
  CHECK(var.code == 0);
  const auto vrep = json::parse(slurp(tmp.file("v.json")));
  CHECK(vrep.at("p") == 41);
  CHECK(vrep.at("validity_failures") == 0);
  // auto-r thresholds at half the exact generated density 37/41, not 0.9
  CHECK(vrep.at("config").at("r") == 18);
  CHECK(vrep.at("threshold").at("certified") == true);

  const auto amp = run({"amplify", "--eq", "1,1,-1,-1", "--density", "0.5", "--p", "auto",
                        "--n", "200", "--t", "3", "--d", "3", "--trials", "2000", "--seed",
                        "7", "--out", tmp.file("a.json")});
  CHECK(amp.code == 0);
  const auto arep = json::parse(slurp(tmp.file("a.json")));
  CHECK(arep.at("p") == 809);
  CHECK(arep.at("validity_failures") == 0);
  CHECK(arep.at("cap_size") == 6);
}

TEST_CASE("reports regenerate bit-identically from the same config") {
  TempDir tmp;
  const std::vector<std::string> args{"amplify", "--eq", "1,1,-1,-1", "--density", "0.5",
                                      "--p",     "auto", "--n",       "200",
                                      "--t",     "3",    "--d",       "3",
                                      "--trials", "1000", "--seed",   "7"};
  auto a = args;
  a.insert(a.end(), {"--out", tmp.file("r1.json")});
  auto b = args;
  b.insert(b.end(), {"--out", tmp.file("r2.json")});
  CHECK(run(a).code == 0);
  CHECK(run(b).code == 0);
  CHECK(slurp(tmp.file("r1.json")) == slurp(tmp.file("r2.json")));
}

TEST_CASE("amplifier report schema carries the pinned keys") {
  TempDir tmp;
  const auto amp = run({"amplify", "--eq", "1,1,-1,-1", "--density", "0.5", "--p", "13",
                        "--t", "3", "--d", "2", "--trials", "50", "--seed", "1", "--out",
                        tmp.file("a.json")});
  REQUIRE(amp.code == 0);
  const auto rep = json::parse(slurp(tmp.file("a.json")));
  for (const char* key :
       {"equation", "p", "epsilon", "t", "d", "cap_size", "trials", "good_count",
        "solutions_emitted", "distinct_solutions", "helpful_tuple_count",
        "theoretical_floor", "validity_failures", "seed"})
    CHECK(rep.contains(key));
}

TEST_CASE("equation JSON form round trips") {
  const auto eq = InvariantEquation::parse({1, 1, -2});
  const auto j = equation_to_json(eq);
  CHECK(j.dump() == R"({"coeffs":[1,1,-2]})");
  CHECK(equation_from_json(j).coeffs() == eq.coeffs());
  CHECK_THROWS_AS(equation_from_json(json::parse(R"({"coeffs":[1,1,-1]})")), config_error);
}

TEST_CASE("fibercount cross-checks against enumeration") {
  const auto res = run({"fibercount", "--points", "1,1;1,2;2,1", "--targets", "3,5,7",
                        "--p", "5", "--d", "2", "--check"});
  CHECK(res.code == 0);
  CHECK(res.out.find("rank=3") != std::string::npos);
}

TEST_CASE("exit codes distinguish config, budget and success") {
  CHECK(run({"count", "--eq", "1,1,-1", "--n", "5", "--full-set"}).code == 2);  // not invariant
  CHECK(run({"count", "--eq", "1,1,-2", "--n", "5", "--full-set", "--bogus"}).code == 2);
  CHECK(run({"sphere", "--t", "200", "--d", "4"}).code == 3);  // budget refusal
  CHECK(run({"extremal", "--eq", "1,1,-2", "--n", "60"}).code == 3);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"sphere", "--help"}).code == 0);
  CHECK(run({}).code == 2);  // a subcommand is required
}
