#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qnet/cli.hpp"
#include "qnet/io.hpp"

using namespace qnet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "qnet");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("fixtures pass on a clean checkout") {
  std::string text;
  CHECK(invoke({"fixtures"}, &text) == kExitOk);
  CHECK(text.find("FAIL") == std::string::npos);
}

TEST_CASE("generate writes identical files for equal seeds") {
  TempDir dir("qnet_cli_generate");
  CHECK(invoke({"generate", "--n", "40", "--topology-seed", "3", "-o", dir / "a"}) == kExitOk);
  CHECK(invoke({"generate", "--n", "40", "--topology-seed", "3", "-o", dir / "b"}) == kExitOk);
  CHECK(slurp(dir / "a/topology.json") == slurp(dir / "b/topology.json"));
  CHECK(slurp(dir / "a/topology.dot") == slurp(dir / "b/topology.dot"));
  const Topology t = topology_from_json(read_json_file(dir / "a/topology.json"));
  CHECK(t.node_count() == 40);
  CHECK(std::abs(t.mean_success_rate() - 0.6) <= 0.01);
  CHECK(invoke({"generate", "--n", "2", "--E_d", "1", "-o", dir / "c"}) == kExitOk);
  CHECK(topology_from_json(read_json_file(dir / "c/topology.json")).edge_count() == 1);
}

TEST_CASE("run writes outcomes, summary and plans") {
  TempDir dir("qnet_cli_run");
  CHECK(invoke({"generate", "--n", "30", "-o", dir.path.string()}) == kExitOk);
  const std::string topo = dir / "topology.json";
  CHECK(invoke({"run", "--n", "30", "-t", topo, "--slots", "20", "--export-plans", "-o", dir / "qcast"}) == kExitOk);
  const Json summary = read_json_file(dir / "qcast/summary.json");
  CHECK(summary.at("result").at("mean_eps").get<double>() > 0.0);
  CHECK(fs::exists(dir / "qcast/plans/slot_0.json"));
  const std::string csv = slurp(dir / "qcast/outcomes.csv");
  CHECK(csv.rfind("slot,pair,ebits,epair,paths,recovery_used,channels_bound\n", 0) == 0);

  CHECK(invoke({"run", "--n", "30", "-t", topo, "--slots", "20", "-o", dir / "again", "--export-plans"}) == kExitOk);
  CHECK(slurp(dir / "again/outcomes.csv") == csv);

  CHECK(invoke({"run", "--n", "30", "-t", topo, "--slots", "20", "--algorithm", "slmp", "-o", dir / "slmp"}) == kExitOk);
  const double slmp = read_json_file(dir / "slmp/summary.json").at("result").at("mean_eps").get<double>();
  CHECK(summary.at("result").at("mean_eps").get<double>() >= slmp);

  CHECK(invoke({"run", "--n", "30", "-t", topo, "--slots", "0", "-o", dir / "empty"}) == kExitOk);
  CHECK(slurp(dir / "empty/outcomes.csv") == "slot,pair,ebits,epair,paths,recovery_used,channels_bound\n");
}

TEST_CASE("validation errors exit with code 1") {
  TempDir dir("qnet_cli_invalid");
  CHECK(invoke({"generate", "--n", "30", "-o", dir.path.string()}) == kExitOk);
  std::string text;
  CHECK(invoke({"run", "--n", "31", "-t", dir / "topology.json", "-o", dir / "x"}, &text) == kExitValidation);
  CHECK(invoke({"run", "--q", "1.5", "-o", dir / "x"}, &text) == kExitValidation);
  CHECK(text.find("q") != std::string::npos);
  CHECK(invoke({"run", "--algorithm", "bogus", "-o", dir / "x"}) == kExitValidation);
  CHECK(invoke({"run", "--k", "-2", "-o", dir / "x"}) == kExitValidation);
  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({"n": 20, "colour": "red"})";
  }
  CHECK(invoke({"run", "-c", dir / "bad.json", "-o", dir / "x"}, &text) == kExitValidation);
  CHECK(text.find("colour") != std::string::npos);
  CHECK(invoke({"sweep", "--dimension", "k", "--values", "", "-o", dir / "x"}) == kExitValidation);
  CHECK(invoke({"sweep", "--dimension", "z", "--values", "1", "-o", dir / "x"}) == kExitValidation);
  CHECK(invoke({"run", "-t", dir / "missing.json", "-o", dir / "x"}) == kExitValidation);
}

TEST_CASE("config file and overrides") {
  TempDir dir("qnet_cli_config");
  {
    std::ofstream cfg(dir / "c.json");
    cfg << R"({"n": 20, "E_d": 3, "m": 2, "slots": 5, "k": "inf", "algorithm": "qpass", "metric": "sumdist"})";
  }
  CHECK(invoke({"run", "-c", dir / "c.json", "--slots", "3", "-o", dir / "r"}) == kExitOk);
  const Json s = read_json_file(dir / "r/summary.json");
  CHECK(s.at("config").at("slots") == 3);
  CHECK(s.at("config").at("k") == "inf");
  CHECK(s.at("config").at("algorithm") == "qpass");
  CHECK(s.at("config").at("metric") == "sumdist");
  const SimConfig back = config_from_json(s.at("config"));
  CHECK(config_to_json(back) == s.at("config"));
}

TEST_CASE("sweep over k writes one row per value") {
  TempDir dir("qnet_cli_sweep");
  CHECK(invoke({"sweep", "--dimension", "k", "--values", "0,3,6,inf", "--n", "20", "--E_d", "3", "--m", "3", "--slots", "5",
                "--topologies", "1", "-o", dir.path.string()}) == kExitOk);
  const std::string csv = slurp(dir / "sweep_k.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("\ninf,1,") != std::string::npos);
  CHECK(fs::exists(dir / "sweep_k.json"));
  CHECK(fs::exists(dir / "sweep_k_plot.json"));
}

TEST_CASE("value list parsing") {
  CHECK(parse_values("1,2.5") == std::vector<double>{1, 2.5});
  const auto v = parse_values("0,inf");
  REQUIRE(v.size() == 2);
  CHECK(std::isinf(v[1]));
  CHECK(parse_values("").empty());
  CHECK_THROWS(parse_values("1,x"));
}

}
