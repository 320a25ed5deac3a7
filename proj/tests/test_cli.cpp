#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "bergman/cli.hpp"

using namespace bergman;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("bergman_cli_" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "bergman_lab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("cli parsers") {
  CHECK(cli::parse_radial_weight("power:t=1").id() == make_power(1.0).id());
  CHECK(cli::parse_radial_weight("one").id() == make_power(0.0).id());
  CHECK(cli::parse_radial_weight("dostanic:A=0,B=1,alpha=1").id() == make_dostanic(0.0, 1.0, 1.0).id());
  CHECK_THROWS_AS(cli::parse_radial_weight("power"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_radial_weight("power:t=1,u=2"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_radial_weight("power:t=x"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_radial_weight("gauss:s=1"), cli::ConfigError);

  CHECK(cli::parse_grid("0:2") == std::vector<double>{0, 1, 2});
  CHECK(cli::parse_grid("0:1:0.5") == std::vector<double>{0, 0.5, 1});
  CHECK(cli::parse_grid("3,1.5") == std::vector<double>{3, 1.5});
  CHECK_THROWS_AS(cli::parse_grid("2:1"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_grid("0:1:0"), cli::ConfigError);

  const auto p = cli::parse_policy("max_terms=500,tail_tol=1e-12");
  CHECK(p.max_terms == 500);
  CHECK(p.tail_tol == 1e-12);
  CHECK_THROWS_AS(cli::parse_policy("depth=3"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_policy("tail_tol=-1"), cli::ConfigError);

  CHECK(cli::parse_halfplane_weight("zeta_pow:p0=5", 3.0).id() == zeta_pow_weight(5.0, 3.0).id());
  CHECK(cli::parse_halfplane_weight("appendixA", 3.0).id() == appendixA_weight(5.0, 3.0).id());
}

TEST_CASE("cli config file") {
  TempDir dir;
  const auto cfg = dir.file("a.cfg");
  put(cfg, "# comment\nweight = power:t=1\n\nx = 0:3\n");
  const auto m = cli::read_config_file(cfg);
  CHECK(m.at("weight").first == "power:t=1");
  CHECK(m.at("x").second == 4);
  put(cfg, "x=1\nx=2\n");
  CHECK_THROWS_AS(cli::read_config_file(cfg), cli::ConfigError);
  put(cfg, "novalue\n");
  CHECK_THROWS_AS(cli::read_config_file(cfg), cli::ConfigError);
}

TEST_CASE("cli moments: CSV, flags over file, atomic output") {
  TempDir dir;
  const auto cfg = dir.file("m.cfg");
  const auto out = dir.file("m.csv");
  put(cfg, "weight=power:t=3\nx=0:1\n");
  CHECK(run({"moments", "--config", cfg, "--weight", "power:t=1", "--out", out}) == cli::kPass);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("# schema=1\nx,phi,log_phi,rel_error\n0,0.25,", 0) == 0);
  CHECK_FALSE(fs::exists(out + ".tmp"));

  put(cfg, "weight=power:t=1\ncolour=blue\n");
  CHECK(run({"moments", "--config", cfg}) == cli::kConfigError);
  CHECK(run({"moments"}) == cli::kConfigError);
  CHECK(run({"moments", "--weight", "power:t=1", "--x", "-1:2"}) == cli::kConfigError);
  CHECK(run({"ratio", "--weight", "one", "--p", "2"}) == cli::kConfigError);
  CHECK(run({"ratio", "--weight", "one", "--p", "0.5", "--k", "2"}) == cli::kConfigError);
  CHECK(run({"nonsense"}) == cli::kConfigError);
}

TEST_CASE("cli report merging") {
  TempDir dir;
  CHECK(run({"report"}) == cli::kPass);

  const auto good = dir.file("good.json");
  CHECK(run({"ratio", "--weight", "power:t=1", "--p", "2", "--k", "2", "--m-max", "8", "--out", dir.file("r.csv"),
             "--report", good}) == cli::kPass);
  auto j = nlohmann::ordered_json::parse(slurp(good));
  CHECK(j["artifact_version"] == cli::kArtifactVersion);
  CHECK(j["passed"] == true);
  CHECK(j["config"]["k"] == "2");

  auto bad = j;
  bad["passed"] = false;
  bad["checks"][0]["passed"] = false;
  put(dir.file("bad.json"), bad.dump());
  const auto merged = cli::merge_reports({good, dir.file("bad.json")});
  CHECK(merged["verdict"] == "fail");
  CHECK(merged["failing_checks"].size() == 1);
  CHECK(run({"report", good, dir.file("bad.json")}) == cli::kCheckFailure);

  put(dir.file("junk.json"), "{ not json");
  CHECK(run({"report", dir.file("junk.json")}) == cli::kConfigError);
  put(dir.file("shape.json"), "[1, 2]");
  CHECK_THROWS_AS(cli::merge_reports({dir.file("shape.json")}), cli::ConfigError);
}

TEST_CASE("cli runs are deterministic for a fixed seed") {
  TempDir dir;
  for (const char* name : {"a", "b"}) {
    CHECK(run({"ap-sweep", "--weight", "zeta_pow:p0=5", "--p", "3", "--grid-depth", "2", "--threads", "2", "--out",
               dir.file(std::string(name) + ".csv"), "--report", dir.file(std::string(name) + ".json")}) == cli::kPass);
  }
  CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
}
