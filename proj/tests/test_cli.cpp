#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rydphon/cli.hpp"

using namespace rydphon;

namespace {

const std::string kRecipes = RYDPHON_RECIPES;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "rydphon");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content = "") {
  const auto p = std::filesystem::temp_directory_path() / name;
  if (!content.empty()) std::ofstream(p) << content;
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  return rows;
}

}  // namespace

TEST_CASE("bands command: shape, header and crossing report") {
  const Run r = run({"bands", kRecipes + "/trivial_d2.0.json"});
  CHECK(r.code == kExitOk);
  const auto rows = data_lines(r.out);
  CHECK(rows.size() == 1 + 6 * 256);
  CHECK(rows[0].rfind("q,j,label,omega,re_xi_Ax", 0) == 0);
  CHECK(r.out.rfind("# rydphon", 0) == 0);
  CHECK(r.out.find("config_hash=") != std::string::npos);
  CHECK(r.out.find("gauge=") != std::string::npos);

  const Run c = run({"bands", kRecipes + "/trivial_d1.5.json", "--q-points", "64"});
  CHECK(c.code == kExitOk);
  CHECK(c.err.find("crossing 5 6") != std::string::npos);
}

TEST_CASE("config errors exit with 2 and name the key") {
  const auto bad = temp_file("rydphon_bad_key.json", R"({"d": 2.0, "separation": 1})");
  const Run r = run({"bands", bad.string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("separation") != std::string::npos);
  CHECK(run({"bands", "/nonexistent/config.json"}).code == kExitConfig);
  CHECK(run({"bands"}).code == kExitConfig);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({"sweep", kRecipes + "/trivial_d2.0.json", "--param", "n_cells"}).code == kExitConfig);
  std::filesystem::remove(bad);
}

TEST_CASE("computation errors exit with 1") {
  const auto soft = temp_file("rydphon_soft.json", R"({"d": 2.0, "nu": 0.05})");
  const Run r = run({"bands", soft.string(), "--q-points", "8"});
  CHECK(r.code == kExitComputation);
  CHECK(r.err.find("ImaginaryFrequency") != std::string::npos);
  std::filesystem::remove(soft);
}

TEST_CASE("spectrum command") {
  const Run r = run({"spectrum", kRecipes + "/topological_d2.0.json"});
  CHECK(r.code == kExitOk);
  CHECK(data_lines(r.out).size() == 1 + 42);
  const Run n = run({"spectrum", kRecipes + "/topological_d2.0.json", "--no-relax"});
  CHECK(n.out == r.out);
  const Run x = run({"spectrum", kRecipes + "/trivial_d2.0.json", "--relax"});
  CHECK(x.code == kExitOk);
  CHECK(x.out.find("equilibrium=relaxed") != std::string::npos);
  CHECK(run({"spectrum", kRecipes + "/trivial_d2.0.json", "--relax", "--no-relax"}).code == kExitConfig);
}

TEST_CASE("local, coupling and export commands write files") {
  const auto g = temp_file("rydphon_g.csv"), j = temp_file("rydphon_j.csv");
  const Run r = run({"local", kRecipes + "/trivial_d2.0.json", "--out-g", g.string(), "--out-j", j.string()});
  CHECK(r.code == kExitOk);
  CHECK(data_lines(slurp(g)).size() == 1 + 42 * 42);
  CHECK(data_lines(slurp(j))[0] == "separation,bond_class,value,pairs");

  const Run c = run({"coupling", kRecipes + "/trivial_d2.5.json", "--q-points", "32"});
  CHECK(c.code == kExitOk);
  CHECK(data_lines(c.out).size() == 1 + 6 * 32);
  CHECK(c.err.find("coupled bands") != std::string::npos);

  const auto m1 = temp_file("rydphon_m1.json"), m2 = temp_file("rydphon_m2.json");
  for (const auto& m : {m1, m2})
    CHECK(run({"export", kRecipes + "/trivial_d2.0.json", "--t", "1", "--U", "4", "--gcp", "0.5", "--q-points", "32",
               "--out", m.string()})
              .code == kExitOk);
  CHECK(slurp(m1) == slurp(m2));
  CHECK(run({"export", kRecipes + "/trivial_d2.0.json", "--gcp", "-1"}).code == kExitConfig);
  for (const auto& p : {g, j, m1, m2}) std::filesystem::remove(p);
}

TEST_CASE("sweep rows follow the parameter order regardless of threads") {
  const std::string cfg = kRecipes + "/trivial_d2.0.json";
  const std::vector<std::string> args{"sweep", cfg, "--from", "1.6", "--to", "2.2", "--steps", "7", "--q-points", "32"};
  setenv("RYDPHON_THREADS", "1", 1);
  CHECK(sweep_threads() == 1);
  const Run one = run(args);
  setenv("RYDPHON_THREADS", "4", 1);
  const Run four = run(args);
  unsetenv("RYDPHON_THREADS");
  CHECK(one.code == kExitOk);
  CHECK(one.out == four.out);
  const auto rows = data_lines(one.out);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].rfind("d,bandwidth_1", 0) == 0);
  CHECK(rows[1].rfind("1.6,", 0) == 0);
  CHECK(rows[7].rfind("2.2,", 0) == 0);
  CHECK(rows[3].substr(rows[3].rfind(',') + 1) == "ok");
}

TEST_CASE("check command passes on the default recipe") {
  const Run r = run({"check", kRecipes + "/trivial_d2.0.json"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS bogoliubov_equivalence") != std::string::npos);
  const Run t = run({"check", kRecipes + "/topological_d2.0.json"});
  CHECK(t.code == kExitOk);
}
