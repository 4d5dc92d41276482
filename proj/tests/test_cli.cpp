#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "qwalk/json_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(QWALK_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qwalk_cli_" + std::to_string(getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string fixture(const std::string& name) { return std::string(QWALK_FIXTURE_DIR) + "/" + name; }

/// CSV rows after the header, split on commas.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

const double pi = std::numbers::pi;

}  // namespace

TEST_CASE("exit codes") {
  CHECK(cli("--help").code == 0);
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("build").code == 2);
  CHECK(cli("build --family nope").code == 2);
  CHECK(cli("build --family path --n 0").code == 2);
  CHECK(cli("analyze " + fixture("wheel5.json") + " --state-x v:0 --state-y v:1").code == 2);
  CHECK(cli("analyze " + fixture("wheel5.json") + " --q 0 --state-x v:0 --state-y v:1 --time 1").code == 2);
  CHECK(cli("analyze /nonexistent.json --state-x v:0 --state-y v:1 --time 1").code == 2);
  CHECK(cli("analyze " + fixture("wheel5.json") + " --state-x bogus --state-y v:1 --time 1").code == 2);
}

TEST_CASE("build") {
  const Run t = cli("build --family cycle-with-tail --cycle 6 --tail 2");
  REQUIRE(t.code == 0);
  const json tj = json::parse(t.out);
  for (const char* m : {"a", "b", "c", "d"}) CHECK(tj.at("markers").contains(m));
  CHECK(tj.at("graph").at("n") == 8);

  const Run k = cli("build --family kmn-minus-matching --m 4 --n 3 --k 2 --add-e");
  REQUIRE(k.code == 0);
  const json kj = json::parse(k.out);
  CHECK(kj.at("graph").at("n") == 7);
  CHECK(kj.at("graph").at("edges").size() == 12);
  CHECK(kj.at("claims").at(0).at("time") == "pi/(2q)");

  const Run p = cli("build --family path-potentials --n 5 --w1 1 --w2 1");
  REQUIRE(p.code == 0);
  const json pj = json::parse(p.out);
  CHECK(pj.at("graph").at("potentials") == json::parse(R"({"0": 1.0, "4": 1.0})"));

  const std::string star = write_file("star.json", R"({"n": 4, "edges": [[0, 1], [0, 2], [0, 3]]})");
  const Run a = cli("build --family path-potentials --n 5 --w 1 --attach " + star + " --at 3");
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out).at("claims").size() == 1);

  const std::string out = (workdir() / "p4.json").string();
  CHECK(cli("build --family path-potentials --n 4 --w 1+1/q --q 0.5 -o " + out).code == 0);
  CHECK(json::parse(std::ifstream(out)).at("graph").at("potentials").at("0") == 3.0);
}

TEST_CASE("analyze") {
  const std::string c5 = (workdir() / "c5.json").string();
  REQUIRE(cli("build --family c5-potential -o " + c5).code == 0);
  const Run r = cli("analyze " + c5 + " --matrix lap --state-x pair:1,4 --state-y pair:2,3 --time 1.5707963");
  REQUIRE(r.code == 0);
  const json rj = json::parse(r.out);
  CHECK(rj.at("report").at("verdict") == "PST");
  CHECK(rj.at("strongly_cospectral") == true);

  const std::string p3 = write_file("p3.json", R"({"n": 3, "edges": [[0, 1], [1, 2]]})");
  const Run v = cli("analyze " + p3 + " --q 1.6329931618554521 --state-x v:0 --state-y v:2 --time '3*pi/4'");
  REQUIRE(v.code == 0);
  CHECK(json::parse(v.out).at("report").at("verdict") == "PST");

  const std::string p4 = write_file("p4plain.json", R"({"n": 4, "edges": [[0, 1], [1, 2], [2, 3]]})");
  const Run s = cli("analyze " + p4 + " --matrix lap --state-x v:0 --state-y v:3 --search 20");
  REQUIRE(s.code == 0);
  const json sj = json::parse(s.out);
  CHECK(sj.at("report").at("verdict") == "NO_PST_FOUND");
  CHECK(sj.at("search").at("hits").empty());

  const Run found = cli("analyze " + c5 + " --matrix lap --state-x pair:1,4 --state-y pair:2,3 --search 4");
  REQUIRE(found.code == 0);
  CHECK(json::parse(found.out).at("report").at("time").get<double>() == doctest::Approx(pi / 2).epsilon(1e-6));
}

TEST_CASE("involutions") {
  const Run w = cli("involutions " + fixture("wheel5.json"));
  REQUIRE(w.code == 0);
  const json wj = json::parse(w.out);
  REQUIRE_FALSE(wj.at("involutions").empty());
  for (const json& i : wj.at("involutions")) {
    CHECK(i.at("block_residual").get<double>() <= 1e-10);
    CHECK(i.at("spectrum_factorization") == true);
  }

  const std::string f2 = (workdir() / "fig2i.json").string();
  REQUIRE(cli("build --family cycle-with-tail --cycle 6 --tail 1 -o " + f2).code == 0);
  const json fj = json::parse(cli("involutions " + f2).out);
  bool found = false;
  for (const json& i : fj.at("involutions"))
    for (const json& x : i.at("witnesses"))
      if (x.at("x") == "pair:1,5" && x.at("y") == "pair:2,4") {
        found = true;
        CHECK(x.at("time").get<double>() == doctest::Approx(pi / 2).epsilon(1e-6));
      }
  CHECK(found);

  const std::string asym = write_file("asym.json", R"({"n": 4, "edges": [[0, 1, 1], [1, 2, 2], [2, 3, 3]]})");
  const Run a = cli("involutions " + asym);
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out).at("involutions").empty());

  CHECK(cli("involutions " + fixture("wheel5.json") + " --involution " + fixture("wheel5_involution.json")).code ==
        0);
  CHECK(cli("involutions " + fixture("wheel5.json") + " --involution " + fixture("corrupted_involution.json"))
            .code == 1);
}

TEST_CASE("corpus") {
  const Run all = cli("corpus");
  CHECK(all.code == 0);
  CHECK(all.out.rfind("id,q,time,fidelity,residual,status\n", 0) == 0);
  CHECK(cli("corpus").out == all.out);
  for (const auto& row : csv_rows(all.out)) CHECK(row.back() == "verified");

  const Run sub = cli("corpus --only fig2");
  CHECK(sub.code == 0);
  for (const auto& row : csv_rows(sub.out)) CHECK(row.front().rfind("fig2", 0) == 0);

  CHECK(cli("corpus --claims " + fixture("claims_sample.json")).code == 0);
  CHECK(cli("corpus --claims " + fixture("corrupted_claim.json")).code == 1);
  CHECK(cli("corpus --q-samples 1,0.25 --only path-p5").code == 0);
}

TEST_CASE("fidelity curves") {
  const std::string p2 = write_file("p2.json", R"({"n": 2, "edges": [[0, 1]]})");
  const Run c = cli("fidelity-curve " + p2 + " --state-x v:0 --state-y v:1 --t-max 3.141592653589793 --samples 201");
  REQUIRE(c.code == 0);
  const auto rows = csv_rows(c.out);
  REQUIRE(rows.size() == 201);
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (std::stod(rows[i][1]) > std::stod(rows[best][1])) best = i;
  CHECK(std::stod(rows[best][0]) == doctest::Approx(pi / 2));
  CHECK(std::stod(rows[best][1]) == doctest::Approx(1.0));

  const std::string p3 = write_file("p3c.json", R"({"n": 3, "edges": [[0, 1], [1, 2]]})");
  const Run z = cli("fidelity-curve " + p3 + " --matrix lap --state-x pair:0,2 --state-y v:1 --t-max 10");
  REQUIRE(z.code == 0);
  for (const auto& row : csv_rows(z.out)) CHECK(std::abs(std::stod(row[1])) <= 1e-12);

  const Run h = cli("fidelity-curve " + fixture("wheel5.json") + " --matrix lap --state-x v:4 --state-y v:4 --t-max 20");
  REQUIRE(h.code == 0);
  for (const auto& row : csv_rows(h.out)) CHECK(std::stod(row[1]) >= 0.6 - 1e-9);
}

TEST_CASE("sweep") {
  const Run s = cli("sweep --n-range 7:20 --zeta -1");
  REQUIRE(s.code == 0);
  for (const auto& row : csv_rows(s.out)) {
    const std::size_t n = std::stoul(row[0]);
    const std::size_t b = std::stoul(row[1]);
    const bool has = (2 * b + n) % 4 == 0;
    CHECK(row[4].empty() == !has);
  }
  const Run g = cli("sweep --n-range 15:24 --zeta -1");
  for (const auto& row : csv_rows(g.out)) CHECK(std::stod(row[6]) < 1.0);

  const Run h = cli("sweep --n-range 4:4 --b-range 2:2 --rho-range 1,2 --t-max 4");
  REQUIRE(h.code == 0);
  const auto rows = csv_rows(h.out);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(std::stoul(row[10]) >= 1);
    CHECK(std::stod(row[11]) == doctest::Approx(pi / 2).epsilon(1e-6));
  }
  CHECK(cli("sweep --family wheel").code == 2);
}

TEST_CASE("search") {
  const std::string out = (workdir() / "w.json").string();
  REQUIRE(cli("search --base cycle --n 6 --edges 2 --matrix lap -o " + out).code == 0);
  const json j = json::parse(std::ifstream(out));
  CHECK_FALSE(j.at("witnesses").empty());
  for (const json& w : j.at("witnesses")) CHECK(w.at("fidelity").get<double>() >= 1.0 - 1e-9);
}
