#include <catch_amalgamated.hpp>

#include <json.hpp>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>

#include "selfsim/mother.hpp"
#include "support.hpp"

using namespace selfsim;
using selfsim::test::group_path;
using Json = nlohmann::json;

namespace {

struct Run {
  int         code = -1;
  std::string out;
  std::string err;
};

Run run(std::string const& args) {
  std::string const errfile = "selfsim_cli_test.err";
  std::string const cmd     = std::string(SELFSIM_CLI) + " " + args + " 2>" + errfile;
  Run               r;
  FILE*             p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) {
    r.out.append(buf, n);
  }
  int status = pclose(p);
  r.code     = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err      = test::read_file(errfile);
  std::remove(errfile.c_str());
  return r;
}

std::string file(std::string const& group) { return "--file " + group_path(group); }

std::vector<std::string> csv_rows(std::string const& text) {
  std::vector<std::string> rows;
  std::istringstream       in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') {
      rows.push_back(line);
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("cli act", "[cli]") {
  auto r = run("act " + file("basilica") + " b 00");
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "10\n");
  REQUIRE(run("act " + file("basilica") + " 1 0110").out == "0110\n");
  REQUIRE(run("act " + file("basilica") + " b").out == "\n");
  REQUIRE(run("act " + file("basilica") + " --state a 0110").out == "0010\n");
  REQUIRE(run("act " + file("basilica") + " zz 01").code == 2);
  REQUIRE(run("act " + file("basilica") + " b 02").code == 2);
}

TEST_CASE("cli classify", "[cli]") {
  auto r = run("classify " + file("basilica"));
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  REQUIRE(j["states"].size() == 2);
  for (auto const& s : j["states"]) {
    REQUIRE(s["class"] == "Bounded");
    REQUIRE(s["growth"].size() == 9);
  }
  Json id = Json::parse(run("classify " + file("identity")).out);
  REQUIRE(id["states"][0]["tag"] == "Finitary(0)");
  Json ad = Json::parse(run("classify " + file("adding_machine")).out);
  REQUIRE(ad["states"][0]["period"] == 1);
  Json ex = Json::parse(run("classify --nmax 12 " + file("exponential")).out);
  REQUIRE(ex["states"][0]["class"] == "Exponential");
  REQUIRE(ex["states"][0]["growth"][12] == 4096);

  std::ofstream("cli_bad.aut") << "alphabet: 0 1\nstate a [b] perm 0 1\n";
  auto bad = run("classify --file cli_bad.aut");
  REQUIRE(bad.code == 2);
  REQUIRE_FALSE(bad.err.empty());
  std::remove("cli_bad.aut");
  REQUIRE(run("classify --file does_not_exist.aut").code == 2);
  REQUIRE(run("classify --bogus").code == 2);
  REQUIRE(run("").code == 2);
}

TEST_CASE("cli decompose", "[cli]") {
  Json j = Json::parse(run("decompose " + file("basilica") + " b").out);
  auto d = j["decompositions"][0];
  REQUIRE(d["perm"]["0"] == "1");
  REQUIRE(d["sections"]["0"] == "a");
  REQUIRE(d["sections"]["1"] == "1");
}

TEST_CASE("cli mother", "[cli]") {
  for (std::size_t d : {2, 3}) {
    auto r = run("mother --d " + std::to_string(d));
    REQUIRE(r.code == 0);
    Automaton a  = parse_machine(r.out);
    auto      mg = mother_generators(d);
    std::set<Element> parsed;
    for (auto const& n : a.declared()) {
      parsed.insert(a.element(n));
    }
    parsed.insert(identity(d));
    std::set<Element> expect(mg.a_elements.begin(), mg.a_elements.end());
    expect.insert(mg.b_elements.begin(), mg.b_elements.end());
    REQUIRE(parsed == expect);
    std::size_t na = 0, nb = 0;
    for (auto const& n : a.declared()) {
      (n[0] == 'a' ? na : nb) += 1;
    }
    REQUIRE(na + 1 == mg.a_elements.size());
    REQUIRE(nb + 1 == mg.b_elements.size());
  }
  REQUIRE(run("mother --d 1").code == 2);
  REQUIRE(run("mother").code == 2);
}

TEST_CASE("cli embed", "[cli]") {
  auto r = run("embed " + file("basilica") + " --word-length 4 --depth 2");
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  REQUIRE(j["N"] == 2);
  REQUIRE(j["verification"]["passed"] == true);
  Automaton img = parse_machine(j["images"].get<std::string>());
  REQUIRE(img.degree() == 4);

  auto ex = run("embed " + file("exponential"));
  REQUIRE(ex.code == 2);
  REQUIRE(ex.err.find("Exponential") != std::string::npos);

  auto fin = run("embed " + file("identity"));
  REQUIRE(fin.code == 0);
  REQUIRE(Json::parse(fin.out)["verification"]["passed"] == true);
}

TEST_CASE("cli entropy-profile", "[cli]") {
  auto r = run("entropy-profile --d 2 --nmax 8");
  REQUIRE(r.code == 0);
  REQUIRE(r.out.rfind("# selfsim ", 0) == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.front() == "n,H,support,seconds");
  REQUIRE(rows.size() == 9);
  std::size_t prev = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream in(rows[i]);
    std::string        n, H, support;
    std::getline(in, n, ',');
    std::getline(in, H, ',');
    std::getline(in, support, ',');
    REQUIRE(std::stoul(support) >= prev);
    prev = std::stoul(support);
  }
  auto partial = run("entropy-profile --d 3 --nmax 4 --measure mu --budget-atoms 1000");
  REQUIRE(partial.code == 0);
  REQUIRE(partial.out.find("# partial") != std::string::npos);
  REQUIRE(run("entropy-profile --d 2 --measure nu").code == 2);
}

TEST_CASE("cli return-profile", "[cli]") {
  REQUIRE(run("return-profile --samples 0 --seed 1").code == 2);
  REQUIRE(run("return-profile --samples 10").code == 2);
  REQUIRE(run("return-profile --measure mu --d 3 --samples 10 --seed 1").code == 2);
  std::string const args = "return-profile --d 2 --nmax 12 --step 4 --samples 4000 --seed 11";
  auto              a    = run(args);
  auto              b    = run(args);
  auto              c    = run(args + " --threads 3");
  REQUIRE(a.code == 0);
  REQUIRE(a.out == b.out);
  REQUIRE(a.out == c.out);
  auto rows = csv_rows(a.out);
  REQUIRE(rows.front() == "n,estimate,stderr,samples,seed");
  REQUIRE(rows.size() == 4);
  REQUIRE(a.out != run("return-profile --d 2 --nmax 12 --step 4 --samples 4000 --seed 12").out);
}

TEST_CASE("cli ball-profile", "[cli]") {
  auto rows = csv_rows(run("ball-profile " + file("basilica") + " --radius 3").out);
  REQUIRE(rows.size() == 5);
  REQUIRE(rows[0] == "r,volume,boundary,ratio");
  REQUIRE(rows[1] == "0,1,4,4");
  REQUIRE(rows[2].rfind("1,5,12,", 0) == 0);
}

TEST_CASE("cli check", "[cli]") {
  auto r = run("check --suite appendix --trials 500 --seed 7");
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  REQUIRE(j["passed"] == true);
  REQUIRE(j["checks"].size() == 4);
  for (auto const& c : j["checks"]) {
    REQUIRE(c["violations"] == 0);
    REQUIRE(c["trials"] == 500);
  }
  REQUIRE(run("check --suite appendix --trials 50").code == 2);
  REQUIRE(run("check --suite decomposition --d 2 --nmax 4").code == 0);
  REQUIRE(run("check --suite switch --d 3 --nmax 10").code == 0);
  REQUIRE(run("check --suite first --d 2 --nmax 4").code == 0);
  REQUIRE(run("check --suite sandwich --d 2 --nmax 4").code == 0);
  REQUIRE(run("check --suite nope").code == 2);
  auto bounds = csv_rows(run("check --suite bounds --d 2 --epsilon 0 --nmax 2").out);
  REQUIRE(bounds[0] == "n,rho_bound,iso_bound");
  REQUIRE(bounds[1].rfind("1,0.36787944117144233,", 0) == 0);
}
