#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "finprin/cli.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "finprin");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  Result r;
  r.code = finprin::run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_file(const std::string& name, const std::string& content) {
  std::string path = "/tmp/finprin_test_" + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("principle list and show") {
    auto r = run({"principle", "list"});
    CHECK(r.code == 0);
    CHECK(r.out.find("WPHP") != std::string::npos);
    CHECK(r.out.find("HDP") != std::string::npos);
    auto s = run({"principle", "show", "PHP"});
    CHECK(s.code == 0);
    CHECK(s.out.find("f(x)=u") != std::string::npos);
    auto j = run({"principle", "show", "PHP", "--format", "json"});
    CHECK(j.code == 0);
    CHECK(j.out.find("\"language\"") != std::string::npos);
  }

  TEST_CASE("principle show reads a DSL file") {
    auto path = temp_file("p.fp", "principle T { language { f/1 fun } exists x . f(x)=x }");
    auto r = run({"principle", "show", path});
    CHECK(r.code == 0);
    CHECK(r.out.find("principle T") != std::string::npos);
    auto bad = temp_file("bad.fp", "principle T { language { f/1 fun } exists x . f(f(x))=x }");
    auto e = run({"principle", "show", bad});
    CHECK(e.code == 2);
    CHECK(e.err.find("non-basic") != std::string::npos);
  }

  TEST_CASE("determinacy table") {
    auto r = run({"determinacy", "WPHP", "--n", "2..3"});
    CHECK(r.code == 0);
    CHECK(r.out == "n\td\ts_L\n2\t3\t4\n3\t4\t9\n");
    auto ex = run({"determinacy", "PHP", "--n", "2..3", "--mode", "exhaustive"});
    CHECK(ex.out == "n\td\ts_L\n2\t3\t3\n3\t4\t4\n");
    auto j = run({"determinacy", "HOP", "--n", "2", "--format", "json"});
    CHECK(j.code == 0);
    CHECK(j.out.find("\"d\":6") != std::string::npos);
  }

  TEST_CASE("exit codes") {
    CHECK(run({}).code == 2);
    CHECK(run({"determinacy", "WPHP"}).code == 2);
    CHECK(run({"determinacy", "NOPE", "--n", "2"}).code == 2);
    CHECK(run({"translate", "PHP", "--n", "0", "--binary"}).code == 2);
    auto h = run({"demo", "core-lemma", "--m", "4", "--families", "1"});
    CHECK(h.code == 3);
    CHECK(h.err.find("16 < 2*4*5 = 40") != std::string::npos);
    setenv("FINPRIN_NODE_CAP", "10", 1);
    auto c = run({"determinacy", "HOP", "--n", "3", "--mode", "exhaustive"});
    unsetenv("FINPRIN_NODE_CAP");
    CHECK(c.code == 4);
    CHECK(c.err.find("cap") != std::string::npos);
  }

  TEST_CASE("largeness") {
    auto r = run({"largeness", "IND", "--n", "1..16", "--samples", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("16") != std::string::npos);
    CHECK(run({"largeness", "WPHP", "--n", "4"}).code != 0);
  }

  TEST_CASE("translate to DIMACS") {
    auto a = run({"translate", "WPHP", "--n", "2", "--unary", "--simplify", "--cnf", "direct", "--check"});
    CHECK(a.code == 0);
    CHECK(a.out.find("p cnf 8 44") != std::string::npos);
    CHECK(a.err.find("UNSAT") != std::string::npos);
    auto b = run({"translate", "WPHP", "--n", "2", "--unary", "--simplify", "--cnf", "direct", "--check"});
    CHECK(a.out == b.out);
    auto t = run({"translate", "PHP", "--n", "2", "--binary", "--cnf", "tseitin", "--check"});
    CHECK(t.code == 0);
    CHECK(t.err.find("UNSAT") != std::string::npos);
    auto f = run({"translate", "PHP", "--n", "2", "--binary", "--simplify"});
    CHECK(f.code == 0);
    CHECK(f.out.rfind("# PHP n=2", 0) == 0);
    CHECK(f.out.find("\nor(") != std::string::npos);
    std::string path = "/tmp/finprin_test_out.cnf";
    auto o = run({"translate", "PHP", "--n", "2", "--binary", "--expand", "--cnf", "direct", "-o", path});
    CHECK(o.code == 0);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("p cnf 6 ") != std::string::npos);
    CHECK(run({"translate", "PHP", "--n", "2"}).code == 2);
  }

  TEST_CASE("adversary") {
    auto s = run({"adversary", "serve", "PHP", "--n", "64", "--budget", "5"}, "Q f(0)[0]\nQ bad(\nCLAIM 1 0 0 0\n");
    CHECK(s.code == 0);
    CHECK(s.out.find("A ") == 0);
    CHECK(s.out.find("ERROR") != std::string::npos);
    CHECK(s.out.find("REFUTED") != std::string::npos);
    auto p = run({"adversary", "play", "PHP", "--n", "64", "--budget", "20", "--plays", "30"});
    CHECK(p.code == 0);
    CHECK(p.out.find("30/30") != std::string::npos);
    CHECK(run({"adversary", "play", "WPHP", "--n", "64"}).code != 0);
  }

  TEST_CASE("core lemma demo") {
    std::string trace = "/tmp/finprin_test_trace.jsonl";
    std::remove(trace.c_str());
    auto r = run({"demo", "core-lemma", "--families", "3", "--trace", trace});
    CHECK(r.code == 0);
    CHECK(r.out.find("3/3") != std::string::npos);
    std::ifstream in(trace);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.find("\"iteration\"") != std::string::npos);
  }

  TEST_CASE("reductions") {
    auto l = run({"reduce", "list"});
    CHECK(l.code == 0);
    CHECK(l.out.find("IND_PHP\tIND\tPHP") != std::string::npos);
    auto s = run({"reduce", "show", "IND_PHP"});
    CHECK(s.out.find("interpretation IND_PHP from IND to PHP") != std::string::npos);
    auto c = run({"reduce", "check", "IND_HOP", "--n", "2", "--samples", "20", "--sample-n", "5"});
    CHECK(c.code == 0);
    CHECK(c.out.find("ok") != std::string::npos);

    std::string ind = R"({"n": 3, "fun": {"s": [1, 2, 2], "min": [0], "max": [2]},
                          "rel": {"P": [1, 1, 0], "prec": [0, 1, 1, 0, 0, 1, 0, 0, 0]}})";
    auto path = temp_file("ind.json", ind);
    auto a = run({"reduce", "apply", "IND_PHP", "--structure", path});
    CHECK(a.code == 0);
    CHECK(a.out.find("\"f\"") != std::string::npos);
    auto p = run({"reduce", "pullback", "IND_PHP", "--structure", path});
    CHECK(p.code == 0);
    CHECK(p.out.find("\"source\"") != std::string::npos);
    auto sol = run({"solve", "IND", "--structure", path});
    CHECK(sol.code == 0);
  }
}
