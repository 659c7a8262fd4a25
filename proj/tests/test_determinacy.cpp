#include <doctest.h>

#include <cmath>

#include "finprin/catalog.hpp"
#include "finprin/determinacy.hpp"
#include "finprin/errors.hpp"
#include "oracles.hpp"

using namespace finprin;

namespace {

SearchOptions opts(SearchMode m) {
  SearchOptions o;
  o.mode = m;
  o.node_cap = 100'000'000;
  return o;
}

}  // namespace

TEST_SUITE("determinacy") {
  TEST_CASE("small values") {
    CHECK(determinacy(builtin("WPHP").sentence, 2).d == 3);
    CHECK(determinacy(builtin("PHP").sentence, 2).d == 3);
    CHECK(determinacy(builtin("HOP").sentence, 2).d == 6);
    CHECK(determinacy(builtin("PAR").sentence, 3).d == 3);
    CHECK(determinacy(builtin("ITER").sentence, 3).d == 3);
    auto r = determinacy(builtin("WPHP").sentence, 2);
    CHECK(r.s_L == 4);
    REQUIRE(r.witness);
    CHECK(r.witness->size() == 2);
    CHECK_FALSE(verifies(*r.witness, builtin("WPHP").sentence));
  }

  TEST_CASE("both search modes agree with full enumeration at n = 2") {
    // HAP has 3^14 partial structures on [2]; the rest enumerate quickly.
    for (const auto& name : builtin_names()) {
      if (name == "HAP") continue;
      const auto& s = builtin(name).sentence;
      auto expect = oracle::determinacy(s, 2);
      auto bnb = determinacy(s, 2, opts(SearchMode::BranchAndBound));
      auto ex = determinacy(s, 2, opts(SearchMode::Exhaustive));
      CHECK_MESSAGE(bnb.d == expect, name);
      CHECK_MESSAGE(ex.d == expect, name);
      REQUIRE(bnb.witness);
      CHECK(bnb.witness->size() + 1 == bnb.d);
      CHECK_FALSE(oracle::verifies(*bnb.witness, s));
    }
  }

  TEST_CASE("branch and bound matches the exhaustive search at n = 3") {
    for (const auto& name : {"PHP", "OPHP", "LPHP", "WPHP", "WPHP'", "PAR", "HOP", "ITER"}) {
      const auto& s = builtin(name).sentence;
      auto a = determinacy(s, 3, opts(SearchMode::BranchAndBound));
      auto b = determinacy(s, 3, opts(SearchMode::Exhaustive));
      CHECK_MESSAGE(a.d == b.d, name);
      auto closed = builtin(name).determinacy ? builtin(name).determinacy(3) : std::nullopt;
      if (closed) CHECK_MESSAGE(a.d == *closed, name);
    }
  }

  TEST_CASE("a trivially true sentence is degenerate") {
    auto s = parse_principle("principle T { language { f/1 fun } exists x . x=x }");
    auto r = determinacy(s, 3);
    CHECK(r.degenerate);
    CHECK(r.d == 0);
    CHECK_FALSE(max_nonverifying(s, 3));
  }

  TEST_CASE("node cap") {
    SearchOptions o;
    o.mode = SearchMode::Exhaustive;
    o.node_cap = 10;
    CHECK_THROWS_AS(determinacy(builtin("HOP").sentence, 3, o), CapExceeded);
    try {
      determinacy(builtin("HOP").sentence, 3, o);
    } catch (const CapExceeded& e) {
      CHECK(e.estimate() > 10);
    }
  }

  TEST_CASE("weakness report for WPHP") {
    auto r = weakness_report(builtin("WPHP").sentence, {2, 3, 4});
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].ratio == doctest::Approx(4.0 / 3));
    CHECK(r.rows[1].ratio == doctest::Approx(9.0 / 4));
    CHECK(r.rows[2].ratio == doctest::Approx(16.0 / 5));
    REQUIRE(r.exponent);
    CHECK(*r.exponent > 0.5);
    auto p = weakness_report(builtin("PHP").sentence, {2, 3, 4});
    for (const auto& row : p.rows) CHECK(row.ratio == doctest::Approx(1.0));
  }
}
