#include <doctest.h>

#include <random>

#include "finprin/catalog.hpp"
#include "finprin/errors.hpp"
#include "oracles.hpp"

using namespace finprin;

TEST_SUITE("catalog") {
  TEST_CASE("names and lookup") {
    auto names = builtin_names();
    std::vector<std::string> expect = {"PHP", "OPHP", "LPHP", "WPHP", "WPHP'", "rPHP",
                                       "PAR", "HOP", "IND",  "HAP",  "HDP",   "ITER"};
    CHECK(names == expect);
    CHECK_THROWS_AS(builtin("NOPE"), ContractError);
    for (const auto& n : names) {
      CHECK(builtin(n).name == n);
      CHECK_FALSE(describe(builtin(n)).empty());
    }
  }

  TEST_CASE("languages") {
    const auto& hop = builtin("HOP").sentence;
    CHECK(hop.language.size() == 2);
    CHECK(hop.language[*hop.language.find("prec")].arity == 2);
    CHECK(hop.matrix.size() == 3);
    const auto& iter = builtin("ITER").sentence;
    CHECK(iter.language.builtin_order());
    CHECK(iter.language.has_numeral(0));
    CHECK(builtin("WPHP").sentence.language.r() == 3);
  }

  TEST_CASE("flags") {
    CHECK(builtin("PHP").strong.value_or(false));
    CHECK(builtin("WPHP").weak.value_or(false));
    CHECK(builtin("HOP").strong.value_or(false));
    CHECK_FALSE(builtin("PAR").valid_in_finite);
    CHECK(builtin("HAP").validity == "n >= 2");
    for (const auto& n : builtin_names())
      if (builtin(n).strong.value_or(false)) CHECK_MESSAGE(builtin(n).model.has_value(), n);
  }

  TEST_CASE("valid-in-the-finite principles hold on every small total structure") {
    for (const auto& name : builtin_names()) {
      const auto& e = builtin(name);
      if (!e.valid_in_finite) continue;
      for (unsigned n = 2; n <= 2; ++n) {
        if (s_L(e.sentence.language, n) > 16) continue;
        bool all = true;
        oracle::for_each_total(e.sentence.language, n, [&](const PartialStructure& a) {
          if (all && !oracle::verifies(a, e.sentence)) all = false;
        });
        CHECK_MESSAGE(all, name);
      }
    }
  }

  TEST_CASE("PAR fails on even universes and holds on odd ones") {
    const auto& par = builtin("PAR").sentence;
    for (unsigned n = 1; n <= 4; ++n) {
      bool all = true;
      oracle::for_each_total(par.language, n, [&](const PartialStructure& a) {
        if (!oracle::verifies(a, par)) all = false;
      });
      CHECK(all == (n % 2 == 1));
    }
  }

  TEST_CASE("HAP fails on the one-point algebra") {
    const auto& hap = builtin("HAP").sentence;
    PartialStructure a(hap.language, 1);
    for (std::size_t c = 0; c < a.cell_count(); ++c) a.set(c, 0);
    CHECK_FALSE(oracle::verifies(a, hap));
    CHECK_FALSE(verifies(a, hap));
  }

  TEST_CASE("overflow sets") {
    const auto& php = *builtin("PHP").model;
    CHECK(overflow_set(php, {0, 1, 2}) == std::vector<Point>{3});
    CHECK(overflow_set(php, {}) == std::vector<Point>{0});  // the constant
    CHECK(overflow_set(php, {0, 2}) == std::vector<Point>{1, 3});
    const auto& hop = *builtin("HOP").model;
    for (unsigned n : {1u, 5u, 40u}) CHECK(overflow_set(hop, hop.canonical_slice(n)) == std::vector<Point>{n});
    const auto& par = *builtin("PAR").model;
    CHECK(overflow_set(par, {0, 1, 2, 3}).empty());
    CHECK(overflow_set(par, {0, 1, 2}) == std::vector<Point>{3});
  }

  TEST_CASE("registered models are large and falsify their principle") {
    std::mt19937_64 rng(1);
    for (const auto& name : builtin_names()) {
      const auto& e = builtin(name);
      if (!e.model) continue;
      for (unsigned n : {1u, 2u, 8u, 33u, 64u}) {
        auto r = check_largeness(*e.model, n, 20, rng);
        CHECK_MESSAGE(r.ok(), name << " n=" << n);
        CHECK(r.overflow <= (name == "IND" ? 2u : 1u));
      }
      for (unsigned n = 1; n <= 8; ++n) {
        auto b = induced_substructure(*e.model, e.model->canonical_slice(n));
        CHECK_MESSAGE(!verifies(b, e.sentence), name << " n=" << n);
        CHECK(!oracle::verifies(b, e.sentence));
      }
    }
  }
}
