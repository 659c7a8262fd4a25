#include <doctest.h>

#include <random>

#include "finprin/catalog.hpp"
#include "finprin/errors.hpp"
#include "finprin/partial.hpp"
#include "oracles.hpp"

using namespace finprin;

TEST_SUITE("partial") {
  TEST_CASE("Kleene connectives") {
    CHECK(t_and(Truth::True, Truth::Half) == Truth::Half);
    CHECK(t_and(Truth::False, Truth::Half) == Truth::False);
    CHECK(t_or(Truth::True, Truth::Half) == Truth::True);
    CHECK(t_or(Truth::False, Truth::Half) == Truth::Half);
    CHECK(t_not(Truth::Half) == Truth::Half);
    CHECK(t_not(Truth::True) == Truth::False);
  }

  TEST_CASE("an undefined cell evaluates to one half") {
    Language lang({{"f", SymbolKind::Function, 1}});
    PartialStructure a(lang, 2);
    auto f = Formula::eq(Term::apply(0, {Term::param(0)}), Term::param(0));
    CHECK(eval3(a, f) == Truth::Half);
    a.set(0, std::vector<unsigned>{0}, 0);
    CHECK(eval3(a, f) == Truth::True);
    a.set(0, std::vector<unsigned>{0}, 1);
    CHECK(eval3(a, f) == Truth::False);
    CHECK_THROWS_AS(a.set(0, std::vector<unsigned>{0}, 2), ContractError);
    CHECK_THROWS_AS(eval3(a, Formula::eq(Term::var("x"), Term::param(0))), ContractError);
  }

  TEST_CASE("the empty structure verifies no catalog principle") {
    for (const auto& name : builtin_names()) {
      const auto& s = builtin(name).sentence;
      for (unsigned n = 1; n <= 4; ++n) {
        PartialStructure a(s.language, n);
        CHECK_MESSAGE(eval3(a, s) != Truth::True, name);
        CHECK_FALSE(verifies(a, s));
      }
    }
  }

  TEST_CASE("identity with c = 0 verifies PHP") {
    const auto& s = builtin("PHP").sentence;
    PartialStructure a(s.language, 3);
    for (unsigned i = 0; i < 3; ++i) a.set(0, std::vector<unsigned>{i}, static_cast<int>(i));
    a.set(1, std::vector<unsigned>{}, 0);
    CHECK(a.is_total());
    CHECK(a.size() == 4);
    CHECK(verifies(a, s));
    auto w = Matcher(s).find(a);
    REQUIRE(w);
    CHECK(w->disjunct == 1);
    CHECK(w->values[0] == 0);
  }

  TEST_CASE("three-valued evaluation agrees with brute force") {
    std::mt19937_64 rng(11);
    for (const auto& name : builtin_names()) {
      const auto& s = builtin(name).sentence;
      Matcher m(s);
      for (int k = 0; k < 150; ++k) {
        unsigned n = 1 + rng() % 3;
        auto a = oracle::random_partial(s.language, n, rng, k % 3);
        bool expect = oracle::verifies(a, s);
        CHECK_MESSAGE(verifies(a, s) == expect, name << " " << render_structure(a));
        CHECK(m.verifies(a) == expect);
        CHECK((eval3(a, s) == Truth::True) == expect);
        if (a.is_total()) CHECK(eval3(a, s) != Truth::Half);
        if (auto w = m.find(a)) {
          for (const auto& l : s.matrix[w->disjunct]) CHECK(literal_value(a, l, w->values) == Truth::True);
        }
      }
    }
  }

  TEST_CASE("general formulas agree with the basic-sentence evaluator") {
    std::mt19937_64 rng(5);
    for (const auto& name : {"PHP", "HOP", "IND", "ITER"}) {
      const auto& s = builtin(name).sentence;
      auto f = to_formula(s);
      for (int k = 0; k < 60; ++k) {
        auto a = oracle::random_partial(s.language, 1 + rng() % 3, rng);
        CHECK(eval3(a, f) == eval3(a, s));
      }
    }
  }

  TEST_CASE("verification is monotone under extension") {
    std::mt19937_64 rng(3);
    for (const auto& name : builtin_names()) {
      const auto& s = builtin(name).sentence;
      for (int k = 0; k < 100; ++k) {
        unsigned n = 1 + rng() % 3;
        auto a = oracle::random_partial(s.language, n, rng, 2);
        auto b = a;
        for (std::size_t c = 0; c < b.cell_count(); ++c)
          if (b.get(c) == kUndef && rng() % 2) {
            int range = s.language[b.symbol_of(c)].is_function() ? static_cast<int>(n) : 2;
            b.set(c, static_cast<int>(rng() % range));
          }
        CHECK(b.extends(a));
        if (verifies(a, s)) CHECK(verifies(b, s));
      }
    }
  }

  TEST_CASE("verification is preserved from induced substructures") {
    std::mt19937_64 rng(8);
    for (const auto& name : builtin_names()) {
      const auto& s = builtin(name).sentence;
      if (s.language.builtin_order() || !s.language.numerals().empty()) continue;
      for (int k = 0; k < 100; ++k) {
        unsigned n = 2 + rng() % 3;
        auto a = oracle::random_partial(s.language, n, rng, 0);
        std::vector<unsigned> pts;
        for (unsigned i = 0; i < n; ++i)
          if (rng() % 2) pts.push_back(i);
        auto b = induced_substructure(a, pts);
        CHECK(b.n() == pts.size());
        CHECK(is_embedding(b, a, pts));
        if (verifies(b, s)) CHECK(verifies(a, s));
      }
    }
  }

  TEST_CASE("induced substructure of the successor model") {
    const auto& php = builtin("PHP");
    auto b = induced_substructure(*php.model, {0, 1, 2});
    CHECK(render_structure(b) == "f(0)=1 f(1)=2 c()=0");
    CHECK(b.get(0, std::vector<unsigned>{2}) == kUndef);
  }

  TEST_CASE("embedding search") {
    const auto& php = builtin("PHP");
    const auto& par = builtin("PAR");
    PartialStructure empty(php.sentence.language, 3);
    auto host = induced_substructure(*php.model, {0, 1, 2, 3});
    CHECK(find_embedding(empty, host));

    PartialStructure chain(php.sentence.language, 2);
    chain.set(0, std::vector<unsigned>{0}, 1);
    auto e = find_embedding(chain, host);
    REQUIRE(e);
    CHECK(is_embedding(chain, host, *e));
    CHECK((*e)[1] == (*e)[0] + 1);

    PartialStructure loop(par.sentence.language, 1);
    loop.set(0, std::vector<unsigned>{0}, 0);
    CHECK_FALSE(find_embedding(loop, induced_substructure(*par.model, {0, 1, 2, 3})));

    std::vector<int> hint = {2, kUndef};
    auto h = find_embedding(chain, host, &hint);
    REQUIRE(h);
    CHECK((*h)[0] == 2);
  }

  TEST_CASE("active points") {
    Language lang({{"f", SymbolKind::Function, 1}, {"R", SymbolKind::Relation, 2}});
    PartialStructure a(lang, 6);
    a.set(0, std::vector<unsigned>{1}, 4);
    a.set(1, std::vector<unsigned>{2, 5}, 0);
    CHECK(active_points(a) == std::vector<unsigned>{1, 2, 4, 5});
  }

  TEST_CASE("JSON round-trip") {
    std::mt19937_64 rng(2);
    for (const auto& name : builtin_names()) {
      const auto& s = builtin(name).sentence;
      auto a = oracle::random_partial(s.language, 3, rng);
      CHECK(structure_from_json(to_json(a), s.language) == a);
    }
    CHECK_THROWS(structure_from_json(R"({"n": 2, "fun": {"f": [5, null]}, "rel": {}})",
                                     builtin("PHP").sentence.language));
  }
}
