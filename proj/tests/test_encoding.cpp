#include <doctest.h>

#include <random>

#include "finprin/catalog.hpp"
#include "finprin/encoding.hpp"
#include "finprin/errors.hpp"
#include "oracles.hpp"

using namespace finprin;

namespace {

Language f1() { return Language({{"f", SymbolKind::Function, 1}}); }

}  // namespace

TEST_SUITE("encoding") {
  TEST_CASE("binary length") {
    CHECK(len(1) == 1);
    CHECK(len(2) == 2);
    CHECK(len(3) == 2);
    CHECK(len(4) == 3);
    CHECK(len(7) == 3);
    CHECK(len(8) == 4);
    CHECK(len(256) == 9);
  }

  TEST_CASE("relevant elements") {
    CHECK(relevant_elements(f1(), 2).size() == 4);
    CHECK(relevant_elements(builtin("PHP").sentence.language, 3).size() == 3 * 2 + 2);
    CHECK(relevant_elements(builtin("HOP").sentence.language, 4).size() == 4 * 3 + 16);
    KeySpace ks(builtin("PHP").sentence.language, 3);
    auto keys = relevant_elements(ks.language(), 3);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      CHECK(ks.index(keys[i]) == i);
      CHECK(ks.key(i) == keys[i]);
      CHECK(ks.parse_key(ks.render(keys[i])) == keys[i]);
    }
    CHECK(ks.render(keys[0]) == "f(0)[0]");
    CHECK(ks.render(keys.back()) == "c()[1]");
  }

  TEST_CASE("key parsing") {
    KeySpace ks(builtin("HOP").sentence.language, 4);
    auto k = ks.parse_key("prec(1,3)");
    CHECK(ks.is_relevant(k));
    CHECK_FALSE(ks.is_relevant(ks.parse_key("f(9)[0]")));
    CHECK_FALSE(ks.is_relevant(ks.parse_key("f(1)[3]")));
    CHECK_THROWS_AS(ks.index(ks.parse_key("f(1)[3]")), ContractError);
    CHECK_THROWS_AS(ks.parse_key("g(1)[0]"), SyntaxError);
    CHECK_THROWS_AS(ks.parse_key("f(1"), SyntaxError);
    auto u = ks.parse_unary("f(2)=3");
    CHECK(ks.is_valid(u));
    CHECK(ks.unary_key(ks.unary_index(u)) == u);
    CHECK(ks.render(u) == "f(2)=3");
  }

  TEST_CASE("decoding clamps to n - 1") {
    FullOracle a(f1(), 3);
    // f(0) = 3 in binary, clamped to 2; f(1) = 1; f(2) = 0.
    a.bits = {1, 1, 1, 0, 0, 0};
    auto s = decode_binary(a);
    CHECK(s.get(0, std::vector<unsigned>{0}) == 2);
    CHECK(s.get(0, std::vector<unsigned>{1}) == 1);
    CHECK(s.get(0, std::vector<unsigned>{2}) == 0);
    CHECK(s.is_total());
  }

  TEST_CASE("unary codes") {
    PartialStructure id(f1(), 3);
    for (unsigned i = 0; i < 3; ++i) id.set(0, std::vector<unsigned>{i}, static_cast<int>(i));
    auto u = encode_unary(id);
    CHECK(u.keys().size() == 3);
    CHECK(decode_unary(u).structure == id);
    u.bits[u.space.unary_index({UnaryKey::Kind::FunGraph, 0, {1}, 2})] = 1;
    auto bad = decode_unary(u);
    CHECK_FALSE(bad.structure);
    CHECK(bad.problem.find("f(1)") != std::string::npos);
    UnaryCode none(f1(), 3);
    CHECK_FALSE(decode_unary(none).structure);
    CHECK_FALSE(binary_from_unary(none));
  }

  TEST_CASE("exhaustive round-trips at n = 2 for a unary function") {
    FullOracle a(f1(), 2);
    std::size_t count = 0;
    for (unsigned mask = 0; mask < 16; ++mask) {
      for (std::size_t i = 0; i < 4; ++i) a.bits[i] = (mask >> i) & 1;
      auto s = decode_binary(a);
      auto u = unary_from_binary(a);
      CHECK(decode_unary(u).structure == s);
      auto back = binary_from_unary(u);
      REQUIRE(back);
      CHECK(decode_binary(*back) == s);
      CHECK(decode_binary(encode_binary(s)) == s);
      auto p = oracle_of_partial(s);
      CHECK(partial_of_oracle(p) == s);
      CHECK(p.norm() == s.size());
      ++count;
    }
    CHECK(count == 16);
  }

  TEST_CASE("randomized round-trips") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 2000; ++k) {
      const auto name = builtin_names()[rng() % builtin_names().size()];
      const auto& lang = builtin(name).sentence.language;
      unsigned n = 1 + rng() % 8;
      if (s_L(lang, n) > 600) n = 2;
      auto a = oracle::random_oracle(lang, n, rng);
      auto s = decode_binary(a);
      CHECK(decode_unary(unary_from_binary(a)).structure == s);
      CHECK(decode_binary(encode_binary(s)) == s);
      auto partial = oracle::random_partial(lang, n, rng);
      auto p = oracle_of_partial(partial);
      CHECK(p.well_formed());
      CHECK(partial_of_oracle(p) == partial);
      CHECK(p.norm() == partial.size());
      CHECK(parse_dump(dump(p), lang, n) == p);
    }
  }

  TEST_CASE("partial oracle of one defined value") {
    PartialStructure a(f1(), 2);
    a.set(0, std::vector<unsigned>{0}, 1);
    auto p = oracle_of_partial(a);
    CHECK(p.p1() == std::vector<RelevantKey>{{RelevantKey::Kind::FunBit, 0, {0}, 0}});
    CHECK(p.p0() == std::vector<RelevantKey>{{RelevantKey::Kind::FunBit, 0, {0}, 1}});
    CHECK(p.norm() == 1);
    CHECK(dump(p) == "+f(0)[0]\n-f(0)[1]\n");
  }

  TEST_CASE("norm counts whole blocks only") {
    PartialOracle p(f1(), 4);
    p.state[0] = 1;
    CHECK(p.norm() == 0);
    CHECK_FALSE(p.well_formed());
    p.state[1] = 0;
    p.state[2] = 0;
    CHECK(p.norm() == 1);
    CHECK(p.well_formed());
  }

  TEST_CASE("extensions, completions and consistency") {
    std::mt19937_64 rng(4);
    const auto& lang = builtin("HOP").sentence.language;
    for (int k = 0; k < 200; ++k) {
      auto small = oracle::random_partial(lang, 4, rng, 2);
      auto big = small;
      for (std::size_t c = 0; c < big.cell_count(); ++c)
        if (big.get(c) == kUndef && rng() % 4 == 0)
          big.set(c, static_cast<int>(rng() % (lang[big.symbol_of(c)].is_function() ? 4 : 2)));
      auto p = oracle_of_partial(small), q = oracle_of_partial(big);
      CHECK(extends(q, p));
      CHECK(extends(p, p));
      CHECK(is_b_extension(q, p, big.size() - small.size()));
      if (big.size() > small.size()) {
        CHECK_FALSE(extends(p, q));
        CHECK_FALSE(is_b_extension(q, p, big.size() - small.size() - 1));
      }
      auto full = complete(q, rng() & 1);
      CHECK(consistent(full, q));
      CHECK(consistent(full, p));
      CHECK(decode_binary(full).extends(big));
    }
  }
}
