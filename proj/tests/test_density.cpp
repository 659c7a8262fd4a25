#include <doctest.h>

#include <random>

#include "finprin/catalog.hpp"
#include "finprin/density.hpp"
#include "finprin/errors.hpp"

using namespace finprin;

namespace {

// Every tree first chases f(255), f(0), f(1), f(2) bit 0, then outputs a
// value depending on the input only. Each read lands on the current
// overflow, so the core loop needs one rewiring round per query.
TreeFamily chase_family(const Language& hop, const Language& wphp) {
  std::size_t f = hop.index_of("f");
  TreeFamily F;
  F.source = hop;
  F.target = wphp;
  F.m = 16;
  F.b0 = 4;
  std::vector<unsigned> chain = {255, 0, 1, 2};
  F.trees.emplace_back(2, 4, [=](std::span<const unsigned> in, const std::vector<bool>& z) {
    if (z.size() < chain.size()) return Label::query({RelevantKey::Kind::FunBit, f, {chain[z.size()]}, 0});
    return Label::output((in[0] * 5 + in[1] * 3) % 16 / 2);
  });
  return F;
}

}  // namespace

TEST_SUITE("density") {
  TEST_CASE("defining one cell follows the model") {
    const auto& php = builtin("PHP");
    auto ctx = make_context(*php.model, 8);
    PartialOracle p(php.sentence.language, 8);
    auto q = extend_define(ctx, p, 0, {0});
    CHECK(q.norm() == 1);
    CHECK(extends(q, p));
    CHECK(partial_of_oracle(q).get(0, std::vector<unsigned>{0}) == 1);
    CHECK(embeds(ctx, q));
    CHECK(extend_define(ctx, q, 0, {0}) == q);
  }

  TEST_CASE("defining the overflow cell moves a free point") {
    const auto& php = builtin("PHP");
    auto ctx = make_context(*php.model, 8);
    PartialOracle p(php.sentence.language, 8);
    auto q = extend_define(ctx, p, 0, {7});
    int v = partial_of_oracle(q).get(0, std::vector<unsigned>{7});
    REQUIRE(v != kUndef);
    CHECK(ctx.e[static_cast<unsigned>(v)] == 8);
    CHECK(embeds(ctx, q));
    CHECK(embeds_by_search(ctx, q));
  }

  TEST_CASE("relations in the inverse order model") {
    const auto& hop = builtin("HOP");
    const auto& L = hop.sentence.language;
    auto ctx = make_context(*hop.model, 16);
    PartialOracle p(L, 16);
    std::size_t prec = L.index_of("prec");
    p = extend_define(ctx, p, prec, {3, 4});
    p = extend_define(ctx, p, prec, {4, 3});
    auto b = partial_of_oracle(p);
    CHECK(b.get(prec, std::vector<unsigned>{3, 4}) == 0);
    CHECK(b.get(prec, std::vector<unsigned>{4, 3}) == 1);
  }

  TEST_CASE("the definition precondition") {
    const auto& php = builtin("PHP");
    auto ctx = make_context(*php.model, 4);
    PartialOracle p(php.sentence.language, 4);
    p = extend_define(ctx, p, 0, {0});
    p = extend_define(ctx, p, 0, {1});
    CHECK(p.norm() == 2);
    CHECK_THROWS_AS(extend_define(ctx, p, 0, {2}), HypothesisError);
    CHECK_THROWS_AS(extend_define(ctx, p, 0, {9}), ContractError);
  }

  TEST_CASE("random definitions keep the structure embedded and non-verifying") {
    std::mt19937_64 rng(21);
    for (const auto& name : {"PHP", "OPHP", "PAR", "HOP", "IND"}) {
      const auto& e = builtin(name);
      const auto& L = e.sentence.language;
      auto ctx = make_context(*e.model, 64);
      PartialOracle p(L, 64);
      for (int k = 0; k < 15; ++k) {
        std::size_t s = rng() % L.size();
        std::vector<unsigned> args;
        for (unsigned i = 0; i < L[s].arity; ++i) args.push_back(rng() % 64);
        p = extend_define(ctx, p, s, args);
      }
      CHECK_MESSAGE(embeds(ctx, p), name);
      CHECK(embeds_by_search(ctx, p));
      CHECK_FALSE(verifies(partial_of_oracle(p), e.sentence));
    }
  }

  TEST_CASE("completing a small family") {
    const auto& hop = builtin("HOP");
    const auto& L = hop.sentence.language;
    const auto& wphp = builtin("WPHP").sentence;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto ctx = make_context(*hop.model, 64);
      PartialOracle p(L, 64);
      auto F = random_family(L, 64, wphp.language, 2, 4, seed);
      auto q = complete_trees_small(ctx, p, F);
      CHECK(build_C(F, q).is_total());
      CHECK(extends(q, p));
      CHECK(q.norm() <= 4u * 1 * 4);
      CHECK(embeds(ctx, q));
    }
    auto ctx = make_context(*hop.model, 40);
    auto F = random_family(L, 40, wphp.language, 2, 4, 1);
    CHECK_THROWS_AS(complete_trees_small(ctx, PartialOracle(L, 40), F), HypothesisError);
  }

  TEST_CASE("constant trees need nothing") {
    const auto& hop = builtin("HOP");
    const auto& wphp = builtin("WPHP").sentence;
    TreeFamily F;
    F.source = hop.sentence.language;
    F.target = wphp.language;
    F.m = 2;
    F.b0 = 0;
    F.trees = {DecisionTree::constant(2, 1)};
    auto ctx = make_context(*hop.model, 16);
    PartialOracle p(F.source, 16);
    CHECK(complete_trees_small(ctx, p, F) == p);
  }

  TEST_CASE("core extension on random families") {
    const auto& hop = builtin("HOP");
    const auto& wphp = builtin("WPHP").sentence;
    const std::size_t bound = 4 * formula_size(wphp);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto ctx = make_context(*hop.model, 256);
      PartialOracle p(hop.sentence.language, 256);
      auto F = random_family(hop.sentence.language, 256, wphp.language, 16, 4, seed);
      auto r = core_extend(ctx, p, F, wphp, 17);
      CHECK(verifies(build_C(F, r.q), wphp));
      CHECK(extends(r.q, p));
      CHECK(r.q.norm() <= bound);
      CHECK(r.q.norm() <= r.unpruned_norm);
      CHECK(embeds(ctx, r.q));
      CHECK(embeds_by_search(ctx, r.q));
      CHECK_FALSE(verifies(partial_of_oracle(r.q), hop.sentence));
    }
  }

  TEST_CASE("the chase family forces rewiring rounds") {
    const auto& hop = builtin("HOP");
    const auto& wphp = builtin("WPHP").sentence;
    auto F = chase_family(hop.sentence.language, wphp.language);
    auto ctx = make_context(*hop.model, 256);
    PartialOracle p(hop.sentence.language, 256);
    std::vector<std::string> lines;
    auto r = core_extend(ctx, p, F, wphp, 17, [&](const std::string& l) { lines.push_back(l); });
    CHECK(r.iterations == 4);
    CHECK(lines.size() == 5);
    CHECK(lines.back().find("\"verified\":true") != std::string::npos);
    CHECK(verifies(build_C(F, r.q), wphp));
    CHECK(r.q.norm() == 4);
    CHECK(embeds_by_search(ctx, r.q));
  }

  TEST_CASE("core extension hypotheses") {
    const auto& hop = builtin("HOP");
    const auto& wphp = builtin("WPHP").sentence;
    const auto& L = hop.sentence.language;
    {
      auto ctx = make_context(*hop.model, 256);
      auto F = random_family(L, 256, wphp.language, 4, 4, 1);
      try {
        core_extend(ctx, PartialOracle(L, 256), F, wphp, 5);
        FAIL("expected a hypothesis error");
      } catch (const HypothesisError& e) {
        CHECK(std::string(e.what()).find("(iii)") != std::string::npos);
        CHECK(std::string(e.what()).find("16 < 2*4*5 = 40") != std::string::npos);
      }
    }
    {
      auto ctx = make_context(*hop.model, 64);
      auto F = random_family(L, 64, wphp.language, 16, 4, 1);
      CHECK_THROWS_WITH_AS(core_extend(ctx, PartialOracle(L, 64), F, wphp, 17), doctest::Contains("(ii)"),
                           HypothesisError);
    }
  }

  TEST_CASE("pruning to a witness") {
    const auto& hop = builtin("HOP");
    const auto& wphp = builtin("WPHP").sentence;
    const auto& L = hop.sentence.language;
    auto ctx = make_context(*hop.model, 256);
    PartialOracle p(L, 256);
    auto F = random_family(L, 256, wphp.language, 16, 4, 3);
    auto r = core_extend(ctx, p, F, wphp, 17);
    auto again = prune_to_witness(r.q, p, F, wphp);
    CHECK(again.norm() <= r.q.norm());
    CHECK(verifies(build_C(F, again), wphp));
    CHECK_THROWS_AS(prune_to_witness(p, p, chase_family(L, wphp.language), wphp), ContractError);
  }
}
