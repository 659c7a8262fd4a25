#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "finprin/catalog.hpp"
#include "finprin/errors.hpp"
#include "finprin/translate.hpp"
#include "oracles.hpp"

using namespace finprin;
using K = PropFormula::Kind;

namespace {

PropFormula x(unsigned v) { return PropFormula::lit(v); }
PropFormula nx(unsigned v) { return PropFormula::lit(v, false); }

std::vector<std::uint8_t> bits_of(std::uint64_t mask, unsigned vars) {
  std::vector<std::uint8_t> a(vars + 1, 0);
  for (unsigned i = 1; i <= vars; ++i) a[i] = (mask >> (i - 1)) & 1;
  return a;
}

PropFormula random_formula(std::mt19937_64& rng, unsigned vars, int depth) {
  if (depth == 0 || rng() % 4 == 0) {
    if (rng() % 10 == 0) return PropFormula::constant(rng() & 1);
    return PropFormula::lit(1 + rng() % vars, rng() & 1);
  }
  std::vector<PropFormula> kids;
  std::size_t k = 1 + rng() % 3;
  for (std::size_t i = 0; i < k; ++i) kids.push_back(random_formula(rng, vars, depth - 1));
  return rng() & 1 ? PropFormula::conj(std::move(kids)) : PropFormula::disj(std::move(kids));
}

// Every assignment satisfies the CNF's clauses restricted to original
// variables; auxiliaries are searched by brute force when present.
bool cnf_sat_brute(const Cnf& c) {
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << c.num_vars); ++m) {
    bool all = true;
    for (const auto& cl : c.clauses) {
      bool any = false;
      for (int l : cl) {
        bool v = (m >> (std::abs(l) - 1)) & 1;
        if ((l > 0) == v) {
          any = true;
          break;
        }
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

bool is_tautology_brute(const PropFormula& f, unsigned vars) {
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << vars); ++m)
    if (!evaluate(f, bits_of(m, vars))) return false;
  return true;
}

struct Census {
  std::size_t negated = 0;      // one cell has no value
  std::size_t same_cell = 0;    // one cell has two values
  std::size_t same_value = 0;   // two cells share a value
  std::set<std::pair<std::size_t, std::size_t>> distinct_same_value;
  std::size_t other = 0;
};

Census wphp_census(unsigned n) {
  auto t = unary_translation(builtin("WPHP").sentence, n);
  auto s = simplify_constants(t.formula);
  Census c;
  REQUIRE(s.kind == K::Or);
  for (const auto& term : s.children) {
    if (term.kind != K::And) {
      ++c.other;
      continue;
    }
    bool all_neg = true, all_pos = true;
    for (const auto& l : term.children) {
      all_neg &= l.kind == K::NegVar;
      all_pos &= l.kind == K::Var;
    }
    if (all_neg && term.children.size() == n) {
      ++c.negated;
    } else if (all_pos && term.children.size() == 2) {
      auto a = t.space.unary_key(term.children[0].var - 1);
      auto b = t.space.unary_key(term.children[1].var - 1);
      if (a.tuple == b.tuple && a.value != b.value) {
        ++c.same_cell;
      } else if (a.tuple != b.tuple && a.value == b.value) {
        ++c.same_value;
        c.distinct_same_value.insert({term.children[0].var, term.children[1].var});
      } else {
        ++c.other;
      }
    } else {
      ++c.other;
    }
  }
  return c;
}

}  // namespace

TEST_SUITE("translate") {
  TEST_CASE("constant elimination") {
    using P = PropFormula;
    CHECK(simplify_constants(P::disj({P::constant(false), x(1)})) == x(1));
    CHECK(simplify_constants(P::conj({P::constant(true), x(1), x(2)})) == P::conj({x(1), x(2)}));
    CHECK(simplify_constants(P::conj({P::constant(false), x(1)})) == P::constant(false));
    CHECK(simplify_constants(P::disj({x(3), P::constant(true)})) == P::constant(true));
    CHECK(simplify_constants(P::disj({P::disj({x(1), x(2)}), P::conj({x(3)})})) == P::disj({x(1), x(2), x(3)}));
    CHECK(simplify_constants(P::conj({P::disj({P::constant(false)}), x(1)})) == P::constant(false));
  }

  TEST_CASE("negation and substitution") {
    using P = PropFormula;
    auto f = P::conj({x(1), nx(2)});
    CHECK(negate(f) == P::disj({nx(1), x(2)}));
    CHECK(negate(P::constant(true)) == P::constant(false));
    auto g = substitute(f, {{2, P::disj({x(3), x(4)})}});
    CHECK(g == P::conj({x(1), P::conj({nx(3), nx(4)})}));
    CHECK(substitute(f, {{1, P::constant(true)}}) == P::conj({P::constant(true), nx(2)}));
  }

  TEST_CASE("metrics") {
    using P = PropFormula;
    CHECK(metrics(x(1)).depth == 0);
    CHECK(metrics(x(1)).size == 1);
    auto four = P::conj({x(1), x(2), nx(3), x(4)});
    CHECK(metrics(four).depth == 1);
    CHECK(metrics(four).size == 5);
    CHECK(metrics(P::conj({P::conj({x(1)}), x(2)})).depth == 1);
    CHECK(metrics(P::disj({P::conj({x(1), x(2)}), x(3)})).depth == 2);
  }

  TEST_CASE("evaluation") {
    using P = PropFormula;
    auto f = P::disj({P::conj({x(1), nx(2)}), x(3)});
    CHECK(evaluate(f, {0, 1, 0, 0}));
    CHECK_FALSE(evaluate(f, {0, 1, 1, 0}));
    CHECK(evaluate3(f, {-1, 1, 0, -1}) == Truth::True);
    CHECK(evaluate3(f, {-1, -1, 0, 0}) == Truth::Half);
    CHECK(evaluate3(f, {-1, 0, -1, 0}) == Truth::False);
  }

  TEST_CASE("binary translation agrees with the decoded structure") {
    for (const auto& name : {"PHP", "WPHP", "PAR", "HOP", "ITER", "OPHP"}) {
      const auto& s = builtin(name).sentence;
      for (unsigned n = 1; n <= 3; ++n) {
        auto t = binary_translation(s, n);
        unsigned vars = t.num_vars();
        CHECK(vars == KeySpace(s.language, n).size());
        std::mt19937_64 rng(n);
        std::uint64_t total = std::uint64_t{1} << std::min(vars, 62u);
        bool all = vars <= 14;
        std::size_t agree = 0, cases = all ? total : 3000;
        for (std::uint64_t k = 0; k < cases; ++k) {
          FullOracle a(s.language, n);
          for (unsigned i = 0; i < vars; ++i) a.bits[i] = all ? (k >> i) & 1 : rng() & 1;
          agree += evaluate(t.formula, assignment_of(a)) == oracle::verifies(decode_binary(a), s);
        }
        CHECK_MESSAGE(agree == cases, name << " n=" << n);
      }
    }
  }

  TEST_CASE("unary translation: codes of structures satisfy exactly when the structure does") {
    std::mt19937_64 rng(2);
    for (const auto& name : {"PHP", "WPHP", "PAR", "HOP"}) {
      const auto& s = builtin(name).sentence;
      for (unsigned n = 1; n <= 3; ++n) {
        auto t = unary_translation(s, n);
        CHECK(t.num_vars() == KeySpace(s.language, n).unary_size());
        for (int k = 0; k < 200; ++k) {
          auto a = oracle::random_partial(s.language, n, rng, 0);
          bool expect = oracle::verifies(a, s);
          CHECK(evaluate(t.formula, assignment_of(encode_unary(a))) == expect);
          // A code that is not a structure falsifies the antecedent.
          UnaryCode junk(s.language, n);
          for (auto& b : junk.bits) b = rng() % 3 == 0;
          if (!decode_unary(junk).structure) CHECK(evaluate(t.formula, assignment_of(junk)));
        }
      }
    }
  }

  TEST_CASE("unary translation of WPHP at n = 2: three clause families") {
    auto t = unary_translation(builtin("WPHP").sentence, 2);
    CHECK(t.num_vars() == 8);
    auto c = wphp_census(2);
    CHECK(c.negated == 4);
    CHECK(c.same_cell == 8);
    CHECK(c.same_value == 32);
    CHECK(c.distinct_same_value.size() == 24);
    CHECK(c.other == 0);
    CHECK(simplify_constants(t.formula).children.size() == 44);
  }

  TEST_CASE("unary translation of WPHP at n = 3 follows the closed forms") {
    const std::size_t n = 3, cells = n * n;
    auto c = wphp_census(3);
    CHECK(c.negated == cells);
    CHECK(c.same_cell == cells * n * (n - 1));
    // Ordered pairs of distinct cells in the same column of first or second
    // coordinate, counted once per disjunct.
    CHECK(c.same_value == n * 2 * cells * (n - 1) * n);
    CHECK(c.distinct_same_value.size() == n * cells * (cells - 1));
    CHECK(c.other == 0);
  }

  TEST_CASE("depth is constant and size grows like 2^(len(n)^4)") {
    for (const auto& name : {"PHP", "HOP"}) {
      std::size_t ud = 0, bd = 0;
      for (unsigned n = 2; n <= 16; ++n) {
        const auto& s = builtin(name).sentence;
        auto u = metrics(unary_translation(s, n).formula);
        auto b = metrics(binary_translation(s, n).formula);
        if (n == 2) {
          ud = u.depth;
          bd = b.depth;
        }
        CHECK(u.depth == ud);
        CHECK(b.depth == bd);
        double cap = std::pow(2.0, std::pow(static_cast<double>(len(n)), 4));
        CHECK(static_cast<double>(u.size) <= cap);
        CHECK(static_cast<double>(b.size) <= cap);
        if (std::string(name) == "HOP" && n >= 9) break;
      }
      CHECK(ud == 2);
      CHECK(bd == 6);
    }
  }

  TEST_CASE("a trivially true sentence translates to 1") {
    auto s = parse_principle("principle T { language { } exists x . x=x }");
    CHECK(simplify_constants(binary_translation(s, 3).formula) == PropFormula::constant(true));
    CHECK(simplify_constants(unary_translation(s, 3).formula) == PropFormula::constant(true));
    auto cnf = negation_cnf(PropFormula::constant(true), 0, CnfMode::Direct);
    REQUIRE(cnf.clauses.size() == 1);
    CHECK(cnf.clauses[0].empty());
    CHECK_FALSE(satisfiable_exhaustive(cnf));
    CHECK(negation_cnf(PropFormula::constant(false), 0, CnfMode::Tseitin).clauses.empty());
  }

  TEST_CASE("tautology check on small principles") {
    for (const auto& name : {"PHP", "WPHP", "HOP", "ITER"}) {
      auto t = binary_translation(builtin(name).sentence, 2);
      auto r = check_tautology(t.formula, t.num_vars());
      CHECK_MESSAGE(r.tautology, name);
      CHECK(is_tautology_brute(t.formula, t.num_vars()));
    }
    auto par = binary_translation(builtin("PAR").sentence, 2);
    auto r = check_tautology(par.formula, par.num_vars());
    CHECK_FALSE(r.tautology);
    REQUIRE(r.counterexample);
    CHECK_FALSE(evaluate(par.formula, *r.counterexample));
    CHECK_THROWS_AS(check_tautology(binary_translation(builtin("HOP").sentence, 2).formula, 8, 3), CapExceeded);
  }

  TEST_CASE("random formulas: DNF, CNF and solvers agree with brute force") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 300; ++k) {
      unsigned vars = 1 + rng() % 7;
      auto f = random_formula(rng, vars, 4);
      auto dnf = to_dnf(f);
      bool taut = is_tautology_brute(f, vars);
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << vars); ++m) {
        auto a = bits_of(m, vars);
        CHECK(evaluate(dnf, a) == evaluate(f, a));
        CHECK(evaluate(simplify_constants(f), a) == evaluate(f, a));
        CHECK(evaluate(negate(f), a) != evaluate(f, a));
      }
      CHECK(check_tautology(f, vars).tautology == taut);
      auto direct = negation_cnf(dnf, vars, CnfMode::Direct);
      auto tseitin = negation_cnf(f, vars, CnfMode::Tseitin);
      CHECK(direct.num_vars == vars);
      CHECK(tseitin.original_vars == vars);
      CHECK(satisfiable_exhaustive(direct) == !taut);
      if (tseitin.num_vars <= 20) {
        CHECK(satisfiable_exhaustive(tseitin) == !taut);
        CHECK(cnf_sat_brute(tseitin) == !taut);
      }
      auto model = dpll(tseitin);
      CHECK(model.has_value() == !taut);
      if (model) {
        std::vector<std::uint8_t> a(model->begin(), model->begin() + vars + 1);
        CHECK_FALSE(evaluate(f, a));
      }
    }
  }

  TEST_CASE("direct CNF needs a DNF") {
    auto f = PropFormula::conj({PropFormula::disj({x(1), x(2)}), x(3)});
    CHECK_THROWS_AS(negation_cnf(f, 3, CnfMode::Direct), ContractError);
    CHECK_THROWS_AS(to_dnf(PropFormula::conj({PropFormula::disj({x(1), x(2)}), PropFormula::disj({x(3), x(4)})}), 2),
                    CapExceeded);
  }

  TEST_CASE("DIMACS export") {
    auto t = unary_translation(builtin("WPHP").sentence, 2);
    auto cnf = negation_cnf(simplify_constants(t.formula), t.num_vars(), CnfMode::Direct);
    CHECK(cnf.clauses.size() == 44);
    CHECK_FALSE(satisfiable_exhaustive(cnf));
    CHECK_FALSE(dpll(cnf));
    auto text = to_dimacs(cnf, {"wphp n=2"});
    CHECK(text.rfind("c wphp n=2\np cnf 8 44\n", 0) == 0);
    CHECK(to_dimacs(cnf, {"wphp n=2"}) == text);
    std::size_t zeros = 0;
    for (std::size_t i = text.find("p cnf"); i < text.size(); ++i)
      if (text[i] == '0' && (i + 1 == text.size() || text[i + 1] == '\n') && text[i - 1] == ' ') ++zeros;
    CHECK(zeros == 44);
  }

  TEST_CASE("rendering") {
    using P = PropFormula;
    CHECK(render(P::disj({P::conj({x(1), nx(2)}), P::constant(false)})) == "or(and(x1, !x2), 0)");
    auto t = binary_translation(builtin("PHP").sentence, 2);
    CHECK(t.var_name(1) == "f(0)[0]");
    CHECK(render(x(1), &t) == "f(0)[0]");
  }
}
