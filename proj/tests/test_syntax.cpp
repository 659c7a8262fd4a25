#include <doctest.h>

#include <functional>
#include <map>

#include "finprin/catalog.hpp"
#include "finprin/errors.hpp"
#include "finprin/partial.hpp"
#include "finprin/syntax.hpp"
#include "oracles.hpp"

using namespace finprin;

namespace {

// Classical evaluation of a first-order sentence on a total structure,
// written independently of the library's evaluator.
struct Classic {
  const PartialStructure& a;
  std::map<std::string, unsigned> env;

  unsigned term(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Variable:
        return env.at(t.name);
      case Term::Kind::Parameter:
      case Term::Kind::Numeral:
        return t.value;
      case Term::Kind::Apply: {
        std::vector<unsigned> args;
        for (const auto& x : t.args) args.push_back(term(x));
        return static_cast<unsigned>(a.get(t.symbol, args));
      }
    }
    return 0;
  }

  bool holds(const Formula& f) {
    switch (f.kind) {
      case Formula::Kind::True:
        return true;
      case Formula::Kind::False:
        return false;
      case Formula::Kind::Relation: {
        std::vector<unsigned> args;
        for (const auto& x : f.terms) args.push_back(term(x));
        return a.get(f.symbol, args) == 1;
      }
      case Formula::Kind::Equal:
        return term(f.terms[0]) == term(f.terms[1]);
      case Formula::Kind::Less:
        return term(f.terms[0]) < term(f.terms[1]);
      case Formula::Kind::Not:
        return !holds(f.children[0]);
      case Formula::Kind::And:
        for (const auto& c : f.children)
          if (!holds(c)) return false;
        return true;
      case Formula::Kind::Or:
        for (const auto& c : f.children)
          if (holds(c)) return true;
        return false;
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        bool all = f.kind == Formula::Kind::Forall;
        auto saved = env.count(f.var) ? std::optional<unsigned>(env[f.var]) : std::nullopt;
        bool result = all;
        for (unsigned v = 0; v < a.n(); ++v) {
          env[f.var] = v;
          if (holds(f.children[0]) != all) {
            result = !all;
            break;
          }
        }
        if (saved)
          env[f.var] = *saved;
        else
          env.erase(f.var);
        return result;
      }
    }
    return false;
  }
};

bool valid_on(const Formula& f, const Language& lang, unsigned n) {
  bool ok = true;
  oracle::for_each_total(lang, n, [&](const PartialStructure& a) {
    if (ok && !Classic{a, {}}.holds(f)) ok = false;
  });
  return ok;
}

const char* kPHPText = R"(principle PHP {
  language { f/1 fun, c/0 fun }
  exists x y u .
      (f(x)=u & f(y)=u & x!=y)
    | (f(x)=u & c()=u)
})";

}  // namespace

TEST_SUITE("syntax") {
  TEST_CASE("parses the pigeonhole principle") {
    auto s = parse_principle(kPHPText);
    CHECK(s.name == "PHP");
    CHECK(s.vars == std::vector<std::string>{"x", "y", "u"});
    REQUIRE(s.matrix.size() == 2);
    CHECK(s.matrix[0].size() == 3);
    CHECK(s.matrix[1].size() == 2);
    REQUIRE(s.language.size() == 2);
    CHECK(s.language[0] == Symbol{"f", SymbolKind::Function, 1});
    CHECK(s.language[1] == Symbol{"c", SymbolKind::Function, 0});
    CHECK(s.language.r() == 2);
    CHECK(s == builtin("PHP").sentence);
  }

  TEST_CASE("s_L counts cells") {
    CHECK(s_L(builtin("PHP").sentence.language, 5) == 6);
    CHECK(s_L(builtin("WPHP").sentence.language, 3) == 9);
    CHECK(s_L(builtin("HOP").sentence.language, 2) == 6);
    CHECK(s_L(builtin("HDP").sentence.language, 3) == 2 * 9 + 2);
    CHECK(s_L(Language{}, 7) == 0);
    CHECK(ipow(2, 70) == UINT64_MAX);
  }

  TEST_CASE("empty language and a trivially true sentence") {
    auto s = parse_principle("principle T { language { } exists x . x=x }");
    CHECK(s.language.size() == 0);
    CHECK(s.language.r() == 1);
    REQUIRE(s.matrix.size() == 1);
    CHECK(s.matrix[0][0].kind == Literal::Kind::Eq);
  }

  TEST_CASE("rejects non-basic input with a position") {
    auto bad = [](const char* text) {
      try {
        parse_principle(text);
      } catch (const SyntaxError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    auto nested = bad("principle N { language { f/1 fun }\n exists x . f(f(x))=x }");
    CHECK(nested.find("non-basic") != std::string::npos);
    CHECK(nested.find("line 2") != std::string::npos);
    CHECK(bad("principle N { language { f/1 fun } exists x . g(x)=x }").find("unknown") != std::string::npos);
    CHECK(bad("principle N { language { f/2 fun } exists x y . f(x)=y }").find("arity") != std::string::npos);
    CHECK(bad("principle N { language { f/1 fun } exists x . x<x }").find("<") != std::string::npos);
    CHECK(bad("principle N { language { f/1 fun, f/2 fun } exists x . x=x }").find("duplicate") !=
          std::string::npos);
    CHECK_THROWS_AS(parse_principle("principle N { language { } exists x . x=x } extra"), SyntaxError);
  }

  TEST_CASE("render and parse round-trip on the catalog") {
    for (const auto& name : builtin_names()) {
      const auto& s = builtin(name).sentence;
      auto back = parse_principle(render_principle(s));
      CHECK_MESSAGE(back == s, name);
      CHECK(back.name == s.name);
      CHECK_MESSAGE(basic_sentence_from_json(to_json(s)) == s, name);
    }
  }

  TEST_CASE("the weak pigeonhole principle renders both disjuncts") {
    auto text = render_principle(builtin("WPHP").sentence);
    CHECK(text.find("x!=x'") != std::string::npos);
    CHECK(text.find("y!=y'") != std::string::npos);
  }

  TEST_CASE("formula size") {
    Language lang({{"f", SymbolKind::Function, 1}, {"R", SymbolKind::Relation, 1}});
    CHECK(formula_size(parse_formula("f(x)=x", lang)) == 1);
    CHECK(formula_size(parse_formula("exists x . f(x)=x & R(x)", lang)) == 4);
    CHECK(formula_size(parse_formula("!R(x)", lang)) == 2);
    // 3 quantifiers, one disjunction, (3 atoms, a negation, 2 conjunctions), (2 atoms, 1 conjunction).
    CHECK(formula_size(builtin("PHP").sentence) == 13);
    CHECK(formula_size(builtin("WPHP").sentence) == 5 + 1 + 6 + 6);
  }

  TEST_CASE("formula parsing and rendering") {
    Language lang({{"f", SymbolKind::Function, 1}, {"c", SymbolKind::Function, 0}, {"R", SymbolKind::Relation, 2}});
    auto f = parse_formula("forall x . exists y . R(x, f(y)) | c = x", lang);
    CHECK(f.kind == Formula::Kind::Forall);
    CHECK(free_variables(f).empty());
    CHECK_FALSE(is_quantifier_free(f));
    auto g = parse_formula(render_formula(f, lang), lang);
    CHECK(g == f);
    auto open = parse_formula("R(x, y) & !x = c", lang);
    CHECK(free_variables(open) == std::vector<std::string>{"x", "y"});
    auto closed = substitute(substitute(open, "x", Term::param(1)), "y", Term::param(0));
    CHECK(free_variables(closed).empty());
    CHECK_THROWS_AS(parse_formula("R(x)", lang), SyntaxError);
  }

  TEST_CASE("herbrandize leaves basic sentences alone") {
    Language lang({{"f", SymbolKind::Function, 1}});
    auto f = parse_formula("exists x . f(x)=x", lang);
    auto h = herbrandize(f, lang, "H");
    CHECK(h.language == lang);
    REQUIRE(h.matrix.size() == 1);
    REQUIRE(h.matrix[0].size() == 1);
    CHECK(h.matrix[0][0].kind == Literal::Kind::Fun);
    CHECK(is_basic_shape(to_formula(h)));
  }

  TEST_CASE("herbrandize flattens negated nested terms") {
    Language lang({{"f", SymbolKind::Function, 1}});
    auto h = herbrandize(parse_formula("exists x . !f(x)=x", lang), lang);
    CHECK(h.language == lang);
    REQUIRE(h.matrix.size() == 1);
    bool fun = false, neq = false;
    for (const auto& l : h.matrix[0]) {
      fun |= l.kind == Literal::Kind::Fun;
      neq |= l.kind == Literal::Kind::Eq && !l.positive;
    }
    CHECK(fun);
    CHECK(neq);
  }

  TEST_CASE("herbrandize is equivalid on small universes") {
    Language lang({{"f", SymbolKind::Function, 1}});
    Language rel({{"R", SymbolKind::Relation, 2}});
    std::vector<std::pair<Formula, Language>> cases = {
        {parse_formula("forall x . exists y . f(y)=x", lang), lang},
        {parse_formula("exists x . forall y . f(y)!=x | f(x)=x", lang), lang},
        {parse_formula("forall x . exists y . R(x,y)", rel), rel},
        {parse_formula("exists x . forall y . R(x,y) | !R(y,x)", rel), rel},
        {parse_formula("exists x . f(f(x))=x", lang), lang},
    };
    for (const auto& [f, l] : cases) {
      auto h = herbrandize(f, l);
      CHECK(is_basic_shape(to_formula(h)));
      for (unsigned n = 1; n <= 3; ++n) {
        bool orig = valid_on(f, l, n);
        bool herb = true;
        oracle::for_each_total(h.language, n, [&](const PartialStructure& a) {
          if (herb && !oracle::verifies(a, h)) herb = false;
        });
        CHECK_MESSAGE(orig == herb, render_formula(f, l) << " n=" << n);
      }
    }
  }

  TEST_CASE("validate rejects malformed sentences") {
    BasicSentence s = builtin("PHP").sentence;
    s.matrix[0][0].args = {7};
    CHECK_THROWS_AS(s.validate(), ContractError);
    BasicSentence t = builtin("PHP").sentence;
    t.matrix[0][0].positive = false;
    CHECK_THROWS_AS(t.validate(), ContractError);
  }
}
