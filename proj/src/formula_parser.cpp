#include <algorithm>

#include "finprin/syntax.hpp"
#include "parse_detail.hpp"

namespace finprin {

using detail::Token;
using detail::TokenStream;

// ---------------------------------------------------------------------------
// Principle DSL

namespace {

class PrincipleReader {
 public:
  explicit PrincipleReader(std::string_view text) : ts_(text) {}

  BasicSentence read() {
    BasicSentence s;
    if (!ts_.peek().is("principle")) ts_.fail("expected 'principle'");
    ts_.next();
    s.name = ts_.ident();
    ts_.expect("{");
    if (!ts_.peek().is("language")) ts_.fail("expected 'language'");
    ts_.next();
    ts_.expect("{");
    std::vector<Symbol> syms;
    bool order = false;
    std::vector<unsigned> numerals;
    if (!ts_.peek().is("}")) {
      do {
        if (ts_.peek().is("builtin")) {
          ts_.next();
          if (ts_.accept("<")) {
            order = true;
          } else if (ts_.peek().kind == Token::Kind::Nat) {
            numerals.push_back(ts_.nat());
          } else {
            ts_.fail("expected '<' or a numeral after 'builtin'");
          }
          continue;
        }
        const Token& at = ts_.peek();
        Symbol sym;
        sym.name = ts_.ident();
        ts_.expect("/");
        sym.arity = ts_.nat();
        const Token& kind = ts_.peek();
        if (kind.is("fun")) {
          sym.kind = SymbolKind::Function;
        } else if (kind.is("rel")) {
          sym.kind = SymbolKind::Relation;
        } else {
          ts_.fail("expected 'fun' or 'rel'");
        }
        ts_.next();
        if (std::any_of(syms.begin(), syms.end(), [&](const Symbol& o) { return o.name == sym.name; }))
          TokenStream::fail_at(at, "duplicate symbol '" + sym.name + "'");
        syms.push_back(sym);
      } while (ts_.accept(","));
    }
    ts_.expect("}");
    s.language = Language(std::move(syms), order, std::move(numerals));
    if (!ts_.peek().is("exists")) ts_.fail("expected 'exists'");
    ts_.next();
    while (ts_.peek().kind == Token::Kind::Ident) {
      const Token& at = ts_.peek();
      auto v = ts_.ident();
      if (std::find(s.vars.begin(), s.vars.end(), v) != s.vars.end())
        TokenStream::fail_at(at, "duplicate variable '" + v + "'");
      if (s.language.find(v)) TokenStream::fail_at(at, "variable '" + v + "' clashes with a symbol");
      s.vars.push_back(v);
    }
    if (s.vars.empty()) ts_.fail("expected at least one variable");
    ts_.expect(".");
    do {
      s.matrix.push_back(conj(s));
    } while (ts_.accept("|"));
    ts_.expect("}");
    if (!ts_.at_end()) ts_.fail("trailing input after principle");
    s.validate();
    return s;
  }

 private:
  std::vector<Literal> conj(const BasicSentence& s) {
    std::vector<Literal> out;
    if (ts_.accept("(")) {
      do {
        out.push_back(literal(s));
      } while (ts_.accept("&"));
      ts_.expect(")");
    } else {
      out.push_back(literal(s));
    }
    return out;
  }

  unsigned variable(const BasicSentence& s) {
    const Token& t = ts_.peek();
    if (t.kind != Token::Kind::Ident) ts_.fail("expected variable");
    ts_.next();
    if (ts_.peek().is("(")) TokenStream::fail_at(t, "non-basic literal (nested term '" + t.text + "(...)')");
    auto it = std::find(s.vars.begin(), s.vars.end(), t.text);
    if (it == s.vars.end()) {
      if (s.language.find(t.text))
        TokenStream::fail_at(t, "non-basic literal (symbol '" + t.text + "' used as a term)");
      TokenStream::fail_at(t, "unknown variable '" + t.text + "'");
    }
    return static_cast<unsigned>(it - s.vars.begin());
  }

  std::vector<unsigned> args(const BasicSentence& s) {
    std::vector<unsigned> out;
    ts_.expect("(");
    if (!ts_.peek().is(")")) {
      do {
        out.push_back(variable(s));
      } while (ts_.accept(","));
    }
    ts_.expect(")");
    return out;
  }

  Literal literal(const BasicSentence& s) {
    Literal l;
    const Token& start = ts_.peek();
    if (ts_.accept("!")) {
      const Token& at = ts_.peek();
      auto name = ts_.ident();
      auto sym = s.language.find(name);
      if (!sym) {
        if (std::find(s.vars.begin(), s.vars.end(), name) != s.vars.end())
          TokenStream::fail_at(at, "use 'u != v' for negated equality");
        TokenStream::fail_at(at, "unknown symbol '" + name + "'");
      }
      l.kind = Literal::Kind::Rel;
      l.positive = false;
      l.symbol = *sym;
      l.args = args(s);
      if (s.language[*sym].is_function()) TokenStream::fail_at(at, "non-basic literal (negated function atom)");
      check_arity(at, s, l);
      return l;
    }
    if (start.kind == Token::Kind::Nat) {
      unsigned k = ts_.nat();
      if (!s.language.has_numeral(k)) TokenStream::fail_at(start, "numeral " + std::to_string(k) + " not declared");
      ts_.expect("(");
      ts_.expect(")");
      ts_.expect("=");
      l.kind = Literal::Kind::Numeral;
      l.numeral = k;
      l.out = variable(s);
      return l;
    }
    if (start.kind != Token::Kind::Ident) ts_.fail("expected literal");
    if (ts_.peek(1).is("(")) {
      auto name = ts_.ident();
      auto sym = s.language.find(name);
      if (!sym) TokenStream::fail_at(start, "unknown symbol '" + name + "'");
      l.symbol = *sym;
      l.args = args(s);
      check_arity(start, s, l);
      if (s.language[*sym].is_function()) {
        if (!ts_.accept("=")) ts_.fail("expected '=' after function term");
        l.kind = Literal::Kind::Fun;
        l.out = variable(s);
      } else {
        l.kind = Literal::Kind::Rel;
      }
      return l;
    }
    unsigned u = variable(s);
    const Token& op = ts_.peek();
    if (op.is("=") || op.is("!=")) {
      ts_.next();
      l.kind = Literal::Kind::Eq;
      l.positive = op.text == "=";
      l.args = {u, variable(s)};
    } else if (op.is("<")) {
      if (!s.language.builtin_order()) TokenStream::fail_at(op, "'<' requires 'builtin <'");
      ts_.next();
      l.kind = Literal::Kind::Less;
      l.args = {u, variable(s)};
    } else {
      ts_.fail("expected '=', '!=' or '<'");
    }
    return l;
  }

  void check_arity(const Token& at, const BasicSentence& s, const Literal& l) {
    const auto& sym = s.language[l.symbol];
    if (l.args.size() != sym.arity)
      TokenStream::fail_at(at, "arity mismatch: '" + sym.name + "' expects " + std::to_string(sym.arity) +
                                   " argument(s), got " + std::to_string(l.args.size()));
  }

  TokenStream ts_;
};

}  // namespace

BasicSentence parse_principle(std::string_view text) { return PrincipleReader(text).read(); }

// ---------------------------------------------------------------------------
// General formulas

namespace detail {

namespace {

bool is_bound(const std::vector<std::string>& bound, const std::string& v) {
  return std::find(bound.begin(), bound.end(), v) != bound.end();
}

Formula parse_or(TokenStream& ts, const Language& lang, std::vector<std::string>& bound);

std::vector<Term> term_args(TokenStream& ts, const Language& lang, const std::vector<std::string>& bound) {
  std::vector<Term> out;
  ts.expect("(");
  if (!ts.peek().is(")")) {
    do {
      out.push_back(parse_term_tokens(ts, lang, bound));
    } while (ts.accept(","));
  }
  ts.expect(")");
  return out;
}

Formula parse_unary(TokenStream& ts, const Language& lang, std::vector<std::string>& bound) {
  const Token& t = ts.peek();
  if (ts.accept("!")) return Formula::neg(parse_unary(ts, lang, bound));
  if (t.is("forall") || t.is("exists")) {
    bool all = t.text == "forall";
    ts.next();
    std::vector<std::string> vars;
    while (ts.peek().kind == Token::Kind::Ident) vars.push_back(ts.ident());
    if (vars.empty()) ts.fail("expected bound variable");
    ts.expect(".");
    for (const auto& v : vars) bound.push_back(v);
    Formula body = parse_or(ts, lang, bound);
    for (std::size_t i = 0; i < vars.size(); ++i) bound.pop_back();
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      body = all ? Formula::forall(*it, std::move(body)) : Formula::exists(*it, std::move(body));
    return body;
  }
  if (t.is("true") && !is_bound(bound, "true")) {
    ts.next();
    return Formula::truth(true);
  }
  if (t.is("false") && !is_bound(bound, "false")) {
    ts.next();
    return Formula::truth(false);
  }
  if (ts.accept("(")) {
    Formula f = parse_or(ts, lang, bound);
    ts.expect(")");
    return f;
  }
  // relation atom
  if (t.kind == Token::Kind::Ident && ts.peek(1).is("(")) {
    auto sym = lang.find(t.text);
    if (sym && !lang[*sym].is_function()) {
      ts.next();
      auto args = term_args(ts, lang, bound);
      if (args.size() != lang[*sym].arity)
        TokenStream::fail_at(t, "arity mismatch for '" + t.text + "'");
      return Formula::rel(*sym, std::move(args));
    }
  }
  Term lhs = parse_term_tokens(ts, lang, bound);
  const Token& op = ts.peek();
  if (ts.accept("=")) return Formula::eq(std::move(lhs), parse_term_tokens(ts, lang, bound));
  if (ts.accept("!=")) return Formula::neg(Formula::eq(std::move(lhs), parse_term_tokens(ts, lang, bound)));
  if (ts.accept("<")) {
    if (!lang.builtin_order()) TokenStream::fail_at(op, "'<' requires the built-in order");
    return Formula::less(std::move(lhs), parse_term_tokens(ts, lang, bound));
  }
  TokenStream::fail_at(op, "expected '=', '!=' or '<' after term");
}

Formula parse_and(TokenStream& ts, const Language& lang, std::vector<std::string>& bound) {
  std::vector<Formula> parts;
  parts.push_back(parse_unary(ts, lang, bound));
  while (ts.accept("&")) parts.push_back(parse_unary(ts, lang, bound));
  return Formula::conj(std::move(parts));
}

Formula parse_or(TokenStream& ts, const Language& lang, std::vector<std::string>& bound) {
  std::vector<Formula> parts;
  parts.push_back(parse_and(ts, lang, bound));
  while (ts.accept("|")) parts.push_back(parse_and(ts, lang, bound));
  return Formula::disj(std::move(parts));
}

}  // namespace

Term parse_term_tokens(TokenStream& ts, const Language& lang, const std::vector<std::string>& bound) {
  const Token& t = ts.peek();
  if (t.kind == Token::Kind::Nat) {
    unsigned k = ts.nat();
    if (!lang.has_numeral(k)) TokenStream::fail_at(t, "numeral " + std::to_string(k) + " not declared");
    ts.expect("(");
    ts.expect(")");
    return Term::numeral(k);
  }
  if (ts.accept("#")) return Term::param(ts.nat());
  if (t.kind != Token::Kind::Ident) ts.fail("expected term");
  std::string name = ts.ident();
  if (ts.peek().is("(")) {
    auto sym = lang.find(name);
    if (!sym) TokenStream::fail_at(t, "unknown symbol '" + name + "'");
    if (!lang[*sym].is_function()) TokenStream::fail_at(t, "relation '" + name + "' used as a term");
    auto args = term_args(ts, lang, bound);
    if (args.size() != lang[*sym].arity) TokenStream::fail_at(t, "arity mismatch for '" + name + "'");
    return Term::apply(*sym, std::move(args));
  }
  if (!is_bound(bound, name)) {
    auto sym = lang.find(name);
    if (sym && lang[*sym].is_function() && lang[*sym].arity == 0) return Term::apply(*sym);
    if (sym) TokenStream::fail_at(t, "symbol '" + name + "' used as a variable");
  }
  return Term::var(name);
}

Formula parse_formula_tokens(TokenStream& ts, const Language& lang, std::vector<std::string>& bound) {
  return parse_or(ts, lang, bound);
}

}  // namespace detail

Formula parse_formula(std::string_view text, const Language& lang) {
  TokenStream ts(text);
  std::vector<std::string> bound;
  Formula f = detail::parse_formula_tokens(ts, lang, bound);
  if (!ts.at_end()) ts.fail("trailing input after formula");
  return f;
}

}  // namespace finprin
