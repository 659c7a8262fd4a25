#include "finprin/reduce.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "finprin/catalog.hpp"
#include "parse_detail.hpp"

namespace finprin {

namespace {

using Env = std::vector<std::pair<std::string, unsigned>>;

int lookup(const Env& env, const std::string& v) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == v) return static_cast<int>(it->second);
  throw ContractError("unbound variable '" + v + "'");
}

// Kleene evaluation of quantifier-free formulas over a cell reader
// get(sym, args) -> value or kUndef. Remembers the first undefined cell read.
template <class Get>
struct LazyEval {
  const Language& lang;
  unsigned n;
  Get get;
  std::optional<std::pair<std::size_t, std::vector<unsigned>>> missing;

  int term(const Term& t, const Env& env) {
    switch (t.kind) {
      case Term::Kind::Variable: return lookup(env, t.name);
      case Term::Kind::Parameter: return t.value < n ? static_cast<int>(t.value) : kUndef;
      case Term::Kind::Numeral: return t.value < n ? static_cast<int>(t.value) : kUndef;
      case Term::Kind::Apply: {
        std::vector<unsigned> args;
        for (const auto& a : t.args) {
          int v = term(a, env);
          if (v == kUndef) return kUndef;
          args.push_back(static_cast<unsigned>(v));
        }
        int v = get(t.symbol, args);
        if (v == kUndef && !missing) missing.emplace(t.symbol, std::move(args));
        return v;
      }
    }
    return kUndef;
  }

  Truth formula(const Formula& f, const Env& env) {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::True: return Truth::True;
      case K::False: return Truth::False;
      case K::Relation: {
        std::vector<unsigned> args;
        for (const auto& a : f.terms) {
          int v = term(a, env);
          if (v == kUndef) return Truth::Half;
          args.push_back(static_cast<unsigned>(v));
        }
        int v = get(f.symbol, args);
        if (v == kUndef) {
          if (!missing) missing.emplace(f.symbol, std::move(args));
          return Truth::Half;
        }
        return v ? Truth::True : Truth::False;
      }
      case K::Equal:
      case K::Less: {
        int a = term(f.terms[0], env), b = term(f.terms[1], env);
        if (a == kUndef || b == kUndef) return Truth::Half;
        bool r = f.kind == K::Equal ? a == b : a < b;
        return r ? Truth::True : Truth::False;
      }
      case K::Not: return t_not(formula(f.children[0], env));
      case K::And: {
        Truth r = Truth::True;
        for (const auto& c : f.children) {
          r = t_and(r, formula(c, env));
          if (r == Truth::False) break;
        }
        return r;
      }
      case K::Or: {
        Truth r = Truth::False;
        for (const auto& c : f.children) {
          r = t_or(r, formula(c, env));
          if (r == Truth::True) break;
        }
        return r;
      }
      case K::Forall:
      case K::Exists: throw ContractError("quantifier in an interpretation formula");
    }
    return Truth::Half;
  }
};

struct StructureGet {
  const PartialStructure* b;
  int operator()(std::size_t sym, const std::vector<unsigned>& args) const { return b->get(sym, args); }
};

LazyEval<StructureGet> evaluator(const PartialStructure& b) { return {b.language(), b.n(), StructureGet{&b}, {}}; }

Env env_of(const SymbolDefinition& d, std::span<const unsigned> args) {
  Env env;
  for (std::size_t i = 0; i < d.args.size(); ++i) env.emplace_back(d.args[i], args[i]);
  return env;
}

std::string tuple_text(std::span<const unsigned> t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

void for_tuples(unsigned k, unsigned n, const std::function<bool(const std::vector<unsigned>&)>& fn) {
  if (n == 0 && k > 0) return;
  std::vector<unsigned> v(k, 0);
  for (;;) {
    if (!fn(v)) return;
    std::size_t i = k;
    while (i > 0 && ++v[i - 1] == n) v[--i] = 0;
    if (i == 0) return;
  }
}

void collect_free(const Term& t, std::vector<std::string>& out) {
  if (t.kind == Term::Kind::Variable && std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
  for (const auto& a : t.args) collect_free(a, out);
}

enum class LocalStatus { Ok, Violation, Open };

struct LocalCheck {
  LocalStatus status = LocalStatus::Open;
  std::string problem;
};

// Functionality and Herbrand coverage of one definition at one tuple.
template <class Eval>
LocalCheck check_local(Eval& ev, const SymbolDefinition& d, std::span<const unsigned> args, unsigned n) {
  Env env = env_of(d, args);
  std::size_t trues = 0;
  bool all_defined = true;
  std::vector<unsigned> sat;
  for (unsigned y = 0; y < n; ++y) {
    env.emplace_back(d.out, y);
    Truth t = ev.formula(d.delta, env);
    env.pop_back();
    if (t == Truth::True) {
      ++trues;
      sat.push_back(y);
    }
    all_defined &= t != Truth::Half;
  }
  if (trues >= 2)
    return {LocalStatus::Violation, "not functional: values " + std::to_string(sat[0]) + " and " +
                                        std::to_string(sat[1]) + " both satisfy the definition"};
  bool covered = false, terms_defined = true;
  for (const auto& t : d.herbrand) {
    int v = ev.term(t, env);
    if (v == kUndef) {
      terms_defined = false;
      continue;
    }
    env.emplace_back(d.out, static_cast<unsigned>(v));
    Truth r = ev.formula(d.delta, env);
    env.pop_back();
    if (r == Truth::True) covered = true;
    terms_defined &= r != Truth::Half;
  }
  if (!all_defined || (!covered && !terms_defined)) return {};
  if (trues == 0) return {LocalStatus::Violation, "not total: no value satisfies the definition"};
  if (!covered) return {LocalStatus::Violation, "no Herbrand term satisfies the definition"};
  return {LocalStatus::Ok, {}};
}

struct LazySearch {
  const Interpretation& I;
  const SymbolDefinition& d;
  std::span<const unsigned> args;
  unsigned n;
  std::uint64_t leaves = 0;
  std::string problem;

  bool run(PartialStructure& b) {
    auto ev = evaluator(b);
    LocalCheck c = check_local(ev, d, args, n);
    if (c.status == LocalStatus::Ok) {
      ++leaves;
      return true;
    }
    if (c.status == LocalStatus::Violation) {
      problem = c.problem + " on a structure with " + render_structure(b);
      return false;
    }
    if (!ev.missing) throw ContractError("validity search stalled without an undefined cell");
    std::size_t cell = b.cell(ev.missing->first, ev.missing->second);
    const unsigned range = b.language()[ev.missing->first].is_function() ? n : 2;
    for (unsigned v = 0; v < range; ++v) {
      b.set_unchecked(cell, static_cast<int>(v));
      if (!run(b)) return false;
    }
    b.set_unchecked(cell, kUndef);
    return true;
  }
};

}  // namespace

void Interpretation::validate() const {
  const Language& T = target.language;
  if (defs.size() != T.size())
    throw ContractError("interpretation '" + name + "' defines " + std::to_string(defs.size()) + " symbols, target has " +
                        std::to_string(T.size()));
  for (std::size_t s = 0; s < T.size(); ++s) {
    const auto& d = defs[s];
    const std::string where = "definition of '" + T[s].name + "': ";
    if (d.args.size() != T[s].arity) throw ContractError(where + "wrong number of arguments");
    if (!is_quantifier_free(d.delta)) throw ContractError(where + "formula has quantifiers");
    std::vector<std::string> allowed = d.args;
    if (T[s].is_function()) {
      if (d.out.empty()) throw ContractError(where + "missing output variable");
      if (d.herbrand.empty()) throw ContractError(where + "missing Herbrand terms");
      allowed.push_back(d.out);
    } else if (!d.out.empty() || !d.herbrand.empty()) {
      throw ContractError(where + "relations take no output variable or terms");
    }
    for (const auto& v : free_variables(d.delta))
      if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
        throw ContractError(where + "free variable '" + v + "'");
    for (const auto& t : d.herbrand) {
      std::vector<std::string> fv;
      collect_free(t, fv);
      for (const auto& v : fv)
        if (std::find(d.args.begin(), d.args.end(), v) == d.args.end())
          throw ContractError(where + "Herbrand term uses '" + v + "'");
    }
  }
}

Interpretation parse_interpretation(std::string_view text) {
  detail::TokenStream ts(text);
  if (!ts.peek().is("interpretation")) ts.fail("expected 'interpretation'");
  ts.next();
  Interpretation I;
  I.name = ts.ident();
  ts.expect("from");
  const auto src_tok = ts.peek();
  std::string src = ts.ident();
  ts.expect("to");
  const auto dst_tok = ts.peek();
  std::string dst = ts.ident();
  try {
    I.source = builtin(src).sentence;
  } catch (const ContractError&) {
    detail::TokenStream::fail_at(src_tok, "unknown principle '" + src + "'");
  }
  try {
    I.target = builtin(dst).sentence;
  } catch (const ContractError&) {
    detail::TokenStream::fail_at(dst_tok, "unknown principle '" + dst + "'");
  }
  const Language& S = I.source.language;
  const Language& T = I.target.language;
  std::vector<std::optional<SymbolDefinition>> defs(T.size());
  ts.expect("{");
  while (!ts.accept("}")) {
    const auto sym_tok = ts.peek();
    std::string sym = ts.ident();
    auto idx = T.find(sym);
    if (!idx) detail::TokenStream::fail_at(sym_tok, "'" + sym + "' is not a symbol of " + dst);
    if (defs[*idx]) detail::TokenStream::fail_at(sym_tok, "'" + sym + "' defined twice");
    SymbolDefinition d;
    auto variable = [&]() {
      const auto t = ts.peek();
      std::string v = ts.ident();
      if (S.find(v)) detail::TokenStream::fail_at(t, "variable '" + v + "' clashes with a symbol of " + src);
      return v;
    };
    ts.expect("(");
    if (!ts.peek().is(")")) {
      do d.args.push_back(variable());
      while (ts.accept(","));
    }
    ts.expect(")");
    if (d.args.size() != T[*idx].arity) detail::TokenStream::fail_at(sym_tok, "arity mismatch for '" + sym + "'");
    if (T[*idx].is_function()) {
      ts.expect("=");
      d.out = variable();
    }
    ts.expect(":=");
    std::vector<std::string> bound = d.args;
    if (!d.out.empty()) bound.push_back(d.out);
    d.delta = detail::parse_formula_tokens(ts, S, bound);
    if (ts.peek().is("via")) {
      if (!T[*idx].is_function()) ts.fail("Herbrand terms given for a relation");
      ts.next();
      std::vector<std::string> args = d.args;
      do d.herbrand.push_back(detail::parse_term_tokens(ts, S, args));
      while (ts.accept(","));
    } else if (T[*idx].is_function()) {
      ts.fail("expected 'via' and Herbrand terms");
    }
    ts.expect(";");
    defs[*idx] = std::move(d);
  }
  if (!ts.at_end()) ts.fail("trailing input after interpretation");
  for (std::size_t s = 0; s < T.size(); ++s) {
    if (!defs[s]) throw ContractError("interpretation '" + I.name + "' does not define '" + T[s].name + "'");
    I.defs.push_back(std::move(*defs[s]));
  }
  I.validate();
  return I;
}

std::string render_interpretation(const Interpretation& I) {
  const Language& S = I.source.language;
  const Language& T = I.target.language;
  std::ostringstream os;
  os << "interpretation " << I.name << " from " << I.source.name << " to " << I.target.name << " {\n";
  for (std::size_t s = 0; s < T.size(); ++s) {
    const auto& d = I.defs[s];
    os << "  " << T[s].name << "(";
    for (std::size_t i = 0; i < d.args.size(); ++i) os << (i ? "," : "") << d.args[i];
    os << ")";
    if (T[s].is_function()) os << " = " << d.out;
    os << " := " << render_formula(d.delta, S);
    if (!d.herbrand.empty()) {
      os << " via ";
      for (std::size_t i = 0; i < d.herbrand.size(); ++i) os << (i ? ", " : "") << render_term(d.herbrand[i], S);
    }
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

namespace {

// Membership in the interval [0,1] of the discrete order, spelled out.
#define IN01(v) "(" v "=c0 | " v "=c1 | (prec(c0," v ") & prec(" v ",c1)))"

const char* kHapHdp = R"(interpretation HAP_HDP from HAP to HDP {
  prec(x0,x1) := meet(x0,x1)=x0 & x0!=x1;
  b(x0,x1) = y := (y=join(x0,f(meet(x1,comp(x0)))) & meet(x0,x1)=x0 & x0!=x1)
                | (y=c0 & !(meet(x0,x1)=x0 & x0!=x1))
                via join(x0,f(meet(x1,comp(x0)))), c0;
  c0() = y := y=c0 via c0;
  c1() = y := y=c1 via c1;
})";

const std::string kHdpHop = std::string(R"(interpretation HDP_HOP from HDP to HOP {
  f(x) = y := ()") + IN01("x") + " & y=b(c0,x)) | (!" + IN01("x") + R"( & y=c1) via b(c0,x), c1;
  prec(x0,x1) := ()" + IN01("x0") + " & " + IN01("x1") + " & prec(x0,x1)) | (!" + IN01("x1") + " & " +
                              IN01("x0") + R"();
})";

#undef IN01

const char* kIndHop = R"(interpretation IND_HOP from IND to HOP {
  f(x) = y := y=s(x) via s(x);
  prec(x0,x1) := (P(x0) & P(x1) & prec(x1,x0)) | (!P(x1) & P(x0));
})";

const char* kIndPhp = R"(interpretation IND_PHP from IND to PHP {
  f(x) = y := (P(x) & y=s(x)) | (!P(x) & y=x) via s(x), x;
  c() = y := y=min via min;
})";

const std::vector<Interpretation>& registry() {
  static const std::vector<Interpretation> all = [] {
    std::vector<Interpretation> v;
    for (const std::string& src : {std::string(kHapHdp), kHdpHop, std::string(kIndHop), std::string(kIndPhp)})
      v.push_back(parse_interpretation(src));
    return v;
  }();
  return all;
}

}  // namespace

std::vector<std::string> builtin_interpretation_names() {
  std::vector<std::string> out;
  for (const auto& I : registry()) out.push_back(I.name);
  return out;
}

const Interpretation& builtin_interpretation(const std::string& name) {
  for (const auto& I : registry())
    if (I.name == name) return I;
  throw ContractError("unknown interpretation '" + name + "'");
}

ValidityReport check_validity_exhaustive(const Interpretation& I, unsigned n) {
  ValidityReport r;
  r.n = n;
  r.exhaustive = true;
  const Language& T = I.target.language;
  PartialStructure b(I.source.language, n);
  for (std::size_t s = 0; s < T.size() && r.ok; ++s) {
    if (!T[s].is_function()) continue;
    for_tuples(T[s].arity, n, [&](const std::vector<unsigned>& args) {
      LazySearch search{I, I.defs[s], args, n, 0, {}};
      if (!search.run(b)) {
        r.ok = false;
        r.problem = T[s].name + tuple_text(args) + ": " + search.problem;
      }
      r.cases += search.leaves;
      return r.ok;
    });
  }
  return r;
}

ValidityReport check_validity_sampled(const Interpretation& I, unsigned n, std::size_t samples, std::uint64_t seed) {
  ValidityReport r;
  r.n = n;
  std::mt19937_64 rng(seed);
  const Language& T = I.target.language;
  for (std::size_t k = 0; k < samples && r.ok; ++k) {
    PartialStructure b = random_structure(I.source.language, n, rng);
    ++r.cases;
    auto ev = evaluator(b);
    for (std::size_t s = 0; s < T.size() && r.ok; ++s) {
      if (!T[s].is_function()) continue;
      for_tuples(T[s].arity, n, [&](const std::vector<unsigned>& args) {
        LocalCheck c = check_local(ev, I.defs[s], args, n);
        if (c.status != LocalStatus::Ok) {
          r.ok = false;
          r.problem = T[s].name + tuple_text(args) + ": " + c.problem + " on " + render_structure(b);
        }
        return r.ok;
      });
    }
  }
  return r;
}

PartialStructure apply_interpretation(const Interpretation& I, const PartialStructure& b) {
  if (!(b.language() == I.source.language)) throw ContractError("structure is not over the source language");
  if (!b.is_total()) throw ContractError("apply_interpretation needs a total structure");
  const unsigned n = b.n();
  const Language& T = I.target.language;
  PartialStructure out(T, n);
  auto ev = evaluator(b);
  for (std::size_t s = 0; s < T.size(); ++s) {
    const auto& d = I.defs[s];
    for_tuples(T[s].arity, n, [&](const std::vector<unsigned>& args) {
      Env env = env_of(d, args);
      if (!T[s].is_function()) {
        out.set(s, args, ev.formula(d.delta, env) == Truth::True);
        return true;
      }
      int value = kUndef;
      for (unsigned y = 0; y < n; ++y) {
        env.emplace_back(d.out, y);
        bool sat = ev.formula(d.delta, env) == Truth::True;
        env.pop_back();
        if (!sat) continue;
        if (value != kUndef)
          throw ContractError("definition of " + T[s].name + " is not functional at " + tuple_text(args) +
                              ": values " + std::to_string(value) + " and " + std::to_string(y));
        value = static_cast<int>(y);
      }
      if (value == kUndef)
        throw ContractError("definition of " + T[s].name + " has no value at " + tuple_text(args));
      out.set(s, args, value);
      return true;
    });
  }
  return out;
}

TransportReport falsification_transport(const Interpretation& I, const PartialStructure& b) {
  TransportReport r;
  r.source_value = eval3(b, I.source);
  r.target_value = eval3(apply_interpretation(I, b), I.target);
  r.violation = r.target_value == Truth::True && r.source_value != Truth::True;
  return r;
}

std::vector<unsigned> term_closure(const PartialStructure& b, std::vector<unsigned> seeds, unsigned depth) {
  std::vector<unsigned> cur = std::move(seeds);
  std::sort(cur.begin(), cur.end());
  cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
  const Language& L = b.language();
  for (unsigned round = 0; round < depth; ++round) {
    std::vector<unsigned> next = cur;
    for (std::size_t s = 0; s < L.size(); ++s) {
      if (!L[s].is_function()) continue;
      const unsigned k = L[s].arity;
      if (cur.empty() && k > 0) continue;
      std::vector<std::size_t> idx(k, 0);
      for (;;) {
        std::vector<unsigned> args(k);
        for (unsigned i = 0; i < k; ++i) args[i] = cur[idx[i]];
        int v = b.get(s, args);
        if (v != kUndef) next.push_back(static_cast<unsigned>(v));
        std::size_t i = k;
        while (i > 0 && ++idx[i - 1] == cur.size()) idx[--i] = 0;
        if (i == 0) break;
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cur = std::move(next);
  }
  return cur;
}

Witness pullback_solution(const Interpretation& I, const PartialStructure& b, const Witness& w) {
  PartialStructure ib = apply_interpretation(I, b);
  if (w.disjunct >= I.target.matrix.size() || w.values.size() != I.target.vars.size())
    throw ContractError("witness does not match the target principle's shape");
  for (const Literal& l : I.target.matrix[w.disjunct])
    if (literal_value(ib, l, w.values) != Truth::True)
      throw ContractError("supplied witness does not verify: " + render_literal(l, I.target) + " is not true");
  std::vector<unsigned> domain = term_closure(b, w.values, 2);
  auto found = Matcher(I.source).find(b, &domain);
  if (!found)
    throw Error("pullback search exhausted the " + std::to_string(domain.size()) +
                " candidate elements without a source witness");
  return *found;
}

namespace {

struct NeedQuery {
  RelevantKey key;
};

// Reads cells of the decoded structure through the answers given so far.
struct AnswerReader {
  const KeySpace* ks;
  const std::vector<bool>* answers;
  std::size_t* pos;
  std::map<std::pair<std::size_t, std::vector<unsigned>>, int>* cache;

  bool bit(RelevantKey k) const {
    if (*pos < answers->size()) return (*answers)[(*pos)++];
    throw NeedQuery{std::move(k)};
  }

  int operator()(std::size_t sym, const std::vector<unsigned>& args) const {
    auto it = cache->find({sym, args});
    if (it != cache->end()) return it->second;
    const Language& L = ks->language();
    int v;
    if (!L[sym].is_function()) {
      v = bit({RelevantKey::Kind::Rel, sym, args, 0});
    } else {
      std::uint64_t x = 0;
      for (unsigned i = 0; i < ks->bits(); ++i)
        if (bit({RelevantKey::Kind::FunBit, sym, args, i})) x |= std::uint64_t{1} << i;
      v = static_cast<int>(std::min<std::uint64_t>(x, ks->n() - 1));
    }
    cache->emplace(std::make_pair(sym, args), v);
    return v;
  }
};

std::size_t reads(const Term& t) {
  std::size_t r = t.kind == Term::Kind::Apply ? 1 : 0;
  for (const auto& a : t.args) r += reads(a);
  return r;
}

std::size_t reads(const Formula& f) {
  std::size_t r = f.kind == Formula::Kind::Relation ? 1 : 0;
  for (const auto& t : f.terms) r += reads(t);
  for (const auto& c : f.children) r += reads(c);
  return r;
}

}  // namespace

TreeFamily trees_from_interpretation(const Interpretation& I, unsigned n) {
  TreeFamily F;
  F.source = I.source.language;
  F.target = I.target.language;
  F.m = n;
  auto ks = std::make_shared<KeySpace>(F.source, n);
  const Language& T = F.target;
  for (std::size_t s = 0; s < T.size(); ++s) {
    const SymbolDefinition d = I.defs[s];
    const bool fun = T[s].is_function();
    // Cells read: the formula once per Herbrand term plus the terms; each
    // cell costs at most len(n) queries.
    std::size_t cells = fun ? 0 : reads(d.delta);
    for (const auto& t : d.herbrand) cells += reads(t) + reads(d.delta);
    const unsigned height = static_cast<unsigned>(cells * std::max(1u, ks->bits()));
    F.b0 = std::max(F.b0, height);
    auto fn = [ks, d, fun, n](std::span<const unsigned> input, const std::vector<bool>& answers) -> Label {
      std::size_t pos = 0;
      std::map<std::pair<std::size_t, std::vector<unsigned>>, int> cache;
      LazyEval<AnswerReader> ev{ks->language(), n, AnswerReader{ks.get(), &answers, &pos, &cache}, {}};
      Env env = env_of(d, input);
      try {
        if (!fun) return Label::output(ev.formula(d.delta, env) == Truth::True ? 1 : 0);
        for (const auto& t : d.herbrand) {
          int v = ev.term(t, env);
          env.emplace_back(d.out, static_cast<unsigned>(v));
          bool sat = ev.formula(d.delta, env) == Truth::True;
          env.pop_back();
          if (sat) return Label::output(static_cast<std::uint64_t>(v));
        }
        return Label::output(0);
      } catch (const NeedQuery& q) {
        return Label::query(q.key);
      }
    };
    F.trees.emplace_back(T[s].arity, height, fn);
  }
  return F;
}

PartialStructure random_structure(const Language& lang, unsigned n, std::mt19937_64& rng) {
  PartialStructure b(lang, n);
  for (std::size_t c = 0; c < b.cell_count(); ++c) {
    const unsigned range = lang[b.symbol_of(c)].is_function() ? n : 2;
    b.set_unchecked(c, static_cast<int>(std::uniform_int_distribution<unsigned>(0, range - 1)(rng)));
  }
  return b;
}

}  // namespace finprin
