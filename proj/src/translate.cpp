#include "finprin/translate.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <sstream>

namespace finprin {

unsigned Translation::num_vars() const {
  return static_cast<unsigned>(coding == Coding::Unary ? space.unary_size() : space.size());
}

std::string Translation::var_name(unsigned id) const {
  if (id == 0 || id > num_vars()) return "x" + std::to_string(id);
  return coding == Coding::Unary ? space.render(space.unary_key(id - 1)) : space.render(space.key(id - 1));
}

namespace {

// Calls fn(values) for every tuple in [n]^k, lexicographic.
void for_tuples(unsigned k, unsigned n, const std::function<void(const std::vector<unsigned>&)>& fn) {
  std::vector<unsigned> v(k, 0);
  for (;;) {
    fn(v);
    std::size_t i = k;
    while (i > 0 && ++v[i - 1] == n) v[--i] = 0;
    if (i == 0) return;
  }
}

std::vector<unsigned> args_of(const Literal& l, const std::vector<unsigned>& values) {
  std::vector<unsigned> a;
  for (unsigned v : l.args) a.push_back(values[v]);
  return a;
}

// Literals whose truth needs no oracle.
std::optional<bool> closed_value(const Literal& l, const std::vector<unsigned>& values, unsigned n) {
  switch (l.kind) {
    case Literal::Kind::Eq:
      return (values[l.args[0]] == values[l.args[1]]) == l.positive;
    case Literal::Kind::Less:
      return values[l.args[0]] < values[l.args[1]];
    case Literal::Kind::Numeral:
      return l.numeral < n && values[l.out] == l.numeral;
    default:
      return std::nullopt;
  }
}

template <class LitFn>
PropFormula matrix_translation(const BasicSentence& s, unsigned n, LitFn lit) {
  std::vector<PropFormula> out;
  for_tuples(static_cast<unsigned>(s.vars.size()), n, [&](const std::vector<unsigned>& values) {
    for (const auto& conj : s.matrix) {
      std::vector<PropFormula> parts;
      for (const Literal& l : conj) {
        if (auto c = closed_value(l, values, n)) parts.push_back(PropFormula::constant(*c));
        else parts.push_back(lit(l, values));
      }
      out.push_back(PropFormula::conj(std::move(parts)));
    }
  });
  return PropFormula::disj(std::move(out));
}

unsigned bit_of(std::uint64_t v, unsigned i) { return static_cast<unsigned>((v >> i) & 1u); }

}  // namespace

Translation unary_translation(const BasicSentence& s, unsigned n) {
  Translation t;
  t.coding = Coding::Unary;
  t.space = KeySpace(s.language, n);
  const KeySpace& ks = t.space;
  const Language& L = s.language;
  auto var = [&](UnaryKey k) { return static_cast<unsigned>(ks.unary_index(k) + 1); };

  // Negation of "A is defined": some tuple has no value or two values.
  std::vector<PropFormula> undefined;
  for (std::size_t sym = 0; sym < L.size(); ++sym) {
    if (!L[sym].is_function()) continue;
    for_tuples(L[sym].arity, n, [&](const std::vector<unsigned>& u) {
      std::vector<PropFormula> none;
      for (unsigned v = 0; v < n; ++v) none.push_back(PropFormula::lit(var({UnaryKey::Kind::FunGraph, sym, u, v}), false));
      undefined.push_back(PropFormula::conj(std::move(none)));
    });
    for_tuples(L[sym].arity, n, [&](const std::vector<unsigned>& u) {
      for (unsigned v = 0; v < n; ++v)
        for (unsigned w = 0; w < n; ++w)
          undefined.push_back(PropFormula::conj({PropFormula::constant(v != w),
                                                 PropFormula::lit(var({UnaryKey::Kind::FunGraph, sym, u, v})),
                                                 PropFormula::lit(var({UnaryKey::Kind::FunGraph, sym, u, w}))}));
    });
  }
  PropFormula consequent = matrix_translation(s, n, [&](const Literal& l, const std::vector<unsigned>& values) {
    auto a = args_of(l, values);
    if (l.kind == Literal::Kind::Rel) return PropFormula::lit(var({UnaryKey::Kind::Rel, l.symbol, a, 0}), l.positive);
    return PropFormula::lit(var({UnaryKey::Kind::FunGraph, l.symbol, a, values[l.out]}));
  });
  t.formula = PropFormula::disj({PropFormula::disj(std::move(undefined)), std::move(consequent)});
  return t;
}

Translation binary_translation(const BasicSentence& s, unsigned n) {
  Translation t;
  t.coding = Coding::Binary;
  t.space = KeySpace(s.language, n);
  const KeySpace& ks = t.space;
  const unsigned bits = ks.bits();
  auto var = [&](RelevantKey k) { return static_cast<unsigned>(ks.index(k) + 1); };

  t.formula = matrix_translation(s, n, [&](const Literal& l, const std::vector<unsigned>& values) {
    auto a = args_of(l, values);
    if (l.kind == Literal::Kind::Rel) return PropFormula::lit(var({RelevantKey::Kind::Rel, l.symbol, a, 0}), l.positive);
    const unsigned v = values[l.out];
    auto bit = [&](unsigned i) { return var({RelevantKey::Kind::FunBit, l.symbol, a, i}); };
    // The stored number is v itself.
    std::vector<PropFormula> exact{PropFormula::constant(v < n)};
    for (unsigned i = 0; i < bits; ++i) exact.push_back(PropFormula::lit(bit(i), bit_of(v, i)));
    // Or v = n-1 and the stored number exceeds n-1: first differing bit from the top is 1 where n-1 has 0.
    std::vector<PropFormula> above;
    for (unsigned i = 0; i < bits; ++i) {
      std::vector<PropFormula> c{PropFormula::lit(bit(i)), PropFormula::constant(bit_of(n - 1, i) == 0)};
      for (unsigned j = i + 1; j < bits; ++j) c.push_back(PropFormula::lit(bit(j), bit_of(n - 1, j)));
      above.push_back(PropFormula::conj(std::move(c)));
    }
    PropFormula clamp = PropFormula::conj({PropFormula::constant(v == n - 1), PropFormula::disj(std::move(above))});
    return PropFormula::disj({PropFormula::conj(std::move(exact)), std::move(clamp)});
  });
  return t;
}

PropFormula simplify_constants(const PropFormula& f) {
  if (f.is_const() || f.is_literal()) return f;
  const bool is_and = f.kind == PropFormula::Kind::And;
  const PropFormula::Kind unit = is_and ? PropFormula::Kind::True : PropFormula::Kind::False;
  const PropFormula::Kind absorbing = is_and ? PropFormula::Kind::False : PropFormula::Kind::True;
  std::vector<PropFormula> kids;
  for (const auto& c : f.children) {
    PropFormula s = simplify_constants(c);
    if (s.kind == absorbing) return s;
    if (s.kind == unit) continue;
    if (s.kind == f.kind) {
      for (auto& g : s.children) kids.push_back(std::move(g));
    } else {
      kids.push_back(std::move(s));
    }
  }
  if (kids.empty()) return PropFormula::constant(is_and);
  if (kids.size() == 1) return std::move(kids[0]);
  return {f.kind, 0, std::move(kids)};
}

namespace {

using DnfTerm = std::vector<int>;  // sorted signed variable ids

std::vector<DnfTerm> dnf_terms(const PropFormula& f, std::size_t cap) {
  using K = PropFormula::Kind;
  switch (f.kind) {
    case K::False: return {};
    case K::True: return {DnfTerm{}};
    case K::Var: return {DnfTerm{static_cast<int>(f.var)}};
    case K::NegVar: return {DnfTerm{-static_cast<int>(f.var)}};
    case K::Or: {
      std::vector<DnfTerm> out;
      for (const auto& c : f.children) {
        auto t = dnf_terms(c, cap);
        out.insert(out.end(), t.begin(), t.end());
        if (out.size() > cap) throw CapExceeded("DNF expansion exceeded " + std::to_string(cap) + " terms", 0);
      }
      return out;
    }
    case K::And: {
      std::vector<DnfTerm> acc{DnfTerm{}};
      for (const auto& c : f.children) {
        auto t = dnf_terms(c, cap);
        std::vector<DnfTerm> next;
        for (const DnfTerm& a : acc)
          for (const DnfTerm& b : t) {
            DnfTerm m;
            std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
            bool clash = false;
            for (int l : m) clash |= std::binary_search(m.begin(), m.end(), -l);
            if (!clash) next.push_back(std::move(m));
            if (next.size() > cap) throw CapExceeded("DNF expansion exceeded " + std::to_string(cap) + " terms", 0);
          }
        acc = std::move(next);
        if (acc.empty()) break;
      }
      return acc;
    }
  }
  return {};
}

}  // namespace

PropFormula to_dnf(const PropFormula& f, std::size_t term_cap) {
  std::vector<PropFormula> terms;
  for (const DnfTerm& t : dnf_terms(f, term_cap)) {
    std::vector<PropFormula> lits;
    for (int l : t) lits.push_back(PropFormula::lit(static_cast<unsigned>(std::abs(l)), l > 0));
    terms.push_back(PropFormula::conj(std::move(lits)));
  }
  return simplify_constants(PropFormula::disj(std::move(terms)));
}

PropFormula negate(const PropFormula& f) {
  using K = PropFormula::Kind;
  switch (f.kind) {
    case K::False: return PropFormula::constant(true);
    case K::True: return PropFormula::constant(false);
    case K::Var: return PropFormula::lit(f.var, false);
    case K::NegVar: return PropFormula::lit(f.var, true);
    default: break;
  }
  std::vector<PropFormula> kids;
  kids.reserve(f.children.size());
  for (const auto& c : f.children) kids.push_back(negate(c));
  return {f.kind == K::And ? K::Or : K::And, 0, std::move(kids)};
}

PropFormula substitute(const PropFormula& f, const std::map<unsigned, PropFormula>& sigma) {
  using K = PropFormula::Kind;
  if (f.kind == K::Var || f.kind == K::NegVar) {
    auto it = sigma.find(f.var);
    if (it == sigma.end()) return f;
    return f.kind == K::Var ? it->second : negate(it->second);
  }
  if (f.is_const()) return f;
  std::vector<PropFormula> kids;
  kids.reserve(f.children.size());
  for (const auto& c : f.children) kids.push_back(substitute(c, sigma));
  return {f.kind, 0, std::move(kids)};
}

Metrics metrics(const PropFormula& f) {
  if (f.is_const() || f.is_literal()) return {0, 1};
  Metrics m{0, 1};
  for (const auto& c : f.children) {
    Metrics cm = metrics(c);
    m.size += cm.size;
    std::size_t d = c.kind == f.kind ? cm.depth : cm.depth + 1;
    m.depth = std::max(m.depth, d);
  }
  if (f.children.empty()) m.depth = 0;
  return m;
}

bool evaluate(const PropFormula& f, const std::vector<std::uint8_t>& a) {
  using K = PropFormula::Kind;
  switch (f.kind) {
    case K::False: return false;
    case K::True: return true;
    case K::Var: return a.at(f.var) != 0;
    case K::NegVar: return a.at(f.var) == 0;
    case K::And:
      for (const auto& c : f.children)
        if (!evaluate(c, a)) return false;
      return true;
    case K::Or:
      for (const auto& c : f.children)
        if (evaluate(c, a)) return true;
      return false;
  }
  return false;
}

Truth evaluate3(const PropFormula& f, const std::vector<std::int8_t>& a) {
  using K = PropFormula::Kind;
  switch (f.kind) {
    case K::False: return Truth::False;
    case K::True: return Truth::True;
    case K::Var:
    case K::NegVar: {
      int v = a.at(f.var);
      if (v < 0) return Truth::Half;
      return (v != 0) == (f.kind == K::Var) ? Truth::True : Truth::False;
    }
    case K::And: {
      Truth r = Truth::True;
      for (const auto& c : f.children) {
        r = t_and(r, evaluate3(c, a));
        if (r == Truth::False) break;
      }
      return r;
    }
    case K::Or: {
      Truth r = Truth::False;
      for (const auto& c : f.children) {
        r = t_or(r, evaluate3(c, a));
        if (r == Truth::True) break;
      }
      return r;
    }
  }
  return Truth::Half;
}

std::vector<std::uint8_t> assignment_of(const FullOracle& alpha) {
  std::vector<std::uint8_t> a(alpha.bits.size() + 1, 0);
  std::copy(alpha.bits.begin(), alpha.bits.end(), a.begin() + 1);
  return a;
}

std::vector<std::uint8_t> assignment_of(const UnaryCode& code) {
  std::vector<std::uint8_t> a(code.bits.size() + 1, 0);
  std::copy(code.bits.begin(), code.bits.end(), a.begin() + 1);
  return a;
}

namespace {

PropFormula assign(const PropFormula& f, unsigned var, bool value) {
  return simplify_constants(substitute(f, {{var, PropFormula::constant(value)}}));
}

const PropFormula* first_literal(const PropFormula& f) {
  if (f.is_literal()) return &f;
  for (const auto& c : f.children)
    if (auto l = first_literal(c)) return l;
  return nullptr;
}

struct TautologySearch {
  std::uint64_t cap;
  std::uint64_t nodes = 0;
  std::vector<std::int8_t> partial;

  bool run(const PropFormula& f) {
    if (++nodes > cap) throw CapExceeded("tautology search exceeded the node cap of " + std::to_string(cap), 0);
    if (f.kind == PropFormula::Kind::True) return true;
    if (f.kind == PropFormula::Kind::False) return false;
    unsigned v = first_literal(f)->var;
    for (bool b : {false, true}) {
      partial[v] = b;
      if (!run(assign(f, v, b))) return false;
    }
    partial[v] = -1;
    return true;
  }
};

}  // namespace

TautologyResult check_tautology(const PropFormula& f, unsigned num_vars, std::uint64_t node_cap) {
  TautologySearch s{node_cap, 0, std::vector<std::int8_t>(num_vars + 1, -1)};
  TautologyResult r;
  r.tautology = s.run(simplify_constants(f));
  r.nodes = s.nodes;
  if (!r.tautology) {
    std::vector<std::uint8_t> a(num_vars + 1, 0);
    for (unsigned i = 1; i <= num_vars; ++i) a[i] = s.partial[i] > 0;
    r.counterexample = a;
  }
  return r;
}

namespace {

int lit_code(const PropFormula& l) { return l.kind == PropFormula::Kind::Var ? static_cast<int>(l.var) : -static_cast<int>(l.var); }

struct Tseitin {
  Cnf& cnf;
  // Returns the literal standing for g.
  int encode(const PropFormula& g) {
    if (g.is_literal()) return lit_code(g);
    int x = static_cast<int>(++cnf.num_vars);
    std::vector<int> kids;
    for (const auto& c : g.children) kids.push_back(encode(c));
    std::vector<int> big;
    if (g.kind == PropFormula::Kind::And) {
      // x <-> and(kids)
      big.push_back(x);
      for (int k : kids) {
        cnf.clauses.push_back({-x, k});
        big.push_back(-k);
      }
    } else {
      big.push_back(-x);
      for (int k : kids) {
        cnf.clauses.push_back({x, -k});
        big.push_back(k);
      }
    }
    cnf.clauses.push_back(std::move(big));
    return x;
  }
};

}  // namespace

Cnf negation_cnf(const PropFormula& f, unsigned num_vars, CnfMode mode) {
  Cnf cnf;
  cnf.num_vars = num_vars;
  cnf.original_vars = num_vars;
  PropFormula g = simplify_constants(f);
  if (g.kind == PropFormula::Kind::True) {
    cnf.clauses.push_back({});
    return cnf;
  }
  if (g.kind == PropFormula::Kind::False) return cnf;
  if (mode == CnfMode::Direct) {
    // not(or of terms) = and of (or of negated literals).
    std::vector<const PropFormula*> terms;
    if (g.kind == PropFormula::Kind::Or) {
      for (const auto& c : g.children) terms.push_back(&c);
    } else {
      terms.push_back(&g);
    }
    for (const PropFormula* t : terms) {
      std::vector<int> clause;
      if (t->is_literal()) {
        clause.push_back(-lit_code(*t));
      } else if (t->kind == PropFormula::Kind::And) {
        for (const auto& l : t->children) {
          if (!l.is_literal()) throw ContractError("direct CNF needs a disjunction of conjunctions of literals");
          clause.push_back(-lit_code(l));
        }
      } else {
        throw ContractError("direct CNF needs a disjunction of conjunctions of literals");
      }
      cnf.clauses.push_back(std::move(clause));
    }
    return cnf;
  }
  Tseitin ts{cnf};
  int root = ts.encode(g);
  cnf.clauses.push_back({-root});
  return cnf;
}

std::string to_dimacs(const Cnf& cnf, const std::vector<std::string>& comments) {
  std::ostringstream os;
  for (const auto& c : comments) os << "c " << c << "\n";
  os << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
  for (const auto& cl : cnf.clauses) {
    for (int l : cl) os << l << " ";
    os << "0\n";
  }
  return os.str();
}

bool satisfiable_exhaustive(const Cnf& cnf) {
  if (cnf.num_vars > 40) throw ContractError("exhaustive CNF check limited to 40 variables");
  // 64 assignments per word: variables 1..6 vary inside the word, the rest
  // come from the block counter.
  static constexpr std::uint64_t kLow[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
                                            0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  const unsigned low = std::min(cnf.num_vars, 6u);
  const std::uint64_t valid = low == 6 ? ~0ull : (1ull << (1u << low)) - 1;
  const std::uint64_t blocks = cnf.num_vars > 6 ? std::uint64_t{1} << (cnf.num_vars - 6) : 1;
  for (std::uint64_t blk = 0; blk < blocks; ++blk) {
    std::uint64_t alive = valid;
    for (const auto& cl : cnf.clauses) {
      std::uint64_t sat = 0;
      for (int l : cl) {
        unsigned v = static_cast<unsigned>(std::abs(l));
        std::uint64_t m = v <= 6 ? kLow[v - 1] : (((blk >> (v - 7)) & 1u) ? ~0ull : 0ull);
        sat |= l > 0 ? m : ~m;
      }
      alive &= sat;
      if (!alive) break;
    }
    if (alive) return true;
  }
  return false;
}

namespace {

struct Dpll {
  const Cnf& cnf;
  std::vector<std::int8_t> val;  // -1 unassigned

  int value(int l) const {
    int v = val[std::abs(l)];
    if (v < 0) return -1;
    return (v == 1) == (l > 0) ? 1 : 0;
  }

  bool solve(std::vector<unsigned>& trail) {
    // Unit propagation to a fixpoint.
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& cl : cnf.clauses) {
        int unassigned = 0, last = 0;
        bool sat = false;
        for (int l : cl) {
          int v = value(l);
          if (v == 1) {
            sat = true;
            break;
          }
          if (v < 0) {
            ++unassigned;
            last = l;
          }
        }
        if (sat) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          val[std::abs(last)] = last > 0 ? 1 : 0;
          trail.push_back(static_cast<unsigned>(std::abs(last)));
          changed = true;
        }
      }
    }
    // Branch on the first unassigned variable of an open clause.
    for (const auto& cl : cnf.clauses) {
      bool sat = false;
      int pick = 0;
      for (int l : cl) {
        int v = value(l);
        if (v == 1) {
          sat = true;
          break;
        }
        if (v < 0 && !pick) pick = std::abs(l);
      }
      if (sat) continue;
      for (std::int8_t b : {std::int8_t{1}, std::int8_t{0}}) {
        std::vector<unsigned> sub{static_cast<unsigned>(pick)};
        val[pick] = b;
        if (solve(sub)) {
          trail.insert(trail.end(), sub.begin(), sub.end());
          return true;
        }
        for (unsigned v : sub) val[v] = -1;
      }
      return false;
    }
    return true;
  }
};

}  // namespace

std::optional<std::vector<std::uint8_t>> dpll(const Cnf& cnf) {
  Dpll d{cnf, std::vector<std::int8_t>(cnf.num_vars + 1, -1)};
  std::vector<unsigned> trail;
  if (!d.solve(trail)) return std::nullopt;
  std::vector<std::uint8_t> model(cnf.num_vars + 1, 0);
  for (unsigned i = 1; i <= cnf.num_vars; ++i) model[i] = d.val[i] == 1;
  return model;
}

std::string render(const PropFormula& f, const Translation* names) {
  using K = PropFormula::Kind;
  auto var = [&](unsigned v) { return names ? names->var_name(v) : "x" + std::to_string(v); };
  switch (f.kind) {
    case K::False: return "0";
    case K::True: return "1";
    case K::Var: return var(f.var);
    case K::NegVar: return "!" + var(f.var);
    default: break;
  }
  std::string s = f.kind == K::And ? "and(" : "or(";
  for (std::size_t i = 0; i < f.children.size(); ++i) s += (i ? ", " : "") + render(f.children[i], names);
  return s + ")";
}

}  // namespace finprin
