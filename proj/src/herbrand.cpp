#include <algorithm>
#include <map>
#include <set>

#include "finprin/syntax.hpp"

namespace finprin {

namespace {

using K = Formula::Kind;

Formula nnf(const Formula& f, bool neg) {
  switch (f.kind) {
    case K::True:
    case K::False:
      return Formula::truth((f.kind == K::True) != neg);
    case K::Relation:
    case K::Equal:
      return neg ? Formula::neg(f) : f;
    case K::Less:
      if (!neg) return f;
      // not a<b  ==  b<a or a=b  (linear order)
      return Formula::disj({Formula::less(f.terms[1], f.terms[0]), Formula::eq(f.terms[0], f.terms[1])});
    case K::Not:
      return nnf(f.children[0], !neg);
    case K::And:
    case K::Or: {
      std::vector<Formula> cs;
      for (const auto& c : f.children) cs.push_back(nnf(c, neg));
      bool conj = (f.kind == K::And) != neg;
      if (cs.empty()) return Formula::truth(conj);
      return conj ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
    }
    case K::Forall:
    case K::Exists: {
      bool all = (f.kind == K::Forall) != neg;
      Formula body = nnf(f.children[0], neg);
      return all ? Formula::forall(f.var, std::move(body)) : Formula::exists(f.var, std::move(body));
    }
  }
  return f;
}

class Herbrandizer {
 public:
  Herbrandizer(const Language& lang) : lang_(lang) {
    for (const auto& s : lang.symbols()) used_.insert(s.name);
  }

  // Removes quantifiers: universals become fresh functions of the enclosing
  // existentials, existentials are collected into vars_.
  Formula strip(const Formula& f, std::vector<std::string>& scope) {
    switch (f.kind) {
      case K::And:
      case K::Or: {
        std::vector<Formula> cs;
        for (const auto& c : f.children) cs.push_back(strip(c, scope));
        return f.kind == K::And ? Formula::conj(std::move(cs)) : Formula::disj(std::move(cs));
      }
      case K::Exists: {
        std::string v = f.var;
        Formula body = f.children[0];
        if (used_.count(v)) {
          std::string nv = fresh("y");
          body = substitute(body, v, Term::var(nv));
          v = nv;
        }
        used_.insert(v);
        vars_.push_back(v);
        scope.push_back(v);
        Formula r = strip(body, scope);
        scope.pop_back();
        return r;
      }
      case K::Forall: {
        std::string name = fresh("h");
        used_.insert(name);
        lang_ = lang_.with_symbol(Symbol{name, SymbolKind::Function, static_cast<unsigned>(scope.size())});
        std::vector<Term> args;
        for (const auto& v : scope) args.push_back(Term::var(v));
        Term t = Term::apply(lang_.size() - 1, std::move(args));
        return strip(substitute(f.children[0], f.var, t), scope);
      }
      default:
        return f;
    }
  }

  std::string fresh(const std::string& base) {
    for (std::size_t i = counter_[base];; ++i) {
      std::string c = base + std::to_string(i);
      if (!used_.count(c)) {
        counter_[base] = i + 1;
        return c;
      }
    }
  }

  Language lang_;
  std::set<std::string> used_;
  std::vector<std::string> vars_;
  std::map<std::string, std::size_t> counter_;
};

// DNF of a quantifier-free NNF formula; each disjunct is a list of literal
// formulas. Constant True disappears; a False literal kills the disjunct.
using Dnf = std::vector<std::vector<Formula>>;

Dnf to_dnf(const Formula& f) {
  switch (f.kind) {
    case K::True:
      return {{}};
    case K::False:
      return {};
    case K::Or: {
      Dnf out;
      for (const auto& c : f.children) {
        auto d = to_dnf(c);
        out.insert(out.end(), d.begin(), d.end());
      }
      return out;
    }
    case K::And: {
      Dnf acc{{}};
      for (const auto& c : f.children) {
        auto d = to_dnf(c);
        Dnf next;
        for (const auto& a : acc)
          for (const auto& b : d) {
            auto merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            next.push_back(std::move(merged));
          }
        acc = std::move(next);
      }
      return acc;
    }
    default:
      return {{f}};
  }
}

class Flattener {
 public:
  Flattener(Herbrandizer& h, BasicSentence& out) : h_(h), out_(out) {}

  std::vector<Literal> conj(const std::vector<Formula>& lits) {
    memo_.clear();
    lits_.clear();
    for (const auto& l : lits) literal(l);
    return lits_;
  }

 private:
  unsigned var_index(const std::string& name) {
    auto it = std::find(out_.vars.begin(), out_.vars.end(), name);
    if (it != out_.vars.end()) return static_cast<unsigned>(it - out_.vars.begin());
    out_.vars.push_back(name);
    return static_cast<unsigned>(out_.vars.size() - 1);
  }

  unsigned fresh_var() {
    std::string v = h_.fresh("y");
    h_.used_.insert(v);
    return var_index(v);
  }

  std::vector<unsigned> flat_args(const std::vector<Term>& ts) {
    std::vector<unsigned> out;
    for (const auto& t : ts) out.push_back(term(t));
    return out;
  }

  // Variable naming the value of t; emits defining literals.
  unsigned term(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Variable:
        return var_index(t.name);
      case Term::Kind::Parameter:
        throw ContractError("herbrandize: parameters are not allowed in sentences");
      default:
        break;
    }
    auto key = render_key(t);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Literal l;
    if (t.kind == Term::Kind::Numeral) {
      l.kind = Literal::Kind::Numeral;
      l.numeral = t.value;
    } else {
      l.kind = Literal::Kind::Fun;
      l.symbol = t.symbol;
      l.args = flat_args(t.args);
    }
    l.out = fresh_var();
    lits_.push_back(l);
    memo_[key] = l.out;
    return l.out;
  }

  static std::string render_key(const Term& t) {
    std::string s;
    switch (t.kind) {
      case Term::Kind::Variable:
        return "v:" + t.name;
      case Term::Kind::Parameter:
        return "p:" + std::to_string(t.value);
      case Term::Kind::Numeral:
        return "n:" + std::to_string(t.value);
      case Term::Kind::Apply:
        s = "a:" + std::to_string(t.symbol) + "(";
        for (const auto& a : t.args) s += render_key(a) + ",";
        return s + ")";
    }
    return s;
  }

  void literal(const Formula& f) {
    bool positive = f.kind != K::Not;
    const Formula& a = positive ? f : f.children[0];
    Literal l;
    l.positive = positive;
    switch (a.kind) {
      case K::Relation:
        l.kind = Literal::Kind::Rel;
        l.symbol = a.symbol;
        l.args = flat_args(a.terms);
        break;
      case K::Less:
        l.kind = Literal::Kind::Less;
        l.args = flat_args(a.terms);
        break;
      case K::Equal: {
        const Term& lhs = a.terms[0];
        const Term& rhs = a.terms[1];
        if (positive && rhs.kind == Term::Kind::Variable && lhs.kind != Term::Kind::Variable &&
            !memo_.count(render_key(lhs))) {
          if (lhs.kind == Term::Kind::Numeral) {
            l.kind = Literal::Kind::Numeral;
            l.numeral = lhs.value;
          } else {
            l.kind = Literal::Kind::Fun;
            l.symbol = lhs.symbol;
            l.args = flat_args(lhs.args);
          }
          l.out = var_index(rhs.name);
          break;
        }
        if (positive && lhs.kind == Term::Kind::Variable && rhs.kind == Term::Kind::Apply &&
            !memo_.count(render_key(rhs))) {
          l.kind = Literal::Kind::Fun;
          l.symbol = rhs.symbol;
          l.args = flat_args(rhs.args);
          l.out = var_index(lhs.name);
          break;
        }
        l.kind = Literal::Kind::Eq;
        l.args = {term(lhs), term(rhs)};
        break;
      }
      default:
        throw ContractError("herbrandize: unexpected node in matrix");
    }
    lits_.push_back(std::move(l));
  }

  Herbrandizer& h_;
  BasicSentence& out_;
  std::map<std::string, unsigned> memo_;
  std::vector<Literal> lits_;
};

}  // namespace

BasicSentence herbrandize(const Formula& sentence, const Language& lang, std::string name) {
  if (!free_variables(sentence).empty()) throw ContractError("herbrandize: input has free variables");
  Herbrandizer h(lang);
  std::vector<std::string> scope;
  Formula matrix = h.strip(nnf(sentence, false), scope);

  BasicSentence out;
  out.name = name.empty() ? std::string("H") : std::move(name);
  out.vars = h.vars_;
  Dnf dnf = to_dnf(matrix);
  Flattener fl(h, out);
  bool valid = false;
  for (const auto& c : dnf) {
    if (c.empty()) {
      valid = true;
      break;
    }
    out.matrix.push_back(fl.conj(c));
  }
  out.language = h.lang_;
  if (out.vars.empty()) {
    std::string v = h.fresh("x");
    out.vars.push_back(v);
  }
  if (valid) {
    out.matrix = {{Literal{Literal::Kind::Eq, true, 0, 0, {0, 0}, 0}}};
  } else if (out.matrix.empty()) {
    out.matrix = {{Literal{Literal::Kind::Eq, false, 0, 0, {0, 0}, 0}}};
  }
  out.validate();
  return out;
}

}  // namespace finprin
