#include "finprin/syntax.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace finprin {

using ojson = nlohmann::ordered_json;

Language::Language(std::vector<Symbol> symbols, bool builtin_order, std::vector<unsigned> numerals)
    : symbols_(std::move(symbols)), builtin_order_(builtin_order), numerals_(std::move(numerals)) {
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (s.name.empty()) throw ContractError("empty symbol name");
    if (!seen.insert(s.name).second) throw ContractError("duplicate symbol '" + s.name + "'");
  }
  std::sort(numerals_.begin(), numerals_.end());
  numerals_.erase(std::unique(numerals_.begin(), numerals_.end()), numerals_.end());
}

std::optional<std::size_t> Language::find(std::string_view name) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i].name == name) return i;
  return std::nullopt;
}

std::size_t Language::index_of(std::string_view name) const {
  auto i = find(name);
  if (!i) throw ContractError("unknown symbol '" + std::string(name) + "'");
  return *i;
}

bool Language::has_numeral(unsigned k) const {
  return std::binary_search(numerals_.begin(), numerals_.end(), k);
}

unsigned Language::max_arity() const {
  unsigned m = 0;
  for (const auto& s : symbols_) m = std::max(m, s.arity);
  return m;
}

unsigned Language::r() const { return 1 + max_arity(); }

Language Language::with_symbol(Symbol s) const {
  auto syms = symbols_;
  syms.push_back(std::move(s));
  return Language(std::move(syms), builtin_order_, numerals_);
}

std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > UINT64_MAX / base) return UINT64_MAX;
    r *= base;
  }
  return r;
}

std::uint64_t s_L(const Language& lang, unsigned n) {
  std::uint64_t total = 0;
  for (const auto& s : lang.symbols()) total += ipow(n, s.arity);
  return total;
}

// ---------------------------------------------------------------------------

void BasicSentence::validate() const {
  if (matrix.empty()) throw ContractError("basic sentence needs at least one disjunct");
  const auto nv = static_cast<unsigned>(vars.size());
  auto check_var = [&](unsigned v) {
    if (v >= nv) throw ContractError("literal refers to an undeclared variable");
  };
  for (const auto& conj : matrix) {
    if (conj.empty()) throw ContractError("empty conjunction in basic sentence");
    for (const auto& l : conj) {
      switch (l.kind) {
        case Literal::Kind::Rel:
        case Literal::Kind::Fun: {
          if (l.symbol >= language.size()) throw ContractError("literal symbol out of range");
          const auto& sym = language[l.symbol];
          bool fun = l.kind == Literal::Kind::Fun;
          if (sym.is_function() != fun) throw ContractError("literal kind does not match symbol '" + sym.name + "'");
          if (l.args.size() != sym.arity) throw ContractError("arity mismatch for '" + sym.name + "'");
          if (fun && !l.positive) throw ContractError("negated function literal is not basic");
          for (auto a : l.args) check_var(a);
          if (fun) check_var(l.out);
          break;
        }
        case Literal::Kind::Eq:
          if (l.args.size() != 2) throw ContractError("equality needs two arguments");
          check_var(l.args[0]);
          check_var(l.args[1]);
          break;
        case Literal::Kind::Less:
          if (!language.builtin_order()) throw ContractError("'<' used but not declared built-in");
          if (!l.positive) throw ContractError("built-in order may only occur positively");
          if (l.args.size() != 2) throw ContractError("'<' needs two arguments");
          check_var(l.args[0]);
          check_var(l.args[1]);
          break;
        case Literal::Kind::Numeral:
          if (!language.has_numeral(l.numeral)) throw ContractError("numeral not declared built-in");
          if (!l.positive) throw ContractError("built-in numeral may only occur positively");
          check_var(l.out);
          break;
      }
    }
  }
  std::set<std::string> seen;
  for (const auto& v : vars)
    if (!seen.insert(v).second) throw ContractError("duplicate variable '" + v + "'");
}

// ---------------------------------------------------------------------------

Term Term::var(std::string n) {
  Term t;
  t.kind = Kind::Variable;
  t.name = std::move(n);
  return t;
}
Term Term::param(unsigned v) {
  Term t;
  t.kind = Kind::Parameter;
  t.value = v;
  return t;
}
Term Term::apply(std::size_t sym, std::vector<Term> args) {
  Term t;
  t.kind = Kind::Apply;
  t.symbol = sym;
  t.args = std::move(args);
  return t;
}
Term Term::numeral(unsigned k) {
  Term t;
  t.kind = Kind::Numeral;
  t.value = k;
  return t;
}

Formula Formula::truth(bool v) {
  Formula f;
  f.kind = v ? Kind::True : Kind::False;
  return f;
}
Formula Formula::rel(std::size_t sym, std::vector<Term> args) {
  Formula f;
  f.kind = Kind::Relation;
  f.symbol = sym;
  f.terms = std::move(args);
  return f;
}
Formula Formula::eq(Term a, Term b) {
  Formula f;
  f.kind = Kind::Equal;
  f.terms = {std::move(a), std::move(b)};
  return f;
}
Formula Formula::less(Term a, Term b) {
  Formula f;
  f.kind = Kind::Less;
  f.terms = {std::move(a), std::move(b)};
  return f;
}
Formula Formula::neg(Formula g) {
  Formula f;
  f.kind = Kind::Not;
  f.children.push_back(std::move(g));
  return f;
}
Formula Formula::conj(std::vector<Formula> fs) {
  if (fs.size() == 1) return std::move(fs.front());
  Formula f;
  f.kind = Kind::And;
  f.children = std::move(fs);
  return f;
}
Formula Formula::disj(std::vector<Formula> fs) {
  if (fs.size() == 1) return std::move(fs.front());
  Formula f;
  f.kind = Kind::Or;
  f.children = std::move(fs);
  return f;
}
Formula Formula::forall(std::string v, Formula body) {
  Formula f;
  f.kind = Kind::Forall;
  f.var = std::move(v);
  f.children.push_back(std::move(body));
  return f;
}
Formula Formula::exists(std::string v, Formula body) {
  Formula f;
  f.kind = Kind::Exists;
  f.var = std::move(v);
  f.children.push_back(std::move(body));
  return f;
}

namespace {

void term_vars(const Term& t, std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (t.kind == Term::Kind::Variable) {
    if (std::find(bound.begin(), bound.end(), t.name) == bound.end() &&
        std::find(out.begin(), out.end(), t.name) == out.end())
      out.push_back(t.name);
  }
  for (const auto& a : t.args) term_vars(a, bound, out);
}

void formula_vars(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  for (const auto& t : f.terms) term_vars(t, bound, out);
  if (f.kind == Formula::Kind::Forall || f.kind == Formula::Kind::Exists) {
    bound.push_back(f.var);
    formula_vars(f.children[0], bound, out);
    bound.pop_back();
    return;
  }
  for (const auto& c : f.children) formula_vars(c, bound, out);
}

}  // namespace

std::vector<std::string> free_variables(const Formula& f) {
  std::vector<std::string> bound, out;
  formula_vars(f, bound, out);
  return out;
}

bool is_quantifier_free(const Formula& f) {
  if (f.kind == Formula::Kind::Forall || f.kind == Formula::Kind::Exists) return false;
  return std::all_of(f.children.begin(), f.children.end(), [](const Formula& c) { return is_quantifier_free(c); });
}

Term substitute(const Term& term, const std::string& v, const Term& t) {
  if (term.kind == Term::Kind::Variable) return term.name == v ? t : term;
  Term r = term;
  for (auto& a : r.args) a = substitute(a, v, t);
  return r;
}

Formula substitute(const Formula& f, const std::string& v, const Term& t) {
  if ((f.kind == Formula::Kind::Forall || f.kind == Formula::Kind::Exists) && f.var == v) return f;
  Formula r = f;
  for (auto& term : r.terms) term = substitute(term, v, t);
  for (auto& c : r.children) c = substitute(c, v, t);
  return r;
}

namespace {

Formula literal_formula(const Literal& l, const BasicSentence& s) {
  auto var = [&](unsigned i) { return Term::var(s.vars[i]); };
  auto args = [&]() {
    std::vector<Term> ts;
    for (auto a : l.args) ts.push_back(var(a));
    return ts;
  };
  Formula atom;
  switch (l.kind) {
    case Literal::Kind::Rel:
      atom = Formula::rel(l.symbol, args());
      break;
    case Literal::Kind::Fun:
      atom = Formula::eq(Term::apply(l.symbol, args()), var(l.out));
      break;
    case Literal::Kind::Eq:
      atom = Formula::eq(var(l.args[0]), var(l.args[1]));
      break;
    case Literal::Kind::Less:
      atom = Formula::less(var(l.args[0]), var(l.args[1]));
      break;
    case Literal::Kind::Numeral:
      atom = Formula::eq(Term::numeral(l.numeral), var(l.out));
      break;
  }
  return l.positive ? atom : Formula::neg(std::move(atom));
}

}  // namespace

Formula to_formula(const BasicSentence& s) {
  std::vector<Formula> disjuncts;
  for (const auto& conj : s.matrix) {
    std::vector<Formula> lits;
    for (const auto& l : conj) lits.push_back(literal_formula(l, s));
    disjuncts.push_back(Formula::conj(std::move(lits)));
  }
  Formula body = Formula::disj(std::move(disjuncts));
  for (auto it = s.vars.rbegin(); it != s.vars.rend(); ++it) body = Formula::exists(*it, std::move(body));
  return body;
}

std::size_t formula_size(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Relation:
    case Formula::Kind::Equal:
    case Formula::Kind::Less:
      return 1;
    case Formula::Kind::Not:
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return 1 + formula_size(f.children[0]);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::size_t n = f.children.empty() ? 1 : f.children.size() - 1;
      for (const auto& c : f.children) n += formula_size(c);
      return n;
    }
  }
  return 0;
}

std::size_t formula_size(const BasicSentence& s) { return formula_size(to_formula(s)); }

namespace {

bool flat_atom(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Relation:
      return std::all_of(f.terms.begin(), f.terms.end(), [](const Term& t) { return t.is_flat_var(); });
    case Formula::Kind::Less:
      return f.terms[0].is_flat_var() && f.terms[1].is_flat_var();
    case Formula::Kind::Equal: {
      const auto& a = f.terms[0];
      const auto& b = f.terms[1];
      if (!b.is_flat_var()) return false;
      if (a.is_flat_var() || a.kind == Term::Kind::Numeral) return true;
      if (a.kind != Term::Kind::Apply) return false;
      return std::all_of(a.args.begin(), a.args.end(), [](const Term& t) { return t.is_flat_var(); });
    }
    default:
      return false;
  }
}

bool flat_literal(const Formula& f) {
  if (f.kind == Formula::Kind::Not) {
    const auto& a = f.children[0];
    if (!flat_atom(a) || a.kind == Formula::Kind::Less) return false;
    if (a.kind == Formula::Kind::Equal) return a.terms[0].is_flat_var();
    return true;
  }
  return flat_atom(f);
}

bool flat_conj(const Formula& f) {
  if (f.kind == Formula::Kind::And)
    return !f.children.empty() &&
           std::all_of(f.children.begin(), f.children.end(), [](const Formula& c) { return flat_literal(c); });
  return flat_literal(f);
}

}  // namespace

bool is_basic_shape(const Formula& f) {
  const Formula* g = &f;
  while (g->kind == Formula::Kind::Exists) g = &g->children[0];
  if (g->kind == Formula::Kind::Or)
    return !g->children.empty() &&
           std::all_of(g->children.begin(), g->children.end(), [](const Formula& c) { return flat_conj(c); });
  return flat_conj(*g);
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_literal(const Literal& l, const BasicSentence& s) {
  std::ostringstream os;
  auto arglist = [&]() {
    os << '(';
    for (std::size_t i = 0; i < l.args.size(); ++i) os << (i ? "," : "") << s.vars[l.args[i]];
    os << ')';
  };
  switch (l.kind) {
    case Literal::Kind::Rel:
      if (!l.positive) os << '!';
      os << s.language[l.symbol].name;
      arglist();
      break;
    case Literal::Kind::Fun:
      os << s.language[l.symbol].name;
      arglist();
      os << '=' << s.vars[l.out];
      break;
    case Literal::Kind::Eq:
      os << s.vars[l.args[0]] << (l.positive ? "=" : "!=") << s.vars[l.args[1]];
      break;
    case Literal::Kind::Less:
      os << s.vars[l.args[0]] << '<' << s.vars[l.args[1]];
      break;
    case Literal::Kind::Numeral:
      os << l.numeral << "()=" << s.vars[l.out];
      break;
  }
  return os.str();
}

std::string render_principle(const BasicSentence& s) {
  std::ostringstream os;
  os << "principle " << (s.name.empty() ? "unnamed" : s.name) << " {\n  language {";
  bool first = true;
  for (const auto& sym : s.language.symbols()) {
    os << (first ? " " : ", ") << sym.name << '/' << sym.arity << (sym.is_function() ? " fun" : " rel");
    first = false;
  }
  if (s.language.builtin_order()) {
    os << (first ? " " : ", ") << "builtin <";
    first = false;
  }
  for (auto k : s.language.numerals()) {
    os << (first ? " " : ", ") << "builtin " << k;
    first = false;
  }
  os << " }\n  exists";
  for (const auto& v : s.vars) os << ' ' << v;
  os << " .";
  auto conj_text = [&](const std::vector<Literal>& conj) {
    std::string t;
    if (conj.size() > 1) t += '(';
    for (std::size_t j = 0; j < conj.size(); ++j) {
      if (j) t += " & ";
      t += render_literal(conj[j], s);
    }
    if (conj.size() > 1) t += ')';
    return t;
  };
  if (s.matrix.size() == 1) {
    os << ' ' << conj_text(s.matrix[0]) << '\n';
  } else {
    os << '\n';
    for (std::size_t i = 0; i < s.matrix.size(); ++i)
      os << (i ? "    | " : "      ") << conj_text(s.matrix[i]) << '\n';
  }
  os << "}\n";
  return os.str();
}

std::string render_term(const Term& t, const Language& lang) {
  switch (t.kind) {
    case Term::Kind::Variable:
      return t.name;
    case Term::Kind::Parameter:
      return "#" + std::to_string(t.value);
    case Term::Kind::Numeral:
      return std::to_string(t.value) + "()";
    case Term::Kind::Apply: {
      std::string r = lang[t.symbol].name + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) r += (i ? "," : "") + render_term(t.args[i], lang);
      return r + ")";
    }
  }
  return {};
}

namespace {

int precedence(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Or:
      return 1;
    case Formula::Kind::And:
      return 2;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return 0;
    default:
      return 3;
  }
}

std::string render_rec(const Formula& f, const Language& lang, int ctx) {
  std::string r;
  switch (f.kind) {
    case Formula::Kind::True:
      r = "true";
      break;
    case Formula::Kind::False:
      r = "false";
      break;
    case Formula::Kind::Relation: {
      r = lang[f.symbol].name + "(";
      for (std::size_t i = 0; i < f.terms.size(); ++i) r += (i ? "," : "") + render_term(f.terms[i], lang);
      r += ")";
      break;
    }
    case Formula::Kind::Equal:
      r = render_term(f.terms[0], lang) + "=" + render_term(f.terms[1], lang);
      break;
    case Formula::Kind::Less:
      r = render_term(f.terms[0], lang) + "<" + render_term(f.terms[1], lang);
      break;
    case Formula::Kind::Not:
      if (f.children[0].kind == Formula::Kind::Equal) {
        const auto& e = f.children[0];
        r = render_term(e.terms[0], lang) + "!=" + render_term(e.terms[1], lang);
      } else {
        r = "!" + render_rec(f.children[0], lang, 3);
      }
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const char* op = f.kind == Formula::Kind::And ? " & " : " | ";
      int p = precedence(f);
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) r += op;
        r += render_rec(f.children[i], lang, p + 1);
      }
      break;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      r = std::string(f.kind == Formula::Kind::Forall ? "forall " : "exists ") + f.var + " . " +
          render_rec(f.children[0], lang, 0);
      break;
  }
  if (precedence(f) < ctx) return "(" + r + ")";
  return r;
}

}  // namespace

std::string render_formula(const Formula& f, const Language& lang) { return render_rec(f, lang, 0); }

// ---------------------------------------------------------------------------
// JSON

namespace {

const char* kind_name(Literal::Kind k) {
  switch (k) {
    case Literal::Kind::Rel:
      return "rel";
    case Literal::Kind::Fun:
      return "fun";
    case Literal::Kind::Eq:
      return "eq";
    case Literal::Kind::Less:
      return "less";
    case Literal::Kind::Numeral:
      return "numeral";
  }
  return "";
}

}  // namespace

std::string to_json(const BasicSentence& s, int indent) {
  ojson j;
  j["name"] = s.name;
  ojson lang;
  lang["symbols"] = ojson::array();
  for (const auto& sym : s.language.symbols()) {
    ojson o;
    o["name"] = sym.name;
    o["kind"] = sym.is_function() ? "fun" : "rel";
    o["arity"] = sym.arity;
    lang["symbols"].push_back(o);
  }
  lang["builtin_order"] = s.language.builtin_order();
  lang["numerals"] = s.language.numerals();
  j["language"] = lang;
  j["vars"] = s.vars;
  j["matrix"] = ojson::array();
  for (const auto& conj : s.matrix) {
    ojson c = ojson::array();
    for (const auto& l : conj) {
      ojson o;
      o["kind"] = kind_name(l.kind);
      o["positive"] = l.positive;
      if (l.kind == Literal::Kind::Rel || l.kind == Literal::Kind::Fun) o["symbol"] = s.language[l.symbol].name;
      if (l.kind == Literal::Kind::Numeral) o["numeral"] = l.numeral;
      ojson args = ojson::array();
      for (auto a : l.args) args.push_back(s.vars[a]);
      o["args"] = args;
      if (l.kind == Literal::Kind::Fun || l.kind == Literal::Kind::Numeral) o["out"] = s.vars[l.out];
      c.push_back(o);
    }
    j["matrix"].push_back(c);
  }
  return j.dump(indent);
}

BasicSentence basic_sentence_from_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception& e) {
    throw SyntaxError(std::string("invalid JSON: ") + e.what(), 1, 1);
  }
  try {
    BasicSentence s;
    s.name = j.value("name", "");
    std::vector<Symbol> syms;
    for (const auto& o : j.at("language").at("symbols")) {
      Symbol sym;
      sym.name = o.at("name").get<std::string>();
      sym.kind = o.at("kind").get<std::string>() == "fun" ? SymbolKind::Function : SymbolKind::Relation;
      sym.arity = o.at("arity").get<unsigned>();
      syms.push_back(sym);
    }
    s.language = Language(std::move(syms), j.at("language").value("builtin_order", false),
                          j.at("language").value("numerals", std::vector<unsigned>{}));
    s.vars = j.at("vars").get<std::vector<std::string>>();
    auto var_index = [&](const std::string& v) -> unsigned {
      auto it = std::find(s.vars.begin(), s.vars.end(), v);
      if (it == s.vars.end()) throw ContractError("unknown variable '" + v + "'");
      return static_cast<unsigned>(it - s.vars.begin());
    };
    for (const auto& c : j.at("matrix")) {
      std::vector<Literal> conj;
      for (const auto& o : c) {
        Literal l;
        auto k = o.at("kind").get<std::string>();
        if (k == "rel") l.kind = Literal::Kind::Rel;
        else if (k == "fun") l.kind = Literal::Kind::Fun;
        else if (k == "eq") l.kind = Literal::Kind::Eq;
        else if (k == "less") l.kind = Literal::Kind::Less;
        else if (k == "numeral") l.kind = Literal::Kind::Numeral;
        else throw ContractError("unknown literal kind '" + k + "'");
        l.positive = o.value("positive", true);
        if (o.contains("symbol")) l.symbol = s.language.index_of(o.at("symbol").get<std::string>());
        l.numeral = o.value("numeral", 0u);
        for (const auto& a : o.at("args")) l.args.push_back(var_index(a.get<std::string>()));
        if (o.contains("out")) l.out = var_index(o.at("out").get<std::string>());
        conj.push_back(std::move(l));
      }
      s.matrix.push_back(std::move(conj));
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SyntaxError(std::string("malformed sentence JSON: ") + e.what(), 1, 1);
  }
}

}  // namespace finprin
