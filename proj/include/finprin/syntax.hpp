#pragma once

// Signatures, basic sentences, general first-order formulas and the
// principle DSL.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finprin/errors.hpp"

namespace finprin {

enum class SymbolKind { Relation, Function };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Relation;
  unsigned arity = 0;

  bool is_function() const { return kind == SymbolKind::Function; }
  bool operator==(const Symbol&) const = default;
};

/// A finite signature plus the built-ins a principle may use: the natural
/// order `<` on the universe and numeral constants.
class Language {
 public:
  Language() = default;
  explicit Language(std::vector<Symbol> symbols, bool builtin_order = false,
                    std::vector<unsigned> numerals = {});

  const std::vector<Symbol>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  const Symbol& operator[](std::size_t i) const { return symbols_[i]; }

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;  // throws ContractError

  bool builtin_order() const { return builtin_order_; }
  const std::vector<unsigned>& numerals() const { return numerals_; }
  bool has_numeral(unsigned k) const;

  /// 1 + maximal arity (1 for the empty language).
  unsigned r() const;
  unsigned max_arity() const;

  /// Same language with one more symbol appended.
  Language with_symbol(Symbol s) const;

  bool operator==(const Language&) const = default;

 private:
  std::vector<Symbol> symbols_;
  bool builtin_order_ = false;
  std::vector<unsigned> numerals_;
};

/// n^k for small values; saturates instead of wrapping.
std::uint64_t ipow(std::uint64_t base, unsigned exp);

/// s_L(n) = sum over symbols of n^arity (built-ins excluded).
std::uint64_t s_L(const Language& lang, unsigned n);

// ---------------------------------------------------------------------------
// Basic sentences

/// Flat literal over the existential variables (indices into exist_vars).
struct Literal {
  enum class Kind {
    Rel,      // R(u..) or !R(u..)
    Fun,      // f(u..) = v  (positive only)
    Eq,       // u = v or u != v
    Less,     // u < v, built-in order (positive only)
    Numeral,  // k() = v, built-in numeral (positive only)
  };
  Kind kind = Kind::Eq;
  bool positive = true;
  std::size_t symbol = 0;       // Rel, Fun
  unsigned numeral = 0;         // Numeral
  std::vector<unsigned> args;   // Rel/Fun arguments; Eq/Less: {u, v}
  unsigned out = 0;             // Fun/Numeral output variable

  bool operator==(const Literal&) const = default;
};

struct BasicSentence {
  std::string name;
  Language language;
  std::vector<std::string> vars;
  std::vector<std::vector<Literal>> matrix;  // disjunction of conjunctions

  /// Throws ContractError when the shape invariants fail.
  void validate() const;
  bool operator==(const BasicSentence& o) const {
    return language == o.language && vars == o.vars && matrix == o.matrix;
  }
};

// ---------------------------------------------------------------------------
// General first-order formulas (terms may nest)

struct Term {
  enum class Kind { Variable, Parameter, Apply, Numeral };
  Kind kind = Kind::Variable;
  std::string name;         // Variable
  std::size_t symbol = 0;   // Apply
  unsigned value = 0;       // Parameter element, Numeral value
  std::vector<Term> args;   // Apply

  static Term var(std::string n);
  static Term param(unsigned v);
  static Term apply(std::size_t sym, std::vector<Term> args = {});
  static Term numeral(unsigned k);

  bool is_flat_var() const { return kind == Kind::Variable; }
  bool operator==(const Term&) const = default;
};

struct Formula {
  enum class Kind { True, False, Relation, Equal, Less, Not, And, Or, Forall, Exists };
  Kind kind = Kind::True;
  std::size_t symbol = 0;         // Relation
  std::vector<Term> terms;        // Relation args; Equal/Less: {lhs, rhs}
  std::vector<Formula> children;  // Not (1), And/Or (any), quantifiers (1)
  std::string var;                // quantifiers

  static Formula truth(bool v);
  static Formula rel(std::size_t sym, std::vector<Term> args);
  static Formula eq(Term a, Term b);
  static Formula less(Term a, Term b);
  static Formula neg(Formula f);
  static Formula conj(std::vector<Formula> fs);
  static Formula disj(std::vector<Formula> fs);
  static Formula forall(std::string v, Formula body);
  static Formula exists(std::string v, Formula body);

  bool operator==(const Formula&) const = default;
};

/// Free variables, in order of first occurrence.
std::vector<std::string> free_variables(const Formula& f);
bool is_quantifier_free(const Formula& f);

/// Replace free occurrences of variable `v` by term `t`.
Formula substitute(const Formula& f, const std::string& v, const Term& t);
Term substitute(const Term& term, const std::string& v, const Term& t);

/// The basic sentence viewed as a first-order sentence.
Formula to_formula(const BasicSentence& s);

/// Number of nodes of the formula tree: atoms and the connectives
/// and quantifiers; an n-ary conjunction counts as n-1 binary ones.
std::size_t formula_size(const Formula& f);
std::size_t formula_size(const BasicSentence& s);

/// Shape predicate for the output of herbrandize.
bool is_basic_shape(const Formula& f);

/// Equivalid basic sentence over the language extended by fresh function
/// symbols. Already-basic input comes back unchanged.
BasicSentence herbrandize(const Formula& sentence, const Language& lang, std::string name = {});

// ---------------------------------------------------------------------------
// Text forms

/// Principle DSL, see README for the grammar.
BasicSentence parse_principle(std::string_view text);
std::string render_principle(const BasicSentence& s);

/// Parses a formula over `lang`. Bare identifiers are variables unless they
/// name a nullary function symbol and are not bound.
Formula parse_formula(std::string_view text, const Language& lang);
std::string render_formula(const Formula& f, const Language& lang);
std::string render_term(const Term& t, const Language& lang);

std::string render_literal(const Literal& l, const BasicSentence& s);

/// JSON with stable field order.
std::string to_json(const BasicSentence& s, int indent = 2);
BasicSentence basic_sentence_from_json(std::string_view text);

}  // namespace finprin
