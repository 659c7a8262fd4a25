#pragma once

// Propositional translations of principles on [n] under the unary and the
// binary oracle coding, constant elimination, metrics and CNF export.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finprin/encoding.hpp"
#include "finprin/partial.hpp"

namespace finprin {

/// NNF formula: negation only on variables. Variable ids are 1-based.
struct PropFormula {
  enum class Kind { False, True, Var, NegVar, And, Or };
  Kind kind = Kind::True;
  unsigned var = 0;
  std::vector<PropFormula> children;

  static PropFormula constant(bool v) { return {v ? Kind::True : Kind::False, 0, {}}; }
  static PropFormula lit(unsigned v, bool positive = true) { return {positive ? Kind::Var : Kind::NegVar, v, {}}; }
  static PropFormula conj(std::vector<PropFormula> c) { return {Kind::And, 0, std::move(c)}; }
  static PropFormula disj(std::vector<PropFormula> c) { return {Kind::Or, 0, std::move(c)}; }

  bool is_const() const { return kind == Kind::False || kind == Kind::True; }
  bool is_literal() const { return kind == Kind::Var || kind == Kind::NegVar; }
  bool operator==(const PropFormula&) const = default;
};

enum class Coding { Unary, Binary };

/// A translated formula plus the key space naming its variables: variable
/// id i is unary key i-1 or relevant key i-1 in canonical order.
struct Translation {
  Coding coding = Coding::Binary;
  KeySpace space;
  PropFormula formula;

  unsigned num_vars() const;
  std::string var_name(unsigned id) const;
};

/// "A is defined -> some tuple satisfies a disjunct" over unary keys;
/// closed equality and order atoms stay as constants.
Translation unary_translation(const BasicSentence& s, unsigned n);
/// "some tuple satisfies a disjunct in B(L,n,alpha)" over relevant keys;
/// f(u)=v expands to the bit-matching branch or the clamp-to-(n-1) branch.
Translation binary_translation(const BasicSentence& s, unsigned n);

/// Fixpoint of 0|F -> F, 1&F -> F, 0&F -> 0, 1|F -> 1; also flattens
/// nested same-connective nodes and unwraps single-child nodes.
PropFormula simplify_constants(const PropFormula& f);
/// Equivalent disjunction of conjunctions of literals by distribution;
/// contradictory terms are dropped. CapExceeded past term_cap terms.
PropFormula to_dnf(const PropFormula& f, std::size_t term_cap = 1'000'000);
/// Swap And/Or, 0/1, X/!X.
PropFormula negate(const PropFormula& f);
/// Simultaneous replacement of variables; negated occurrences get negate(sigma(x)).
PropFormula substitute(const PropFormula& f, const std::map<unsigned, PropFormula>& sigma);

struct Metrics {
  std::size_t depth = 0;  // literals and constants 0; adjacent same-connective layers merge
  std::size_t size = 0;   // node count
};
Metrics metrics(const PropFormula& f);

/// assignment[id] for id in 1..num_vars (index 0 unused).
bool evaluate(const PropFormula& f, const std::vector<std::uint8_t>& assignment);
/// Partial assignment: -1 unassigned.
Truth evaluate3(const PropFormula& f, const std::vector<std::int8_t>& assignment);

std::vector<std::uint8_t> assignment_of(const FullOracle& alpha);
std::vector<std::uint8_t> assignment_of(const UnaryCode& code);

struct TautologyResult {
  bool tautology = true;
  std::optional<std::vector<std::uint8_t>> counterexample;
  std::uint64_t nodes = 0;
};
/// Exhaustive search over assignments, cutting a branch as soon as the
/// formula simplifies to a constant. CapExceeded past node_cap.
TautologyResult check_tautology(const PropFormula& f, unsigned num_vars, std::uint64_t node_cap = 100'000'000);

struct Cnf {
  unsigned num_vars = 0;       // including auxiliaries
  unsigned original_vars = 0;  // variables of the formula
  std::vector<std::vector<int>> clauses;
};
enum class CnfMode { Direct, Tseitin };

/// CNF of the negation of f. Direct needs f (after simplification) to be a
/// disjunction of conjunctions of literals; ContractError otherwise.
/// Tseitin numbers auxiliaries above num_vars. f = 1 gives one empty
/// clause, f = 0 no clauses.
Cnf negation_cnf(const PropFormula& f, unsigned num_vars, CnfMode mode);
std::string to_dimacs(const Cnf& cnf, const std::vector<std::string>& comments = {});

/// All 2^num_vars assignments, 64 at a time (num_vars <= 40).
bool satisfiable_exhaustive(const Cnf& cnf);
/// DPLL with unit propagation; returns a model when satisfiable.
std::optional<std::vector<std::uint8_t>> dpll(const Cnf& cnf);

/// Text form mirroring the tree: 0, 1, x3, !x3, and(...), or(...).
/// With a translation, variables print as their keys.
std::string render(const PropFormula& f, const Translation* names = nullptr);

}  // namespace finprin
