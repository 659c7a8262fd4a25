#pragma once

// Quantifier-free interpretations between principles and the many-one
// reductions they induce: apply, validity checks, witness pullback and the
// decision-tree realization over binary oracles.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "finprin/dtrees.hpp"
#include "finprin/partial.hpp"

namespace finprin {

/// Definition of one target symbol by a quantifier-free source formula.
/// Relations: free variables `args`. Functions: `args` plus `out`, with
/// Herbrand terms over `args` of which one always satisfies the formula.
struct SymbolDefinition {
  std::vector<std::string> args;
  std::string out;  // functions only
  Formula delta;
  std::vector<Term> herbrand;
};

/// Interprets the target principle's language in the source principle's:
/// a falsifying source structure B gives a falsifying target structure I(B).
struct Interpretation {
  std::string name;
  BasicSentence source;  // the principle reduced (phi~)
  BasicSentence target;  // the principle reduced to (phi)
  std::vector<SymbolDefinition> defs;  // one per target symbol

  /// Throws ContractError on missing definitions, quantifiers, free
  /// variables outside the declared ones, or misplaced Herbrand terms.
  void validate() const;
};

/// DSL:
///   interpretation NAME from SRC to DST {
///     R(x0,x1) := FORMULA ;
///     f(x0) = y := FORMULA via TERM, TERM ;
///   }
/// SRC and DST name catalog principles; formulas and terms are over SRC's
/// language.
Interpretation parse_interpretation(std::string_view text);
std::string render_interpretation(const Interpretation& I);

std::vector<std::string> builtin_interpretation_names();
/// HAP-HDP, HDP-HOP, IND-HOP, IND-PHP. ContractError for other names.
const Interpretation& builtin_interpretation(const std::string& name);

struct ValidityReport {
  bool ok = true;
  unsigned n = 0;
  bool exhaustive = false;
  /// Exhaustive: leaves of the lazy search, each standing for every total
  /// structure agreeing with it. Sampled: structures drawn.
  std::uint64_t cases = 0;
  std::string problem;  // first violation, empty when ok
};

/// Every function definition is functional and total on every total source
/// structure on [n], and some Herbrand term witnesses it. The search
/// branches only on cells the evaluation reads, per (symbol, tuple).
ValidityReport check_validity_exhaustive(const Interpretation& I, unsigned n);
ValidityReport check_validity_sampled(const Interpretation& I, unsigned n, std::size_t samples, std::uint64_t seed);

/// I(B) on the same universe. ContractError naming the tuple when a
/// function definition is not functional on B. Pre: B total.
PartialStructure apply_interpretation(const Interpretation& I, const PartialStructure& b);

/// Contrapositive check of the transport clause on one finite B: the
/// violation is I(B) verifying the target while B does not verify the source.
struct TransportReport {
  Truth source_value = Truth::Half;  // eval3(B, source)
  Truth target_value = Truth::Half;  // eval3(I(B), target)
  bool violation = false;
};
TransportReport falsification_transport(const Interpretation& I, const PartialStructure& b);

/// Given a witness for the target on I(B), returns a witness for the source
/// on B searched over the closure of the witness elements under source terms
/// of depth <= 2. ContractError when the supplied witness does not verify;
/// Error when the search finds nothing.
Witness pullback_solution(const Interpretation& I, const PartialStructure& b, const Witness& w);
/// The candidate elements pullback_solution searches over, sorted.
std::vector<unsigned> term_closure(const PartialStructure& b, std::vector<unsigned> seeds, unsigned depth);

/// Trees over binary oracles of the source language on [n] computing I(B)
/// for B = decode_binary(alpha): build_C over a full oracle equals
/// apply_interpretation on the decoded structure.
TreeFamily trees_from_interpretation(const Interpretation& I, unsigned n);

/// Uniform total structure on [n].
PartialStructure random_structure(const Language& lang, unsigned n, std::mt19937_64& rng);

}  // namespace finprin
