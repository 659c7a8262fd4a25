#pragma once

// Extension procedures for partial oracles whose coded structure embeds
// into an infinite model: define one cell, complete a small tree family,
// and force a tree family's structure to verify a principle.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "finprin/catalog.hpp"
#include "finprin/dtrees.hpp"
#include "finprin/encoding.hpp"

namespace finprin {

/// The model, the universe size and the current embedding e : [n] -> model.
/// e is total and injective; points outside the active set are free.
struct DensityContext {
  ComputableModel model;
  unsigned n = 0;
  unsigned r_L = 1;
  std::vector<Point> e;
};

/// e = the model's canonical slice of size n.
DensityContext make_context(const ComputableModel& model, unsigned n);

/// Every defined cell of B(p) agrees with the model under ctx.e.
bool embeds(const DensityContext& ctx, const PartialOracle& p);

/// Re-checks embeddability independently: the fragment of B(p) on its
/// active points must embed (via find_embedding) into the model's induced
/// substructure on their e-images.
bool embeds_by_search(const DensityContext& ctx, const PartialOracle& p);

/// Structure on [n] that e makes isomorphic to the induced substructure of
/// the model on e([n]).
PartialStructure pullback(const ComputableModel& model, const std::vector<Point>& e);

/// Defines S(args) as the model dictates; may move one inactive point of e
/// onto the needed value. Pre: n > |p| * r_L. Unchanged if already defined.
PartialOracle extend_define(DensityContext& ctx, const PartialOracle& p, std::size_t sym,
                            const std::vector<unsigned>& args);

/// Extends p until every run of the family is complete.
/// Pre: n > r_L * (|p| + b0 * |L~| * m^(r_L~ - 1)).
PartialOracle complete_trees_small(DensityContext& ctx, const PartialOracle& p, const TreeFamily& f);

/// One JSON object per line and iteration.
using TraceSink = std::function<void(const std::string& json_line)>;

struct CoreResult {
  PartialOracle q;
  std::size_t iterations = 0;
  /// Size of q before pruning to the witness.
  std::size_t unpruned_norm = 0;
};

/// Extends p so that build_C(f, q) verifies phi_t, with |q| <= |p| + b0*|phi_t|.
/// Hypotheses: (i) the model declares g; (ii) n >= (2*b0^2*r_L + 1)*g(n) + r_L*|p|;
/// (iii) s_L~(m) >= 2*b0*d_t where d_t is the determinacy of phi_t at m.
CoreResult core_extend(DensityContext& ctx, const PartialOracle& p, const TreeFamily& f, const BasicSentence& phi_t,
                       std::uint64_t d_t, const TraceSink& trace = {});

/// Restricts q to p plus the whole blocks queried by the runs computing the
/// cells of one witness of phi_t in build_C(f, q).
PartialOracle prune_to_witness(const PartialOracle& q, const PartialOracle& p, const TreeFamily& f,
                               const BasicSentence& phi_t);

}  // namespace finprin
