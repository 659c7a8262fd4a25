#pragma once

// Stateful oracle server answering adaptive queries while keeping the coded
// structure non-verifying and embeddable into an infinite model.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "finprin/catalog.hpp"
#include "finprin/density.hpp"

namespace finprin {

/// A claimed solution: disjunct index and one value per sentence variable.
struct SolverClaim {
  std::size_t disjunct = 0;
  std::vector<unsigned> values;
};

struct Refutation {
  std::size_t literal = 0;  // index within the claimed disjunct
  std::string text;         // the literal with the claimed values substituted
};

struct FamilyReceipt {
  enum class Branch { Core, Small };
  Branch branch = Branch::Core;
  std::size_t norm_before = 0;
  std::size_t norm_after = 0;
  std::size_t iterations = 0;
};
std::string to_string(FamilyReceipt::Branch b);

class Session {
 public:
  /// budget defaults to floor(n / r_L) - 1. Needs a model and n >= r_L.
  Session(const BasicSentence& phi, const ComputableModel& model, unsigned n,
          std::optional<std::size_t> budget = std::nullopt);
  /// Uses the catalog entry's model; ContractError when it has none.
  Session(const PrincipleEntry& entry, unsigned n, std::optional<std::size_t> budget = std::nullopt);

  const BasicSentence& principle() const { return phi_; }
  const PartialOracle& oracle() const { return p_; }
  const DensityContext& context() const { return ctx_; }
  unsigned n() const { return ctx_.n; }
  std::size_t budget() const { return budget_; }
  std::size_t used() const { return used_; }
  std::size_t norm() const { return norm_; }

  /// Irrelevant keys read 0 and known keys repeat their bit, both free.
  /// A new cell costs one unit; BudgetExhausted when none is left or the
  /// definition precondition n > |p| * r_L would fail.
  bool answer(const RelevantKey& k);

  /// Case split on s_L~(m) >= 2*b0*d~(m): core extension, else completing
  /// all runs. d_t defaults to the computed determinacy of phi_t at m.
  FamilyReceipt register_family(const TreeFamily& f, const BasicSentence& phi_t,
                                std::optional<std::uint64_t> d_t = std::nullopt);
  const std::vector<std::pair<TreeFamily, BasicSentence>>& families() const { return families_; }

  /// Defines every cell the claimed disjunct reads and returns a literal
  /// that is false. Pre: n > (|p| + |J| - 1) * r_L.
  Refutation refute(const SolverClaim& c);

  /// B(p) embeds into the model (cell check and fragment search) and does
  /// not verify the principle.
  bool invariants_hold() const;

 private:
  BasicSentence phi_;
  DensityContext ctx_;
  PartialOracle p_;
  std::size_t budget_ = 0;
  std::size_t used_ = 0;
  std::size_t norm_ = 0;
  std::vector<std::pair<TreeFamily, BasicSentence>> families_;
};

/// One move of a solver: query a key or claim a solution.
struct SolverMove {
  bool is_claim = false;
  RelevantKey key;
  SolverClaim claim;
};

/// Receives the answer to its previous query (nullopt on the first call or
/// after BUDGET) and returns its next move.
using Solver = std::function<SolverMove(std::optional<bool> last)>;

/// Bundled fixtures; each reads at most `max_cells` distinct cells, then
/// claims its best candidate.
/// greedy: queries the undefined cells of its current best candidate.
Solver greedy_solver(const BasicSentence& phi, unsigned n, std::size_t max_cells, std::uint64_t seed);
/// random: reads uniformly random cells in full.
Solver random_solver(const BasicSentence& phi, unsigned n, std::size_t max_cells, std::uint64_t seed);
/// bit-probe-then-guess: reads one bit of random cells, then guesses.
Solver bit_probe_solver(const BasicSentence& phi, unsigned n, std::size_t max_cells, std::uint64_t seed);

struct PlayResult {
  enum class Outcome { Refuted, Budget } outcome = Outcome::Refuted;
  std::size_t queries = 0;  // keys asked, including free ones
  std::optional<Refutation> refutation;
};

/// Runs a solver against the session until it claims. A BUDGET reply is
/// passed on as nullopt; the solver must then claim.
PlayResult play(Session& s, const Solver& solver);

/// Line protocol: "Q <key>" -> "A <bit>" | "BUDGET"; "CLAIM i a0 a1 ..." ->
/// "REFUTED j" (ends the session); bad input -> "ERROR <message>".
/// Returns 0 after a refutation, 1 on end of input.
int serve(Session& s, std::istream& in, std::ostream& out);

}  // namespace finprin
