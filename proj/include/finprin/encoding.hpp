#pragma once

// Oracle codings of structures: binary (function values bit by bit), unary
// (function graphs) and partial oracles.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finprin/partial.hpp"
#include "finprin/syntax.hpp"

namespace finprin {

/// Length of the binary expansion of n: ceil(log2(n+1)).
unsigned len(unsigned n);

/// Rel(S, a) or FunBit(S, a, i). Components may be out of range, in which
/// case the key is irrelevant.
struct RelevantKey {
  enum class Kind { Rel, FunBit };
  Kind kind = Kind::Rel;
  std::size_t symbol = 0;
  std::vector<unsigned> tuple;
  unsigned bit = 0;

  auto operator<=>(const RelevantKey&) const = default;
  bool operator==(const RelevantKey&) const = default;
};

/// Rel(S, a) or FunGraph(S, a, b).
struct UnaryKey {
  enum class Kind { Rel, FunGraph };
  Kind kind = Kind::Rel;
  std::size_t symbol = 0;
  std::vector<unsigned> tuple;
  unsigned value = 0;

  auto operator<=>(const UnaryKey&) const = default;
  bool operator==(const UnaryKey&) const = default;
};

/// Canonical numbering of the relevant and unary keys for (L, n):
/// symbol, then tuple (row-major), then bit or value.
class KeySpace {
 public:
  KeySpace() = default;
  KeySpace(Language lang, unsigned n);

  const Language& language() const { return lang_; }
  unsigned n() const { return n_; }
  unsigned bits() const { return len_; }

  std::size_t size() const { return rel_off_.back(); }
  std::size_t unary_size() const { return un_off_.back(); }

  bool is_relevant(const RelevantKey& k) const;
  std::size_t index(const RelevantKey& k) const;  // ContractError if irrelevant
  RelevantKey key(std::size_t index) const;

  /// First index of the block coding cell (sym, tuple index).
  std::size_t block(std::size_t sym, std::size_t tuple_index) const;
  std::size_t block_width(std::size_t sym) const;
  /// Symbol and tuple index of the cell owning key `index`.
  std::pair<std::size_t, std::size_t> cell_of(std::size_t index) const;

  bool is_valid(const UnaryKey& k) const;
  std::size_t unary_index(const UnaryKey& k) const;
  UnaryKey unary_key(std::size_t index) const;

  std::string render(const RelevantKey& k) const;
  std::string render(const UnaryKey& k) const;
  /// Parses "R(0,1)", "f(0,1)[2]", "c()[0]". Out-of-range numbers give an
  /// irrelevant key; unknown symbols or bad shapes throw SyntaxError.
  RelevantKey parse_key(const std::string& text) const;
  UnaryKey parse_unary(const std::string& text) const;

  bool operator==(const KeySpace& o) const { return n_ == o.n_ && lang_ == o.lang_; }

 private:
  Language lang_;
  unsigned n_ = 0;
  unsigned len_ = 0;
  std::vector<std::uint64_t> cells_;   // n^arity per symbol
  std::vector<std::size_t> rel_off_;   // per symbol, plus end
  std::vector<std::size_t> un_off_;
};

/// All relevant keys, canonical order.
std::vector<RelevantKey> relevant_elements(const Language& lang, unsigned n);

/// Total set alpha restricted to the relevant keys.
struct FullOracle {
  KeySpace space;
  std::vector<std::uint8_t> bits;  // by canonical index

  FullOracle() = default;
  FullOracle(const Language& lang, unsigned n) : space(lang, n), bits(space.size(), 0) {}
  bool get(const RelevantKey& k) const { return space.is_relevant(k) && bits[space.index(k)]; }
};

struct UnaryCode {
  KeySpace space;
  std::vector<std::uint8_t> bits;  // by unary index

  UnaryCode() = default;
  UnaryCode(const Language& lang, unsigned n) : space(lang, n), bits(space.unary_size(), 0) {}
  std::vector<UnaryKey> keys() const;
};

/// Disjoint p0 / p1 stored densely: -1 unknown, 0 in p0, 1 in p1.
struct PartialOracle {
  KeySpace space;
  std::vector<std::int8_t> state;

  PartialOracle() = default;
  PartialOracle(const Language& lang, unsigned n) : space(lang, n), state(space.size(), -1) {}

  bool known(std::size_t i) const { return state[i] >= 0; }
  /// Size of the coded structure: defined relation keys plus complete
  /// function blocks.
  std::size_t norm() const;
  /// Whole-block rule: for every function cell either all or no bits known.
  bool well_formed() const;
  std::vector<RelevantKey> p0() const;
  std::vector<RelevantKey> p1() const;
  bool operator==(const PartialOracle& o) const { return space == o.space && state == o.state; }
};

/// Total structure coded by alpha; function values min(a, n-1).
PartialStructure decode_binary(const FullOracle& alpha);
FullOracle encode_binary(const PartialStructure& total);

UnaryCode encode_unary(const PartialStructure& total);
struct UnaryDecode {
  std::optional<PartialStructure> structure;
  std::string problem;  // offending symbol/tuple when undefined
};
UnaryDecode decode_unary(const UnaryCode& code);

UnaryCode unary_from_binary(const FullOracle& alpha);
/// nullopt when the unary code is not a structure.
std::optional<FullOracle> binary_from_unary(const UnaryCode& code);

/// Throws ContractError when a function value's bits would not decode back
/// to it (never for values in [n]).
PartialOracle oracle_of_partial(const PartialStructure& a);
PartialStructure partial_of_oracle(const PartialOracle& p);

/// q extends p: p0 within q0 and p1 within q1.
bool extends(const PartialOracle& q, const PartialOracle& p);
/// q extends p with norm(q) <= norm(p) + b.
bool is_b_extension(const PartialOracle& q, const PartialOracle& p, std::size_t b);

/// Completion of p: unknown bits set to `fill`.
FullOracle complete(const PartialOracle& p, bool fill = false);
/// alpha agrees with p on every known key.
bool consistent(const FullOracle& alpha, const PartialOracle& p);

/// One key per line, canonical order, "+" for p1 and "-" for p0.
std::string dump(const PartialOracle& p);
PartialOracle parse_dump(const std::string& text, const Language& lang, unsigned n);

}  // namespace finprin
