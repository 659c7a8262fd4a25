#pragma once

// Partial structures over [n], Kleene evaluation, witness matching,
// substructures and embeddings.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finprin/syntax.hpp"

namespace finprin {

inline constexpr int kUndef = -1;

/// Dense partial L-structure on [n]. Every symbol owns a block of cells,
/// one per argument tuple in row-major order; an entry is kUndef or a value
/// (an element of [n] for functions, 0/1 for relations).
class PartialStructure {
 public:
  PartialStructure() = default;
  /// n = 0 is allowed (the empty induced substructure).
  PartialStructure(Language lang, unsigned n);

  const Language& language() const { return lang_; }
  unsigned n() const { return n_; }

  std::size_t cell_count() const { return cells_.size(); }
  std::size_t offset(std::size_t sym) const { return offsets_[sym]; }
  std::size_t block_size(std::size_t sym) const { return offsets_[sym + 1] - offsets_[sym]; }

  std::size_t tuple_index(std::span<const unsigned> args) const;
  std::vector<unsigned> tuple_of(std::size_t sym, std::size_t index) const;
  std::size_t cell(std::size_t sym, std::span<const unsigned> args) const {
    return offsets_[sym] + tuple_index(args);
  }
  /// Symbol owning a global cell.
  std::size_t symbol_of(std::size_t cell) const;

  int get(std::size_t cell) const { return cells_[cell]; }
  int get(std::size_t sym, std::span<const unsigned> args) const { return cells_[cell(sym, args)]; }
  /// Throws ContractError on an out-of-range value.
  void set(std::size_t cell, int value);
  void set(std::size_t sym, std::span<const unsigned> args, int value) { set(cell(sym, args), value); }
  void set_unchecked(std::size_t cell, int value) { cells_[cell] = value; }

  /// Number of defined cells.
  std::size_t size() const;
  bool is_total() const;
  const std::vector<int>& cells() const { return cells_; }

  /// Every defined cell of `smaller` has the same value here.
  bool extends(const PartialStructure& smaller) const;

  bool operator==(const PartialStructure& o) const {
    return n_ == o.n_ && lang_ == o.lang_ && cells_ == o.cells_;
  }

 private:
  Language lang_;
  unsigned n_ = 0;
  std::vector<std::size_t> offsets_;  // per symbol, plus end sentinel
  std::vector<int> cells_;
};

/// s_L(n) = cell count of a structure on [n].
inline std::uint64_t structure_size(const PartialStructure& a) { return a.size(); }

// ---------------------------------------------------------------------------
// Three-valued evaluation

enum class Truth : std::uint8_t { False = 0, Half = 1, True = 2 };

inline Truth t_not(Truth t) { return static_cast<Truth>(2 - static_cast<int>(t)); }
inline Truth t_and(Truth a, Truth b) { return a < b ? a : b; }
inline Truth t_or(Truth a, Truth b) { return a < b ? b : a; }
std::string to_string(Truth t);

/// Closed formula (parameters allowed) over the structure's language.
/// Free variables raise ContractError.
Truth eval3(const PartialStructure& a, const Formula& f);
/// Value of the formula under an assignment of its free variables.
Truth eval3(const PartialStructure& a, const Formula& f, const std::vector<std::pair<std::string, unsigned>>& env);
Truth eval3(const PartialStructure& a, const BasicSentence& s);
/// Value of one literal under an assignment of the sentence variables.
Truth literal_value(const PartialStructure& a, const Literal& l, std::span<const unsigned> values);

bool verifies(const PartialStructure& a, const BasicSentence& s);
bool falsifies(const PartialStructure& a, const BasicSentence& s);
bool verifies(const PartialStructure& a, const Formula& f);
bool falsifies(const PartialStructure& a, const Formula& f);

struct Witness {
  std::size_t disjunct = 0;
  std::vector<unsigned> values;  // one per sentence variable
};

/// Finds tuples making a whole disjunct true. Plans are precompiled per
/// disjunct and per seed literal, so repeated checks against changing
/// structures are cheap.
class Matcher {
 public:
  explicit Matcher(const BasicSentence& s);

  const BasicSentence& sentence() const { return s_; }

  /// Any witness; with `domain`, enumerated variables range over it only
  /// (values forced through function tables may lie outside).
  std::optional<Witness> find(const PartialStructure& a, const std::vector<unsigned>* domain = nullptr) const;
  bool verifies(const PartialStructure& a) const { return find(a).has_value(); }

  /// Witness that reads the given cell. If `a` did not verify before that
  /// cell was defined, this decides whether it verifies now.
  std::optional<Witness> find_touching(const PartialStructure& a, std::size_t cell) const;

  /// Witnesses of one disjunct only.
  std::optional<Witness> find_in(const PartialStructure& a, std::size_t disjunct) const;

 private:
  struct Op {
    enum class Kind { Enum, Derive, Check } kind;
    unsigned var = 0;      // Enum/Derive target
    std::size_t lit = 0;   // Derive source / Check literal
  };
  struct Plan {
    std::size_t disjunct = 0;
    std::size_t seed_lit = SIZE_MAX;
    std::vector<Op> ops;
  };

  Plan compile(std::size_t disjunct, std::size_t seed_lit) const;
  bool run(const PartialStructure& a, const Plan& plan, std::size_t k, std::vector<unsigned>& val,
           const std::vector<unsigned>* domain) const;

  BasicSentence s_;
  std::vector<Plan> plans_;                           // unseeded, one per disjunct
  std::vector<std::vector<Plan>> seeded_;             // per symbol: plans seeded at a literal on it
};

// ---------------------------------------------------------------------------
// Substructures and embeddings

/// Induced substructure on the listed points, renumbered 0..k-1 in list order.
PartialStructure induced_substructure(const PartialStructure& a, const std::vector<unsigned>& points);

/// An embedding maps point i of `b` to map[i] in `a`.
using Embedding = std::vector<unsigned>;

/// Injective, and every defined cell of `b` is defined in `a` with the image
/// value. Built-in `<` must be preserved and numerals fixed.
bool is_embedding(const PartialStructure& b, const PartialStructure& a, const Embedding& map);

/// Complete backtracking search. `hint[i]` (if present and not kUndef) is
/// tried first for point i; it never removes candidates.
std::optional<Embedding> find_embedding(const PartialStructure& b, const PartialStructure& a,
                                        const std::vector<int>* hint = nullptr);

/// Points of [n] occurring in a defined cell (arguments or function value).
std::vector<unsigned> active_points(const PartialStructure& a);

// ---------------------------------------------------------------------------
// JSON: {"n": n, "fun": {name: [v|null, ...]}, "rel": {name: [0|1|null, ...]}}

std::string to_json(const PartialStructure& a, int indent = -1);
PartialStructure structure_from_json(std::string_view text, const Language& lang);

/// Compact text dump of defined cells, e.g. "f(0)=1 R(0,1)=0".
std::string render_structure(const PartialStructure& a);

}  // namespace finprin
