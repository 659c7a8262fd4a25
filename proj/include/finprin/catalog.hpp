#pragma once

// Built-in principles and the infinite models falsifying the strong ones.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "finprin/partial.hpp"
#include "finprin/syntax.hpp"

namespace finprin {

using Point = std::uint64_t;
/// Reserved point standing for an element above all naturals.
inline constexpr Point kInfinity = std::numeric_limits<Point>::max();

/// A total infinite structure presented by evaluator callbacks over points.
struct ComputableModel {
  std::string name;
  Language language;
  std::function<Point(std::size_t sym, std::span<const Point> args)> fun;
  std::function<bool(std::size_t sym, std::span<const Point> args)> rel;
  /// Designated large induced substructure with n points, increasing.
  std::function<std::vector<Point>(unsigned n)> canonical_slice;
  /// Claimed overflow bound.
  std::function<unsigned(unsigned n)> g;
  /// Images, in input order, of an order-respecting map sending any finite
  /// point set A0 onto a host set whose induced structure embeds the one on
  /// A0 and has overflow at most g(|A0|).
  std::function<std::vector<Point>(const std::vector<Point>& a0)> large_host;
  /// Points drawn when sampling random fragments (a finite window plus
  /// special points).
  std::function<std::vector<Point>(unsigned n)> sample_pool;
  std::string description;
};

/// Induced substructure on the listed points, renumbered 0..k-1 in order.
PartialStructure induced_substructure(const ComputableModel& m, const std::vector<Point>& points);

/// Function values on tuples over B0 that land outside B0, increasing.
std::vector<Point> overflow_set(const ComputableModel& m, const std::vector<Point>& b0);

struct LargenessReport {
  unsigned n = 0;
  std::size_t overflow = 0;   // |V| of the canonical slice
  unsigned bound = 0;         // g(n)
  std::size_t samples = 0;    // random fragments checked
  std::size_t embedded = 0;   // of which embedded into their host
  std::size_t max_host_overflow = 0;
  bool ok() const { return overflow <= bound && embedded == samples && max_host_overflow <= bound; }
};

/// Overflow of the canonical slice, plus `samples` random n-point fragments
/// each checked to embed into its host with overflow at most g(n).
LargenessReport check_largeness(const ComputableModel& m, unsigned n, std::size_t samples, std::mt19937_64& rng);

struct PrincipleEntry {
  std::string name;
  std::string title;
  BasicSentence sentence;
  std::optional<ComputableModel> model;
  std::optional<bool> weak;
  std::optional<bool> strong;
  bool valid_in_finite = true;  // on every [n] with n >= 2; `validity` gives the exact range
  std::string validity;         // e.g. "odd n only"
  /// Known determinacy, if a closed form is recorded.
  std::function<std::optional<std::uint64_t>(unsigned n)> determinacy;
  std::string determinacy_text;
  std::string notes;
};

/// Names in catalog order.
std::vector<std::string> builtin_names();
/// Throws ContractError for an unknown name.
const PrincipleEntry& builtin(const std::string& name);

/// Text shown by `principle show`.
std::string describe(const PrincipleEntry& e);

}  // namespace finprin
