#pragma once

// Determinacy d(n): least m such that every partial structure on [n] of
// size >= m verifies the sentence.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finprin/partial.hpp"
#include "finprin/syntax.hpp"

namespace finprin {

enum class SearchMode { Exhaustive, BranchAndBound };
std::string to_string(SearchMode m);

/// 10^8, or FINPRIN_NODE_CAP when set to a positive integer.
std::uint64_t default_node_cap();

struct SearchOptions {
  SearchMode mode = SearchMode::BranchAndBound;
  std::uint64_t node_cap = default_node_cap();
};

struct MaxNonverifying {
  std::size_t size = 0;
  PartialStructure witness;  // first maximum found in canonical search order
  std::uint64_t nodes = 0;
};

/// Largest partial structure on [n] not verifying `s`; nullopt when even the
/// empty structure verifies. Throws CapExceeded past the node cap.
std::optional<MaxNonverifying> max_nonverifying(const BasicSentence& s, unsigned n, const SearchOptions& opt = {});

struct DeterminacyResult {
  unsigned n = 0;
  std::uint64_t d = 0;
  std::uint64_t s_L = 0;
  std::optional<PartialStructure> witness;
  /// Set when the empty structure already verifies (d reported as 0).
  bool degenerate = false;
  std::uint64_t nodes = 0;
  SearchMode mode = SearchMode::BranchAndBound;
};

DeterminacyResult determinacy(const BasicSentence& s, unsigned n, const SearchOptions& opt = {});

struct WeaknessRow {
  unsigned n = 0;
  std::uint64_t d = 0;
  std::uint64_t s_L = 0;
  double ratio = 0;  // s_L / d, 0 when d = 0
};

struct WeaknessReport {
  std::vector<WeaknessRow> rows;
  /// Least-squares slope of log(ratio) against log(n); needs two rows.
  std::optional<double> exponent;
};

/// Descriptive only: asymptotic weakness is not decided here.
WeaknessReport weakness_report(const BasicSentence& s, const std::vector<unsigned>& ns, const SearchOptions& opt = {});

}  // namespace finprin
