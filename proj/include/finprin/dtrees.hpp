#pragma once

// Decision trees querying oracles, answer sequences and the partial
// structures C((t_S), m, p) computed by tree families.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finprin/encoding.hpp"
#include "finprin/partial.hpp"

namespace finprin {

/// A node label: query a key of the source oracle, or output a value.
struct Label {
  enum class Kind { Query, Output };
  Kind kind = Kind::Output;
  RelevantKey key;
  std::uint64_t value = 0;

  static Label query(RelevantKey k) { return {Kind::Query, std::move(k), 0}; }
  static Label output(std::uint64_t v) { return {Kind::Output, {}, v}; }
};

/// Explicit tree for tiny cases and serialization.
struct TreeNode {
  Label label;
  std::shared_ptr<const TreeNode> zero, one;  // Query only

  static std::shared_ptr<const TreeNode> out(std::uint64_t v);
  static std::shared_ptr<const TreeNode> ask(RelevantKey k, std::shared_ptr<const TreeNode> zero,
                                             std::shared_ptr<const TreeNode> one);
};
using TreePtr = std::shared_ptr<const TreeNode>;

/// Deterministic node function (input tuple, answers so far) -> label, with
/// a declared height. Invariants are checked while running.
class DecisionTree {
 public:
  using NodeFn = std::function<Label(std::span<const unsigned> input, const std::vector<bool>& answers)>;

  DecisionTree() = default;
  DecisionTree(unsigned arity, unsigned height, NodeFn fn)
      : arity_(arity), height_(height), fn_(std::move(fn)) {}

  static DecisionTree constant(unsigned arity, std::uint64_t value);
  /// Same explicit tree for every input.
  static DecisionTree explicit_tree(unsigned arity, TreePtr root);

  unsigned arity() const { return arity_; }
  unsigned height() const { return height_; }
  Label label(std::span<const unsigned> input, const std::vector<bool>& answers) const {
    return fn_(input, answers);
  }

 private:
  unsigned arity_ = 0;
  unsigned height_ = 0;
  NodeFn fn_;
};

/// Height of an explicit tree.
unsigned height(const TreePtr& t);
/// The explicit tree a node function describes on one input (2^h nodes).
TreePtr tabulate(const DecisionTree& t, std::span<const unsigned> input);

/// (query KEY (zero-branch) (one-branch)) / (out N).
std::string to_sexpr(const TreePtr& t, const KeySpace& keys);
TreePtr parse_sexpr(const std::string& text, const KeySpace& keys);

struct Run {
  enum class Status { Complete, Blocked };
  Status status = Status::Complete;
  std::vector<bool> answers;
  /// Keys queried along the path; when blocked, the last is the unanswered one.
  std::vector<RelevantKey> queries;
  std::optional<std::uint64_t> output;

  bool complete() const { return status == Status::Complete; }
};

/// Unique complete run against a total oracle.
Run run_full(const DecisionTree& t, std::span<const unsigned> input, const FullOracle& alpha);
/// Maximal run against a partial oracle: irrelevant queries read 0, a
/// relevant key outside p0 and p1 blocks.
Run run_partial(const DecisionTree& t, std::span<const unsigned> input, const PartialOracle& p);

/// Trees t_S for every symbol of the target language, inputs from [m],
/// querying oracles of the source language.
struct TreeFamily {
  Language source;
  Language target;
  unsigned m = 0;
  unsigned b0 = 0;
  std::vector<DecisionTree> trees;  // one per target symbol

  /// Throws ContractError on arity or height mismatches.
  void validate() const;
};

/// Cell defined iff the maximal p-answer run is complete; function outputs
/// clamped to m-1, relation outputs to 1.
PartialStructure build_C(const TreeFamily& f, const PartialOracle& p);
PartialStructure build_C(const TreeFamily& f, const FullOracle& alpha);

/// Trees reading function values bit by bit and relation keys directly;
/// over a total oracle build_C equals decode_binary (target = source, m = n).
TreeFamily bit_probe_family(const Language& lang, unsigned n);

/// Pseudo-random trees of height b0: every query and output is a hash of
/// (seed, symbol, input, answers). Queries are relevant keys of (source, n);
/// with `hot` nonempty, three queries in four are drawn from it instead.
TreeFamily random_family(const Language& source, unsigned n, const Language& target, unsigned m, unsigned b0,
                         std::uint64_t seed, const std::vector<RelevantKey>& hot = {});

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace finprin
