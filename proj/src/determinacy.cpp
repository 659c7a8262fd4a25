#include "finprin/determinacy.hpp"

#include <cmath>
#include <cstdlib>

namespace finprin {

std::string to_string(SearchMode m) { return m == SearchMode::Exhaustive ? "exhaustive" : "branch-and-bound"; }

std::uint64_t default_node_cap() {
  if (const char* env = std::getenv("FINPRIN_NODE_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 100'000'000ULL;
}

namespace {

class Search {
 public:
  Search(const BasicSentence& s, unsigned n, const SearchOptions& opt)
      : matcher_(s), opt_(opt), a_(s.language, n), choices_(a_.cell_count()) {
    for (std::size_t c = 0; c < a_.cell_count(); ++c)
      choices_[c] = s.language[a_.symbol_of(c)].is_function() ? static_cast<int>(n) : 2;
  }

  std::optional<MaxNonverifying> run() {
    if (matcher_.verifies(a_)) return std::nullopt;
    best_ = a_;
    best_size_ = 0;
    dfs(0, 0);
    MaxNonverifying r;
    r.size = best_size_;
    r.witness = best_;
    r.nodes = nodes_;
    return r;
  }

 private:
  void dfs(std::size_t cell, std::size_t size) {
    const std::size_t total = a_.cell_count();
    if (opt_.mode == SearchMode::BranchAndBound && size + (total - cell) <= best_size_ && cell > 0) return;
    if (cell == total) {
      if (size > best_size_) {
        best_size_ = size;
        best_ = a_;
      }
      return;
    }
    // defined values first, so large structures turn up early
    for (int v = 0; v < choices_[cell]; ++v) {
      tick();
      a_.set_unchecked(cell, v);
      if (!matcher_.find_touching(a_, cell)) dfs(cell + 1, size + 1);
      a_.set_unchecked(cell, kUndef);
      if (opt_.mode == SearchMode::BranchAndBound && best_size_ == total) return;
    }
    tick();
    dfs(cell + 1, size);
  }

  void tick() {
    if (++nodes_ > opt_.node_cap) {
      double est = 1;
      for (int c : choices_) est *= c + 1;
      throw CapExceeded("determinacy search exceeded the node cap of " + std::to_string(opt_.node_cap) +
                            " (search space up to " + std::to_string(est) + " structures)",
                        est);
    }
  }

  Matcher matcher_;
  SearchOptions opt_;
  PartialStructure a_;
  std::vector<int> choices_;
  PartialStructure best_;
  std::size_t best_size_ = 0;
  std::uint64_t nodes_ = 0;
};

}  // namespace

std::optional<MaxNonverifying> max_nonverifying(const BasicSentence& s, unsigned n, const SearchOptions& opt) {
  if (n == 0) throw ContractError("determinacy needs n >= 1");
  return Search(s, n, opt).run();
}

DeterminacyResult determinacy(const BasicSentence& s, unsigned n, const SearchOptions& opt) {
  DeterminacyResult r;
  r.n = n;
  r.s_L = s_L(s.language, n);
  r.mode = opt.mode;
  auto m = max_nonverifying(s, n, opt);
  if (!m) {
    r.degenerate = true;
    r.d = 0;
    return r;
  }
  r.d = m->size + 1;
  r.nodes = m->nodes;
  r.witness = std::move(m->witness);
  return r;
}

WeaknessReport weakness_report(const BasicSentence& s, const std::vector<unsigned>& ns, const SearchOptions& opt) {
  WeaknessReport rep;
  for (auto n : ns) {
    auto d = determinacy(s, n, opt);
    WeaknessRow row{n, d.d, d.s_L, d.d ? static_cast<double>(d.s_L) / static_cast<double>(d.d) : 0.0};
    rep.rows.push_back(row);
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rep.rows)
    if (r.ratio > 0 && r.n > 1) pts.emplace_back(std::log(r.n), std::log(r.ratio));
  if (pts.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0, sxx = 0;
    for (auto [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    if (sxx > 0) rep.exponent = sxy / sxx;
  }
  return rep;
}

}  // namespace finprin
